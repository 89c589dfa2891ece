import pytest

from cohres.catalog import data_path, minimal_resolution, shipped_ideal
from cohres.freecomplex import (ComplexError, ExtDegreeBoundError, IdealSpec, bounded_degree_kernel, check_xi,
                                dual_complex, dual_of_dual, ext_generators, format_complex,
                                generic_exactness_check, koszul_complex, load_ideal, monomial_codim,
                                parse_complex, parse_ideal, resolve_ideal, taylor_complex)
from cohres.polyring import ParseError, Polynomial, parse_poly


def gens(*s, n=2):
    return [parse_poly(x, n) for x in s]


def test_koszul_ranks_and_composition():
    c = koszul_complex(gens("z1", "z2"))
    assert c.ranks == [1, 2, 1] and c.codim == 2
    c3 = koszul_complex(gens("x", "y", "z", n=3))
    assert c3.ranks == [1, 3, 3, 1]
    assert all(ok for _, ok in c3.composition_zero())


def test_taylor_ranks():
    c = taylor_complex(gens("x^2", "x*y", "y^2"))
    assert c.ranks == [1, 3, 3, 1] and c.codim == 2
    assert all(ok for _, ok in c.composition_zero())


def test_taylor_requires_monic_monomials():
    with pytest.raises(ComplexError):
        taylor_complex(gens("2*x^2", "y"))
    with pytest.raises(ComplexError):
        taylor_complex(gens("x + y", "y"))


def test_monomial_codim():
    assert monomial_codim(gens("x^2", "x*y", "y^2")) == 2
    assert monomial_codim(gens("x*y")) == 1
    assert monomial_codim(gens("y^2", "y*z", "z^2", "x^2", n=3)) == 3


@pytest.mark.parametrize("build", [
    lambda: koszul_complex(gens("z1", "z2")),
    lambda: koszul_complex(gens("x^2", "y^3")),
    lambda: taylor_complex(gens("x^2", "x*y", "y^2")),
    lambda: minimal_resolution("x2_xy_y2"),
    lambda: minimal_resolution("x2_y2_z2_yz"),
])
def test_exactness_passes(build):
    rep = generic_exactness_check(build(), seed=1)
    assert rep.passed, rep.lines()


def test_koszul_of_non_regular_sequence_fails_exactness():
    rep = generic_exactness_check(koszul_complex(gens("x^2", "x*y", "y^2"), codim=2), seed=0)
    assert not rep.passed
    assert any("FAIL" in s for s in rep.lines())


def test_broken_complex_fails_exactness():
    c = minimal_resolution("x2_xy_y2")
    bad = c.with_diff(2, [[parse_poly("y", 2), Polynomial.zero(2)],
                          [parse_poly("-x", 2), Polynomial.zero(2)],
                          [Polynomial.zero(2), parse_poly("-x", 2)]])
    assert not all(ok for _, ok in bad.composition_zero()) or not generic_exactness_check(bad).passed


def test_dual_of_dual_roundtrip():
    c = minimal_resolution("x2_xy_y2")
    d = dual_complex(c)
    assert d.ranks == c.ranks
    assert dual_of_dual(d) == c.diffs


def test_bounded_kernel():
    M = [gens("z1", "z2")]
    ker = bounded_degree_kernel(M, 1)
    assert len(ker) == 1
    v = ker[0]
    assert (parse_poly("x", 2) * v[0] + parse_poly("y", 2) * v[1]).is_zero()
    assert bounded_degree_kernel(M, 0) == []


def test_ext_generators_minimal_and_taylor():
    c = minimal_resolution("x2_xy_y2")
    xis = ext_generators(c)
    assert [[str(x) for x in xi] for xi in xis] == [["1", "0"], ["0", "1"]]
    t = taylor_complex(gens("x^2", "x*y", "y^2"))
    xt = ext_generators(t, D=1)
    assert len(xt) == 2
    assert all(check_xi(t, xi) for xi in xt)


def test_ext_generators_degree_bound():
    t = taylor_complex(gens("x^2", "x*y", "y^2"))
    with pytest.raises(ExtDegreeBoundError):
        ext_generators(t, D=0)


def test_complex_file_roundtrip():
    c = minimal_resolution("x2_y2_z2_yz")
    again = parse_complex(format_complex(c))
    assert again.ranks == c.ranks and again.diffs == c.diffs and again.codim == c.codim


@pytest.mark.parametrize("text", [
    "nvars = 2\nranks = 1, 2\ncodim = 1\n[f1]\nx\n",                 # row too short
    "nvars = 2\nranks = 2, 1\ncodim = 1\n[f1]\nx\ny\n",              # E_0 rank
    "nvars = 2\nranks = 1, 1\ncodim = 1\n[f1]\nx~\n",                # not holomorphic
    "ranks = 1, 1\n[f1]\nx\n",                                       # no nvars
    "nvars = 2\nranks = 1, 1\ncodim = 1\n[f1]\nx +\n",               # syntax
])
def test_complex_file_errors(text):
    with pytest.raises((ParseError, ComplexError)):
        parse_complex(text)


def test_ideal_files():
    spec = load_ideal(data_path("x2_xy_y2.ideal"))
    assert spec.kind == "monomial" and spec.codim() == 2
    c = resolve_ideal(spec)
    assert c.ranks == [1, 3, 2]
    assert resolve_ideal(spec, "taylor").ranks == [1, 3, 3, 1]
    s2 = parse_ideal("nvars = 2\ngenerators = x^2, y^3\nkind = complete-intersection\nxi = 1\n")
    assert s2.xi is not None and resolve_ideal(s2).ranks == [1, 2, 1]


def test_ideal_validation():
    with pytest.raises(ComplexError):
        IdealSpec(2, gens("x + 1"))
    with pytest.raises(ComplexError):
        IdealSpec(2, gens("x + y"), kind="monomial")
    with pytest.raises(ParseError):
        parse_ideal("generators = x\n")


def test_resolution_must_match_generators():
    spec = IdealSpec(2, gens("x^2", "y^2"), "monomial", None, data_path("min_x2_xy_y2.cx"))
    with pytest.raises(ComplexError):
        resolve_ideal(spec)


def test_shipped_ideal_codims():
    assert shipped_ideal("x2_y2_z2_yz").codim() == 3
    assert shipped_ideal("z1_in_C2").codim() == 1
