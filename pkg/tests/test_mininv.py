import pytest
from conftest import SMALL, complex_named

from cohres import linalg
from cohres.freecomplex import koszul_complex
from cohres.mininv import (IdentityFailure, build_u, identity_metric, koszul_product_metric, koszul_sigma,
                           make_metric, parse_metric, sigma_step, sigmas_for, verify_identities, weighted_metric)
from cohres.polyring import ParseError, RationalFunction, parse_poly, parse_rational


@pytest.mark.parametrize("metric", ["identity", "weighted"])
@pytest.mark.parametrize("name", SMALL)
def test_identity_suite(name, metric):
    c = complex_named(name)
    rep = verify_identities(c, make_metric(metric, c))
    assert rep.passed, rep.first_failure()


def test_sigma_for_one_generator_is_conjugate_over_norm():
    c = koszul_complex([parse_poly("x^2", 2)])
    s = sigmas_for(c, identity_metric(c))[1]
    assert s[0][0] == parse_rational("(x~^2)/(x^2*x~^2)", 2)


def test_row_vector_sigma():
    # sigma_1 = f* (f f*)^-1 for the row (z1, z2)
    c = complex_named("koszul_z1z2")
    s = sigmas_for(c, identity_metric(c))[1]
    assert s[0][0] == parse_rational("(x~)/(x*x~ + y*y~)", 2)
    assert s[1][0] == parse_rational("(y~)/(x*x~ + y*y~)", 2)


def test_column_vector_sigma_full_rank():
    # sigma = (g* g)^-1 g* for a column
    n = 2
    f = [[parse_poly("x", n)], [parse_poly("y", n)]]
    I2, I1 = linalg.identity(2, n), linalg.identity(1, n)
    s = sigma_step(f, I2, I1, n, diagonal=True)
    assert s[0][0] == parse_rational("(x~)/(x*x~ + y*y~)", 2)
    assert s[0][1] == parse_rational("(y~)/(x*x~ + y*y~)", 2)


@pytest.mark.parametrize("weights", [None, ["1 + x*x~", "2 + y*y~"]])
def test_koszul_fast_path_matches_general(weights):
    gens = [parse_poly("x^2", 2), parse_poly("y^3", 2)]
    c = koszul_complex(gens)
    n = 2
    w = None if weights is None else [RationalFunction.from_poly(parse_poly(s, n)) for s in weights]
    metric = identity_metric(c) if w is None else koszul_product_metric(2, w, n)
    fast = koszul_sigma(gens, w)
    slow = sigmas_for(c, metric)
    for k in fast:
        assert linalg.equal(fast[k], slow[k]), k


def test_metric_checks():
    c = complex_named("x2_xy_y2")
    m = weighted_metric(c)
    assert m.hermitian_ok() and m.positive_definite_ok()
    text = "[h1]\n1, 0, 0\n0, 2, x\n0, x~, 3\n"
    fm = parse_metric(text, c)
    assert not fm.diagonal and fm.hermitian_ok()
    rep = verify_identities(c, fm)
    assert rep.passed, rep.first_failure()
    with pytest.raises(ParseError):
        parse_metric("[h1]\n1, 0\n0, 1\n", c)


def test_corrupted_complex_is_named():
    c = complex_named("x2_xy_y2")
    bad = c.with_diff(2, [[parse_poly("y", 2), parse_poly("0", 2)],
                          [parse_poly("x", 2), parse_poly("y", 2)],
                          [parse_poly("0", 2), parse_poly("-x", 2)]])
    rep = verify_identities(bad, identity_metric(bad))
    assert not rep.passed
    assert rep.first_failure() == "f1 f2 = 0"


def test_applied_u_invariants_raise_on_wrong_sigma():
    c = complex_named("koszul_z1z2")
    sig = sigmas_for(c, identity_metric(c))
    sig = dict(sig)
    sig[1] = [[x * RationalFunction.const(2, 2) for x in row] for row in sig[1]]
    with pytest.raises(IdentityFailure):
        build_u(c, identity_metric(c), sigmas=sig)
