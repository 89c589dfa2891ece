import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cohres.antiforms import (DifferentialForm, FormError, FormMonomial, CompiledForm, dbar, evaluate_form,
                              monomial_wedge, numeric_wedge, render, top_density, volume_constant, wedge)
from cohres.polyring import RationalFunction, parse_poly, parse_rational
from cohres.supercalc import random_rational


def F(s, n=2):
    return RationalFunction.from_poly(parse_poly(s, n))


def dzb(j, n=2):
    return DifferentialForm.dzb(n, j)


def test_wedge_examples():
    assert wedge(dzb(0), dzb(1)) == -wedge(dzb(1), dzb(0))
    assert wedge(dzb(0), dzb(0)).is_zero()
    a = dzb(1).scale(F("x~")) - dzb(0).scale(F("y~"))
    assert wedge(a, dzb(0)) == wedge(dzb(1), dzb(0)).scale(F("x~"))


def test_dbar_examples():
    w = dbar(DifferentialForm.scalar(F("x~*y~")))
    assert w == dzb(0).scale(F("y~")) + dzb(1).scale(F("x~"))
    bm = dbar(DifferentialForm.scalar(parse_rational("(x~)/(x*x~ + y*y~)", 2)))
    den = parse_rational("(1)/(x*x~ + y*y~)", 2)
    expected = (dzb(0).scale(F("y*y~")) - dzb(1).scale(F("y*x~"))).scale(den * den)
    assert bm == expected


def test_monomial_validation():
    with pytest.raises(FormError):
        FormMonomial((), (1, 0))
    with pytest.raises(FormError):
        DifferentialForm.dzb(1, 1)


def test_evaluate_examples():
    w = dzb(0, 1).scale(F("z~", 1))
    assert evaluate_form(w, (2,)) == {FormMonomial((), (0,)): 2}
    assert wedge(dzb(0, 1), dzb(0, 1)).is_zero()   # (0,2) in C^1
    bm = (dzb(1).scale(F("x~")) - dzb(0).scale(F("y~"))).scale(parse_rational("(1)/(x*x~ + y*y~)^2", 2))
    vals = evaluate_form(bm, (1, 0))
    assert vals[FormMonomial((), (1,))] == 1 and vals[FormMonomial((), (0,))] == 0


def test_top_density_constants():
    one = FormMonomial((0,), (0,))
    assert top_density(DifferentialForm(1, {one: 1}), (0.3,)) == -2j
    assert volume_constant(2) == 4
    top2 = FormMonomial((0, 1), (0, 1))
    assert top_density(DifferentialForm(2, {top2: 1}), (0, 0)) == 4
    assert top_density(DifferentialForm.zero(2), (0, 0)) == 0
    with pytest.raises(FormError):
        top_density(dzb(0), (0, 0))


def test_render():
    w = dzb(0).scale(F("y~")) - dzb(1).scale(F("x~"))
    assert render(w) == "(y~)*dz~[1] + (-x~)*dz~[2]"
    assert render(DifferentialForm.zero(2)) == "0"


# --- properties -------------------------------------------------------------

monos3 = st.builds(lambda h, a: FormMonomial(tuple(sorted(h)), tuple(sorted(a))),
                   st.sets(st.integers(0, 2), max_size=3), st.sets(st.integers(0, 2), max_size=3))


@settings(max_examples=200, deadline=None)
@given(monos3, monos3)
def test_wedge_sign_law(m1, m2):
    s12, w12 = monomial_wedge(m1, m2)
    s21, w21 = monomial_wedge(m2, m1)
    assert (s12 == 0) == (s21 == 0)
    if s12:
        assert w12 == w21
        assert s12 == s21 * (-1) ** (m1.degree * m2.degree)


def _random_form(n, rng, q):
    from cohres.antiforms import anti_monomials
    terms = {}
    for m in anti_monomials(n, q):
        if rng.random() < 0.7:
            terms[m] = random_rational(n, rng)
    return DifferentialForm(n, terms)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 2), st.integers(0, 1))
def test_dbar_squared_and_leibniz(seed, qa, qb):
    rng = random.Random(seed)
    a, b = _random_form(3, rng, qa), _random_form(3, rng, qb)
    assert dbar(dbar(a)).is_zero()
    lhs = dbar(wedge(a, b))
    rhs = wedge(dbar(a), b) + wedge(a, dbar(b)).scale(RationalFunction.const(3, (-1) ** qa))
    assert lhs == rhs


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_evaluation_commutes_with_wedge(seed):
    rng = random.Random(seed)
    a, b = _random_form(2, rng, 1), _random_form(2, rng, 1)
    p = (complex(rng.uniform(-1, 1), rng.uniform(-1, 1)), complex(rng.uniform(-1, 1), rng.uniform(-1, 1)))
    direct = evaluate_form(wedge(a, b), p)
    split = numeric_wedge(evaluate_form(a, p), evaluate_form(b, p))
    for m in set(direct) | set(split):
        x, y = direct.get(m, 0), split.get(m, 0)
        assert abs(x - y) <= 1e-9 * max(1.0, abs(x))


def test_compiled_form_matches_pointwise():
    rng = random.Random(5)
    a = _random_form(2, rng, 1)
    Z = np.array([[0.3 + 0.1j, -0.2j], [1.1, 0.4 - 0.5j]])
    batch = CompiledForm(a)(Z).terms
    for i in range(2):
        point = evaluate_form(a, Z[i])
        for m, v in point.items():
            assert abs(batch[m][i] - v) <= 1e-12 * max(1, abs(v))
