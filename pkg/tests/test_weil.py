import math
import random
from fractions import Fraction

import pytest

from cinfty.cring import make_ring
from cinfty.parser import parse
from cinfty.weil import dual_numbers, weil_make, weil_phi, weil_presentation

from oracles import Truncated, eval_terms_truncated, exp_taylor, random_terms, terms_to_text


@pytest.mark.parametrize("k, order, dim", [(1, 2, 2), (1, 4, 4), (2, 2, 3), (2, 3, 6), (3, 6, 56)])
def test_dimensions(k, order, dim):
    assert weil_make(k, order).dimension == dim


def test_extra_zero_monomials():
    W = weil_make(2, 3, [(1, 1)])
    assert (1, 1) not in W.basis and W.dimension == 5


def test_ring_operations():
    W = weil_make(1, 3)
    x = W.generator(0)
    assert (W.one() + x) ** 2 == W.element({(0,): 1, (1,): 2, (2,): 1})
    V = weil_make(1, 2)
    y = V.generator(0)
    assert (V.one() + y) ** 2 == V.element({(0,): 1, (1,): 2})
    U = weil_make(2, 2)
    assert (U.generator(0) * U.generator(1)).is_zero()


def test_mixing_algebras_fails():
    with pytest.raises(ValueError):
        weil_make(1, 2).one() + weil_make(1, 3).one()


def test_phi_examples():
    D = dual_numbers()
    eps = D.generator(0)
    assert weil_phi(parse("exp(x0)"), [eps]) == D.element({(0,): 1, (1,): 1})
    W = weil_make(1, 3)
    e = W.generator(0)
    assert weil_phi(parse("sin(x0)"), [e]) == e
    assert weil_phi(parse("(1 + x0)^-1"), [e]) == W.element({(0,): 1, (1,): -1, (2,): 1})


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_exp_taylor(t):
    W = weil_make(1, 8)
    out = weil_phi(parse("exp(x0)"), [W.generator(0).scale(t)])
    for k, ref in enumerate(exp_taylor(t, 8)):
        assert out.coeff((k,)) == pytest.approx(ref, rel=1e-12)


def test_phi_at_nonzero_augmentation():
    W = weil_make(1, 4)
    a = W.constant(0.3) + W.generator(0)
    out = weil_phi(parse("sin(x0)"), [a])
    ref = [math.sin(0.3), math.cos(0.3), -math.sin(0.3) / 2, -math.cos(0.3) / 6]
    for k, r in enumerate(ref):
        assert out.coeff((k,)) == pytest.approx(r, rel=1e-14)


def test_phi_is_multiplicative():
    W = weil_make(2, 4)
    a = W.element({(0, 0): 0.5, (1, 0): 1.0, (0, 1): -0.25})
    b = W.element({(0, 0): -1.0, (1, 1): 2.0})
    f, g = parse("exp(x0)*cos(x1)"), parse("atan(x0 + x1)")
    lhs = weil_phi(parse("exp(x0)*cos(x1)*atan(x0 + x1)"), [a, b])
    rhs = weil_phi(f, [a, b]) * weil_phi(g, [a, b])
    for m in W.basis:
        assert lhs.coeff(m) == pytest.approx(rhs.coeff(m), rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("seed", range(200))
def test_polynomials_match_truncated_oracle(seed):
    rng = random.Random(seed)
    k, order, m = rng.randint(1, 3), rng.randint(2, 5), rng.randint(1, 3)
    W = weil_make(k, order)
    terms = random_terms(rng, m, 3, 4, dyadic=True)
    args, oracle_args = [], []
    for _ in range(m):
        coeffs = {mono: Fraction(rng.randint(-8, 8), 4) for mono in W.basis if rng.random() < 0.6}
        args.append(W.element({mono: float(v) for mono, v in coeffs.items()}))
        oracle_args.append(Truncated(k, order, coeffs))
    got = weil_phi(parse(terms_to_text(terms), m), args)
    ref = eval_terms_truncated(terms, oracle_args, k, order)
    for mono in W.basis:
        assert got.coeff(mono) == float(ref.c.get(mono, 0))


def test_presentation_bridge():
    assert weil_presentation(weil_make(1, 3)) == make_ring(1, ["x0^3"])
    assert weil_presentation(weil_make(2, 2)) == make_ring(2, ["x0^2", "x0*x1", "x1^2"])
    assert weil_presentation(weil_make(2, 3, [(1, 1)])) == make_ring(2, ["x0*x1", "x0^3", "x1^3"])


def test_phi_argument_errors():
    W = weil_make(1, 2)
    with pytest.raises(ValueError):
        weil_phi(parse("x0 + x1"), [W.one()])
    with pytest.raises(ValueError):
        weil_phi(parse("x0"), [])
