"""Unit tests for zero classification, sign condition, and quadrature."""

import math

import numpy as np
import pytest
import scipy.special as sp

from planted import planted_polynomial
from wavedecay.trig import NonlinearityCoefficients, TrigPolynomial
from wavedecay.structure import (
    AgemiStatus,
    NegativityDetected,
    WrongRegime,
    ZeroCase,
    analyze,
    check_agemi,
    check_quadratic_null,
    classify,
    predict_decay,
    verify_integrability,
)

TWO_PI = 2.0 * math.pi


def _cos2():
    return TrigPolynomial(((2, 0, 1.0),))


def _one_minus_sin_cubed():
    one = TrigPolynomial.constant(1.0)
    s = TrigPolynomial(((0, 1, 1.0),))
    return (one - s) * (one - s) * (one - s)


def _cos2_times_one_minus_sin():
    one = TrigPolynomial.constant(1.0)
    s = TrigPolynomial(((0, 1, 1.0),))
    return _cos2() * (one - s)


# ---------------------------------------------------------------------------
# trichotomy


def test_identically_zero():
    cl = classify(TrigPolynomial.zero())
    assert cl.case is ZeroCase.IDENTICALLY_ZERO
    # cos^2 + sin^2 - 1 cancels only semantically (Fourier side)
    p = TrigPolynomial(((2, 0, 1.0), (0, 2, 1.0), (0, 0, -1.0)))
    assert classify(p).case is ZeroCase.IDENTICALLY_ZERO


def test_strictly_positive_reports_minimum():
    p = TrigPolynomial(((2, 0, 1.0), (0, 0, 0.5)))  # cos^2 + 1/2
    cl = classify(p)
    assert cl.case is ZeroCase.STRICTLY_POSITIVE
    assert cl.min_value == pytest.approx(0.5, rel=1e-9)


def test_negativity_detected_with_witness():
    p = TrigPolynomial(((0, 1, 1.0),))  # sin(theta), negative on (pi, 2 pi)
    with pytest.raises(NegativityDetected):
        classify(p)


def test_double_zeros_of_squared_cosine():
    cl = classify(_cos2())
    assert cl.case is ZeroCase.FINITE_ZEROS
    zeros = sorted(cl.zeros, key=lambda z: z.theta)
    assert len(zeros) == 2
    assert abs(zeros[0].theta - math.pi / 2) < 1e-9
    assert abs(zeros[1].theta - 3 * math.pi / 2) < 1e-9
    assert [z.order for z in zeros] == [2, 2]
    for z in zeros:
        assert z.leading == pytest.approx(1.0, rel=1e-9)
    assert cl.nu == 1


def test_mixed_orders():
    cl = classify(_cos2_times_one_minus_sin())
    zeros = sorted(cl.zeros, key=lambda z: z.theta)
    assert [(z.order,) for z in zeros] == [(4,), (2,)]
    assert abs(zeros[0].theta - math.pi / 2) < 1e-9
    assert abs(zeros[1].theta - 3 * math.pi / 2) < 1e-9
    assert zeros[0].leading == pytest.approx(0.5, rel=1e-9)
    assert zeros[1].leading == pytest.approx(2.0, rel=1e-9)
    assert cl.nu == 2


def test_order_six_zero():
    cl = classify(_one_minus_sin_cubed())
    assert len(cl.zeros) == 1
    z = cl.zeros[0]
    assert abs(z.theta - math.pi / 2) < 1e-9
    assert z.order == 6
    assert z.leading == pytest.approx(0.125, rel=1e-9)
    assert cl.nu == 3


def test_planted_zeros_recovered():
    rng = np.random.default_rng(2024)
    for _ in range(40):
        poly, expected = planted_polynomial(rng)
        cl = classify(poly)
        assert cl.case is ZeroCase.FINITE_ZEROS
        got = sorted(cl.zeros, key=lambda z: z.theta)
        exp = sorted(expected)
        assert len(got) == len(exp)
        for z, (theta, order, lead) in zip(got, exp):
            assert abs(z.theta - theta) < 1e-7
            assert z.order == order          # exact, never odd
            assert z.order % 2 == 0
            assert z.leading == pytest.approx(lead, rel=1e-6)


def test_scaling_invariance_of_classification():
    for scale in (1e-6, 1.0, 1e6):
        cl = classify(_cos2() * scale)
        assert cl.case is ZeroCase.FINITE_ZEROS
        assert sorted(z.order for z in cl.zeros) == [2, 2]
        for z in cl.zeros:
            assert z.leading == pytest.approx(scale, rel=1e-8)


# ---------------------------------------------------------------------------
# null and sign conditions


def test_quadratic_null_condition():
    assert check_quadratic_null(
        NonlinearityCoefficients(B=np.diag([1.0, -1.0, -1.0]))
    )
    assert not check_quadratic_null(
        NonlinearityCoefficients(B=np.diag([1.0, 0.0, 0.0]))
    )
    assert check_quadratic_null(NonlinearityCoefficients())


def test_cubic_null_identity():
    # u_t (u_t^2 - |grad u|^2) restricts to zero on the circle
    C = np.zeros((3, 3, 3))
    C[0, 0, 0] = 1.0
    C[0, 1, 1] = -1.0
    C[0, 2, 2] = -1.0
    report = analyze(NonlinearityCoefficients(C=C))
    assert report.cubic_null
    assert report.prediction is None


def test_agemi_statuses():
    C = np.zeros((3, 3, 3))
    C[0, 0, 0] = -1.0   # F = -(u_t)^3, symbol identically one
    res = check_agemi(NonlinearityCoefficients(C=C))
    assert res.status is AgemiStatus.HOLDS_STRICTLY
    assert res.min_value == pytest.approx(1.0, rel=1e-9)

    C = np.zeros((3, 3, 3))
    C[1, 1, 0] = -1.0   # symbol cos^2, zeros on the circle
    assert check_agemi(NonlinearityCoefficients(C=C)).status is AgemiStatus.HOLDS

    C = np.zeros((3, 3, 3))
    C[0, 0, 0] = 1.0    # F = +(u_t)^3, symbol identically -1
    res = check_agemi(NonlinearityCoefficients(C=C))
    assert res.status is AgemiStatus.FAILS
    assert res.witness is not None


# ---------------------------------------------------------------------------
# decay prediction


def test_decay_exponents():
    pred = predict_decay(classify(_cos2()), delta=0.01)
    assert pred.nu == 1
    assert pred.lam == pytest.approx(0.25 - 0.01)
    assert pred.gamma_max == pytest.approx(0.5)
    assert 0.0 < pred.mu < 0.1

    pred = predict_decay(classify(_cos2_times_one_minus_sin()), delta=0.01)
    assert pred.nu == 2
    assert pred.lam == pytest.approx(0.125 - 0.01)

    pred = predict_decay(classify(_one_minus_sin_cubed()), delta=0.01)
    assert pred.nu == 3
    assert pred.lam == pytest.approx(1.0 / 12.0 - 0.01)


def test_decay_prediction_rejects_other_regimes():
    with pytest.raises(WrongRegime):
        predict_decay(classify(TrigPolynomial.constant(1.0)))
    with pytest.raises(ValueError):
        predict_decay(classify(_cos2()), delta=0.5)


def test_report_serialization_digits():
    C = np.zeros((3, 3, 3))
    C[1, 1, 0] = -1.0
    d = analyze(NonlinearityCoefficients(C=C)).to_dict()
    assert d["quadratic_null"] is True
    assert d["cubic_null"] is False
    zeros = sorted(d["classification"]["zeros"], key=lambda z: z["theta"])
    assert zeros[0]["theta"] == pytest.approx(math.pi / 2, abs=1e-9)
    assert d["prediction"]["nu"] == 1
    assert d["prediction"]["lambda"] == pytest.approx(0.24)


# ---------------------------------------------------------------------------
# quadrature of 1 / Psi^gamma


def _exact_cos2_integral(gamma: float) -> float:
    # int_0^{2pi} |cos|^{-2 gamma} = 4 * (sqrt(pi)/2) G((a+1)/2) / G(a/2+1), a = -2 gamma
    a = -2.0 * gamma
    return 4.0 * (math.sqrt(math.pi) / 2.0) * sp.gamma((a + 1) / 2) / sp.gamma(a / 2 + 1)


def _exact_one_minus_sin_cubed_integral(gamma: float) -> float:
    # int (1 - sin)^{-3 gamma} = 2^{2-a} (sqrt(pi)/2) G((1-2a)/2) / G(1-a), a = 3 gamma
    a = 3.0 * gamma
    return (
        2.0 ** (2.0 - a)
        * (math.sqrt(math.pi) / 2.0)
        * sp.gamma((1.0 - 2.0 * a) / 2.0)
        / sp.gamma(1.0 - a)
    )


@pytest.mark.parametrize("gamma", [0.1, 0.3, 0.45])
def test_quadrature_matches_beta_oracle_below_critical(gamma):
    rep = verify_integrability(_cos2(), gamma)
    assert rep.finite
    assert rep.value == pytest.approx(_exact_cos2_integral(gamma), rel=1e-6)


@pytest.mark.parametrize("gamma", [0.05, 0.1, 0.15])
def test_quadrature_high_order_zero_matches_oracle(gamma):
    rep = verify_integrability(_one_minus_sin_cubed(), gamma)
    assert rep.finite
    assert rep.value == pytest.approx(
        _exact_one_minus_sin_cubed_integral(gamma), rel=1e-6
    )


@pytest.mark.parametrize("gamma", [0.55, 0.7])
def test_quadrature_divergence_above_critical(gamma):
    rep = verify_integrability(_cos2(), gamma)
    assert not rep.finite
    assert rep.value is None
    ests = rep.estimates
    assert all(b > 1.1 * a for a, b in zip(ests[:5], ests[1:6]))


def test_quadrature_boundary_exponent_divergent():
    # order-6 zero: critical exponent gamma = 1/6
    rep = verify_integrability(_one_minus_sin_cubed(), 1.0 / 6.0)
    assert not rep.finite


def test_quadrature_requires_finite_zero_regime():
    with pytest.raises(WrongRegime):
        verify_integrability(TrigPolynomial.constant(2.0), 0.3)
    with pytest.raises(ValueError):
        verify_integrability(_cos2(), -0.1)
