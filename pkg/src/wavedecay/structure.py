"""Structural conditions and decay-rate prediction.

Given the cubic symbol restricted to the circle, Psi(theta), this module
decides whether the symbol vanishes identically, is strictly positive, or
has finitely many zeros of even order; extracts zero locations, orders and
leading coefficients; certifies integrability of 1/Psi^gamma; and turns
the maximal vanishing order into the predicted energy-decay exponent.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .trig import (
    TWO_PI,
    NonlinearityCoefficients,
    TrigPolynomial,
    cubic_to_trig_poly,
    quadratic_to_trig_poly,
)

# tolerances (scale-relative via max(1, max coefficient magnitude))
FOURIER_NULL_TOL = 1e-12
NEGATIVITY_TOL = 1e-10
ZERO_VALUE_TOL = 1e-9
DERIV_ORDER_TOL = 1e-7
GRID_POINTS = 4096
MIN_ZERO_GAP = 1e-6


class NegativityDetected(ValueError):
    """Psi takes a value below -1e-10: the nonnegativity hypothesis fails."""

    def __init__(self, theta: float, value: float):
        super().__init__(f"Psi({theta}) = {value} < 0")
        self.theta = theta
        self.value = value


class OrderOverflow(RuntimeError):
    """No nonzero derivative up to 2*degree at a detected zero."""


class WrongRegime(ValueError):
    """Operation requires the finite-zeros classification case."""


class ZeroCase(enum.Enum):
    IDENTICALLY_ZERO = "identically_zero"
    STRICTLY_POSITIVE = "strictly_positive"
    FINITE_ZEROS = "finite_zeros"


@dataclass(frozen=True)
class ZeroInfo:
    theta: float          # in [0, 2*pi)
    order: int            # even positive integer
    leading: float        # strictly positive


@dataclass(frozen=True)
class ZeroClassification:
    case: ZeroCase
    min_value: Optional[float] = None          # strictly-positive case
    zeros: tuple[ZeroInfo, ...] = ()

    @property
    def nu(self) -> int:
        if self.case is not ZeroCase.FINITE_ZEROS:
            raise WrongRegime("nu is defined only in the finite-zeros case")
        return max(z.order for z in self.zeros) // 2


class AgemiStatus(enum.Enum):
    FAILS = "fails"
    HOLDS = "holds"
    HOLDS_STRICTLY = "holds_strictly"


@dataclass(frozen=True)
class AgemiResult:
    status: AgemiStatus
    witness: Optional[float] = None       # angle where Psi < 0
    min_value: Optional[float] = None     # strict case


@dataclass(frozen=True)
class DecayPrediction:
    nu: int
    delta: float
    lam: float = field(init=False)
    gamma_max: float = field(init=False)
    mu: float = field(init=False)

    def __post_init__(self):
        if self.nu < 1:
            raise ValueError("nu must be a positive integer")
        if not 0.0 < self.delta < 1.0 / (4 * self.nu):
            raise ValueError("delta must lie in (0, 1/(4 nu))")
        lam = 1.0 / (4 * self.nu) - self.delta
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "gamma_max", 1.0 / (2 * self.nu))
        object.__setattr__(
            self, "mu", 0.9 * min(0.1, (1 - 4 * lam) / (2 - 4 * lam))
        )

    @property
    def energy_rate_exponent(self) -> float:
        """Exponent of the (log t)^(-x) energy-norm decay: 1/(4 nu) - delta."""
        return self.lam


@dataclass(frozen=True)
class ConditionReport:
    quadratic_null: bool
    cubic_null: bool
    agemi: AgemiResult
    classification: Optional[ZeroClassification]
    prediction: Optional[DecayPrediction]

    def to_dict(self) -> dict:
        d: dict = {
            "quadratic_null": self.quadratic_null,
            "cubic_null": self.cubic_null,
            "agemi": {"status": self.agemi.status.value},
        }
        if self.agemi.witness is not None:
            d["agemi"]["witness"] = float(f"{self.agemi.witness:.12g}")
        if self.agemi.min_value is not None:
            d["agemi"]["min_value"] = float(f"{self.agemi.min_value:.12g}")
        if self.classification is not None:
            cd: dict = {"case": self.classification.case.value}
            if self.classification.min_value is not None:
                cd["min_value"] = float(f"{self.classification.min_value:.12g}")
            if self.classification.zeros:
                cd["zeros"] = [
                    {
                        "theta": float(f"{z.theta:.12g}"),
                        "order": z.order,
                        "leading": float(f"{z.leading:.12g}"),
                    }
                    for z in self.classification.zeros
                ]
            d["classification"] = cd
        if self.prediction is not None:
            p = self.prediction
            d["prediction"] = {
                "nu": p.nu,
                "delta": p.delta,
                "lambda": p.lam,
                "gamma_max": p.gamma_max,
                "mu": p.mu,
            }
        return d


def check_quadratic_null(coeffs: NonlinearityCoefficients) -> bool:
    """True iff the quadratic symbol vanishes identically on the circle."""
    poly = quadratic_to_trig_poly(coeffs)
    scale = max(1.0, poly.max_abs_coef)
    return poly.max_abs_fourier() < FOURIER_NULL_TOL * scale


def _circ_dist(a: float, b: float) -> float:
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


def _refine_minimum(psi, lo, hi, iters=200):
    """Golden-section minimization of psi on [lo, hi]."""
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = psi(c), psi(d)
    for _ in range(iters):
        if b - a < 1e-14:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = psi(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = psi(d)
    x = 0.5 * (a + b)
    return x, psi(x)


def _refine_root(f, fprime, lo, hi, x0, iters=60):
    """Find a root of f in [lo, hi] by bisection to machine-level width.

    Returns None if no sign change of f exists in the interval.  Plain
    bisection is deliberate: near a high-order zero the residual sits at
    the floating-point noise floor over a wide neighborhood, where
    Newton steps (noise divided by noise) random-walk away from the root
    that the sign changes still locate reliably.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        return None
    a, b, fa = lo, hi, flo
    for _ in range(iters):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0.0:
            return m
        if fa * fm < 0.0:
            b = m
        else:
            a, fa = m, fm
    return 0.5 * (a + b)


def _detect_zero(psi: TrigPolynomial, derivs, theta_hat, half_width, scale):
    """Determine the vanishing order and refined location near theta_hat.

    For each even candidate order k, refine a root of psi^(k-1) near
    theta_hat and accept if all lower derivatives vanish within the
    factorial-scaled thresholds while psi^(k) is significantly positive.
    """
    max_order = len(derivs) - 1
    lo, hi = theta_hat - half_width, theta_hat + half_width
    # the odd derivative's sign well around a high-order zero can be much
    # narrower than the candidate bracket, so scan a fine subgrid for sign
    # changes instead of bisecting the bracket endpoints directly
    grid = np.linspace(lo, hi, 129)
    for k in range(2, max_order + 1, 2):
        f = derivs[k - 1]
        fvals = np.array([f(x) for x in grid])
        sign_change = np.nonzero(fvals[:-1] * fvals[1:] <= 0.0)[0]
        for i in sign_change:
            x = _refine_root(f, derivs[k], float(grid[i]), float(grid[i + 1]), theta_hat)
            if x is None:
                continue
            tol_ok = all(
                abs(derivs[l](x)) <= DERIV_ORDER_TOL * scale * math.factorial(max(l, 1))
                for l in range(k)
            )
            dk = derivs[k](x)
            if tol_ok and dk > DERIV_ORDER_TOL * scale * math.factorial(k):
                return ZeroInfo(
                    theta=x % TWO_PI, order=k, leading=dk / math.factorial(k)
                )
    raise OrderOverflow(
        f"no significant derivative up to order {max_order} near theta={theta_hat}"
    )


def classify(psi: TrigPolynomial, grid_points: int = GRID_POINTS) -> ZeroClassification:
    """Trichotomy of a nonnegative trigonometric polynomial.

    Either identically zero (all Fourier coefficients below tolerance),
    strictly positive (refined global minimum above tolerance), or a
    finite set of zeros, each with an even vanishing order and a strictly
    positive leading coefficient.
    """
    scale = max(1.0, psi.max_abs_coef)
    if psi.max_abs_fourier() < FOURIER_NULL_TOL * scale:
        return ZeroClassification(case=ZeroCase.IDENTICALLY_ZERO)

    thetas = TWO_PI * np.arange(grid_points) / grid_points
    vals = np.asarray(psi(thetas))
    if vals.min() < -NEGATIVITY_TOL * scale:
        i = int(vals.argmin())
        raise NegativityDetected(float(thetas[i]), float(vals[i]))

    dtheta = TWO_PI / grid_points
    # local minima on the circular grid
    left = np.roll(vals, 1)
    right = np.roll(vals, -1)
    min_idx = np.nonzero((vals < left) & (vals <= right))[0]

    # only minima that can plausibly touch zero need order analysis; the
    # rest matter solely through the global minimum
    zero_screen = 1e-4 * scale
    candidates = sorted(float(thetas[i]) for i in min_idx if vals[i] < zero_screen)
    # a high-order zero sits at the bottom of a wide noise-flat valley
    # that can host several spurious grid minima, so cluster consecutive
    # candidates and bracket each whole cluster rather than single points
    clusters: list[list[float]] = []
    for x in candidates:
        if clusters and x - clusters[-1][-1] < 0.05:
            clusters[-1].append(x)
        else:
            clusters.append([x])
    if len(clusters) > 1 and (TWO_PI - clusters[-1][-1] + clusters[0][0]) < 0.05:
        clusters[0] = [c - TWO_PI for c in clusters.pop()] + clusters[0]
    centers = [0.5 * (c[0] + c[-1]) for c in clusters]

    derivs = psi.derivatives(2 * max(psi.degree, 1))
    zeros: list[ZeroInfo] = []
    for cluster, x in zip(clusters, centers):
        span = cluster[-1] - cluster[0]
        half_width = max(4 * dtheta, 0.05, 0.5 * span + 4 * dtheta)
        if len(centers) > 1:
            gap = min(_circ_dist(x, m) for m in centers if m != x)
            half_width = min(half_width, gap / 2.0)
        xr, v = _refine_minimum(psi, x - half_width, x + half_width)
        if v < -NEGATIVITY_TOL * scale:
            raise NegativityDetected(xr % TWO_PI, v)
        if v >= ZERO_VALUE_TOL * scale:
            continue
        info = _detect_zero(psi, derivs, x, half_width, scale)
        if any(_circ_dist(info.theta, z.theta) <= MIN_ZERO_GAP for z in zeros):
            continue
        zeros.append(info)

    if not zeros:
        # strictly positive: refine the global grid minimum
        i = int(vals.argmin())
        _, min_val = _refine_minimum(
            psi, float(thetas[i]) - dtheta, float(thetas[i]) + dtheta
        )
        if min_val < -NEGATIVITY_TOL * scale:
            raise NegativityDetected(float(thetas[i]), min_val)
        return ZeroClassification(
            case=ZeroCase.STRICTLY_POSITIVE, min_value=float(min_val)
        )
    zeros.sort(key=lambda z: z.theta)
    return ZeroClassification(case=ZeroCase.FINITE_ZEROS, zeros=tuple(zeros))


def check_agemi(coeffs: NonlinearityCoefficients) -> AgemiResult:
    """Sign condition of the cubic symbol on the circle."""
    psi = cubic_to_trig_poly(coeffs)
    try:
        cl = classify(psi)
    except NegativityDetected as exc:
        return AgemiResult(status=AgemiStatus.FAILS, witness=exc.theta)
    if cl.case is ZeroCase.STRICTLY_POSITIVE:
        return AgemiResult(status=AgemiStatus.HOLDS_STRICTLY, min_value=cl.min_value)
    return AgemiResult(status=AgemiStatus.HOLDS)


def predict_decay(classification: ZeroClassification, delta: float = 0.01) -> DecayPrediction:
    """Decay exponent from the maximal vanishing order: lambda = 1/(4 nu) - delta."""
    if classification.case is not ZeroCase.FINITE_ZEROS:
        raise WrongRegime(
            "decay prediction requires the finite-zeros case, got "
            f"{classification.case.value}"
        )
    return DecayPrediction(nu=classification.nu, delta=delta)


@dataclass(frozen=True)
class IntegrabilityReport:
    finite: bool
    gamma: float
    estimates: tuple[float, ...]
    value: Optional[float] = None     # stabilized estimate, finite case


def _quad(f, a, b):
    with warnings.catch_warnings():
        # near-singular integrands hit quad's roundoff heuristics; the
        # achieved accuracy is far tighter than the 1e-4 level criterion
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(f, a, b, epsabs=1e-12, epsrel=1e-10, limit=200)
    return val


def verify_integrability(
    psi: TrigPolynomial,
    gamma: float,
    classification: Optional[ZeroClassification] = None,
    levels: int = 6,
    r0: float = 0.05,
    shrink: float = 1.0 / 16.0,
) -> IntegrabilityReport:
    """Certify (non-)convergence of the circle integral of 1/Psi^gamma.

    Each refinement level excludes a shrinking neighborhood of every zero.
    For zeros whose local exponent 2 nu_j gamma is below 1, the near-zone
    contribution is restored analytically from the model
    c_j (theta - theta_j)^(2 nu_j), so the estimate sequence stabilizes;
    at a zero with exponent >= 1 the model integral is infinite and the
    estimates grow without settling.  The excluded radius never shrinks
    below the radius where Psi drops under double-precision evaluation
    noise (relevant only for high-order zeros at deep levels).
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if classification is None:
        classification = classify(psi)
    if classification.case is not ZeroCase.FINITE_ZEROS:
        raise WrongRegime("integrability check requires the finite-zeros case")

    zeros = classification.zeros
    gap = min(
        (_circ_dist(zeros[i].theta, zeros[j].theta)
         for i in range(len(zeros)) for j in range(i + 1, len(zeros))),
        default=TWO_PI,
    )
    scale = max(1.0, psi.max_abs_coef)
    r_start = min(r0, gap / 4.0)
    noise_floor = 1e-14 * scale
    r_noise = {
        z.theta: (noise_floor / z.leading) ** (1.0 / z.order) for z in zeros
    }

    def integrand(theta):
        return max(psi(theta), noise_floor) ** (-gamma)

    def outer_integral(radii):
        """Integral over the circle minus the excluded zones."""
        angles = sorted(z.theta for z in zeros)
        total = 0.0
        m = len(angles)
        for i, th in enumerate(angles):
            nxt = angles[(i + 1) % m] + (TWO_PI if i == m - 1 else 0.0)
            mid = 0.5 * (th + nxt)
            r_r, r_l = radii[th], radii[nxt % TWO_PI]
            # log-distance substitution on the flanks of each excluded zone
            total += _quad(
                lambda s, th=th, r=r_r: integrand(th + r * math.exp(s)) * r * math.exp(s),
                0.0, math.log((mid - th) / r_r),
            )
            total += _quad(
                lambda s, nxt=nxt, r=r_l: integrand(nxt - r * math.exp(s)) * r * math.exp(s),
                0.0, math.log((nxt - mid) / r_l),
            )
        return total

    def near_zone_model(radii):
        """Analytic integral of the local models over the excluded zones."""
        total = 0.0
        for z in zeros:
            a = 2.0 * gamma * (z.order // 2)   # exponent 2 nu_j gamma
            if a < 1.0:
                r = radii[z.theta]
                total += 2.0 * z.leading ** (-gamma) * r ** (1.0 - a) / (1.0 - a)
        return total

    estimates = []
    for lvl in range(levels):
        r = r_start * shrink ** lvl
        radii = {z.theta: max(r, r_noise[z.theta]) for z in zeros}
        estimates.append(outer_integral(radii) + near_zone_model(radii))

    finite = all(gamma * z.order < 1.0 for z in zeros)
    stabilized = abs(estimates[-1] - estimates[-2]) < 1e-4 * abs(estimates[-1])
    return IntegrabilityReport(
        finite=finite,
        gamma=gamma,
        estimates=tuple(estimates),
        value=estimates[-1] if finite and stabilized else None,
    )


def analyze(coeffs: NonlinearityCoefficients, delta: float = 0.01) -> ConditionReport:
    """Full structural report: null conditions, sign condition, prediction."""
    qnull = check_quadratic_null(coeffs)
    psi = cubic_to_trig_poly(coeffs)
    try:
        cl = classify(psi)
    except NegativityDetected as exc:
        return ConditionReport(
            quadratic_null=qnull,
            cubic_null=False,
            agemi=AgemiResult(status=AgemiStatus.FAILS, witness=exc.theta),
            classification=None,
            prediction=None,
        )
    cubic_null = cl.case is ZeroCase.IDENTICALLY_ZERO
    if cl.case is ZeroCase.STRICTLY_POSITIVE:
        agemi = AgemiResult(status=AgemiStatus.HOLDS_STRICTLY, min_value=cl.min_value)
    else:
        agemi = AgemiResult(status=AgemiStatus.HOLDS)
    prediction = None
    if cl.case is ZeroCase.FINITE_ZEROS:
        prediction = predict_decay(cl, delta)
    return ConditionReport(
        quadratic_null=qnull,
        cubic_null=cubic_null,
        agemi=agemi,
        classification=cl,
        prediction=prediction,
    )
