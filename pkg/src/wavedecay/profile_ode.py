"""Characteristic-profile ODE machinery.

Along an outgoing ray r = t + sigma the wave amplitude V obeys

    dV/dt = -P(omega)/(2 t) V^3 + G(t),

and Phi = P V^2 then satisfies a scalar differential inequality whose
decay is controlled by an explicit logarithmic bound (Matsumura-type
lemma).  This module integrates both ODEs with a classical 4th-order
step-doubling scheme on the log-time axis, evaluates the explicit bound
constant, and fits the 1/sqrt(P log t) decay of V.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .trig import Direction

LOG2 = math.log(2.0)
OUTPUT_POINTS_PER_DECADE = 64
STEP_ATOL = 1e-10
BLOWUP_GUARD = 1e6


class ProfileBlowUp(RuntimeError):
    """|V| exceeded the blow-up guard (negative P misuse or huge forcing)."""

    def __init__(self, t: float, v: float):
        super().__init__(f"|V({t})| = {abs(v)} exceeded the blow-up guard")
        self.t = t
        self.v = v


class StepUnderflow(RuntimeError):
    """Adaptive step control shrank below representable resolution."""


class WrongRegime(ValueError):
    """Operation needs a strictly positive symbol value."""


@dataclass(frozen=True)
class MatsumuraParams:
    """Data of the logarithmic decay lemma for dPhi/dt <= -C0 |Phi|^p / t + C1 / t^q."""

    c0: float
    c1: float
    p: float
    q: float
    t0: float
    phi0: float

    def __post_init__(self):
        if self.c0 <= 0:
            raise ValueError("c0 must be positive")
        if self.c1 < 0:
            raise ValueError("c1 must be nonnegative")
        if self.p <= 1:
            raise ValueError("p must exceed 1")
        if self.q <= 1:
            raise ValueError("q must exceed 1 (tail integral diverges otherwise)")
        if self.t0 < 2:
            raise ValueError("t0 must be at least 2")

    @property
    def p_star(self) -> float:
        return self.p / (self.p - 1.0)


def log_weight_integral(p_star: float, q: float, lower: float = 2.0) -> float:
    """Integral of (log tau)^p* / tau^q over [lower, infinity), q > 1.

    Adaptive quadrature on a finite window in s = log(tau) plus an
    analytic bound on the discarded tail (kept below 1e-9 relative).
    """
    if q <= 1:
        raise ValueError("q must exceed 1")
    a = q - 1.0
    s_lo = math.log(lower)
    # beyond s_hi the integrand is dominated by exp(-a s / 2) and tiny
    s_hi = max(s_lo + 1.0, 2.0 * p_star / a, (60.0 + p_star) / a)
    val, _ = integrate.quad(
        lambda s: s ** p_star * math.exp(-a * s),
        s_lo, s_hi, epsabs=0.0, epsrel=1e-12, limit=400,
    )
    tail_bound = (2.0 / a) * s_hi ** p_star * math.exp(-a * s_hi)
    return val + tail_bound


def matsumura_constant(params: MatsumuraParams) -> float:
    """Explicit constant C2 of the logarithmic decay bound."""
    ps = params.p_star
    tail = 0.0
    if params.c1 > 0:
        tail = params.c1 * log_weight_integral(ps, params.q)
    return (
        (math.log(params.t0) ** ps * params.phi0 + tail) / LOG2
        + (ps / (params.c0 * params.p)) ** (ps - 1.0)
    )


def _integrate_adaptive(
    rhs: Callable[[float, float], float],
    s0: float,
    s1: float,
    y0: float,
    out_s: np.ndarray,
    atol: float = STEP_ATOL,
    guard: Optional[Callable[[float, float], None]] = None,
):
    """Classical RK4 with step doubling from s0 to s1, sampling at out_s.

    out_s must be increasing and contained in [s0, s1]; returns the y
    values at those points.  The error estimate is the 15th of the
    difference between one full step and two half steps.
    """

    def rk4(s, y, h):
        k1 = rhs(s, y)
        k2 = rhs(s + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(s + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(s + h, y + h * k3)
        return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    out = np.empty_like(out_s)
    idx = 0
    s, y = s0, y0
    if out_s.size and out_s[0] <= s0:
        out[0] = y0
        idx = 1
    h = min(0.1, (s1 - s0) / 4.0) if s1 > s0 else 0.0
    while s < s1 - 1e-14:
        target = out_s[idx] if idx < out_s.size else s1
        h_try = min(h, s1 - s, max(target - s, 1e-14))
        while True:
            y_full = rk4(s, y, h_try)
            y_half = rk4(s + 0.5 * h_try, rk4(s, y, 0.5 * h_try), 0.5 * h_try)
            err = abs(y_half - y_full) / 15.0
            if err <= atol or h_try <= 1e-13:
                break
            h_try *= max(0.25, 0.9 * (atol / err) ** 0.2)
            if h_try < 1e-14:
                raise StepUnderflow(f"step underflow at s={s}")
        # local extrapolation: keep the two-half-steps value
        s += h_try
        y = y_half
        if guard is not None:
            guard(s, y)
        if err > 0:
            h = h_try * min(4.0, 0.9 * (atol / err) ** 0.2)
        else:
            h = h_try * 4.0
        while idx < out_s.size and s >= out_s[idx] - 1e-12:
            out[idx] = y
            idx += 1
    while idx < out_s.size:
        out[idx] = y
        idx += 1
    return out


@dataclass(frozen=True)
class RayConfig:
    """One outgoing characteristic ray r = t + sigma in direction omega."""

    sigma: float
    omega: Direction
    eps: float = 0.1
    mu: float = 0.05
    t_end: float = 1e6
    support_radius: float = 1.0
    t_start: float = field(init=False)

    def __post_init__(self):
        if self.sigma > self.support_radius:
            raise ValueError("sigma must not exceed the data support radius")
        if not 0.0 < self.mu < 0.1:
            raise ValueError("mu must lie in (0, 1/10)")
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        t_start = max(2.0, -2.0 * self.sigma)
        object.__setattr__(self, "t_start", t_start)
        if self.t_end <= t_start:
            raise ValueError("t_end must exceed t_start")
        c0 = max(2.0, 2.0 * (1.0 + self.support_radius))
        s = math.hypot(1.0, self.sigma)
        if not (s / c0 <= t_start <= c0 * s):
            raise ValueError("ray start time violates the <sigma>-comparability bounds")

    @property
    def sigma_weight(self) -> float:
        """Japanese bracket <sigma>."""
        return math.hypot(1.0, self.sigma)


class ZeroForcing:
    """G identically zero."""

    def __call__(self, t: float, v: float) -> float:
        return 0.0


@dataclass(frozen=True)
class EnvelopeForcing:
    """|G(t)| = amplitude * <sigma>^(-mu-1/2) * t^(2 mu - 3/2).

    sign_mode "adversarial" pushes V away from zero (worst case for the
    decay bound); "fixed" keeps the sign positive.
    """

    amplitude: float
    mu: float
    sigma: float = 0.0
    sign_mode: str = "adversarial"

    def __post_init__(self):
        if self.sign_mode not in ("adversarial", "fixed"):
            raise ValueError("sign_mode must be 'adversarial' or 'fixed'")

    def envelope(self, t: float) -> float:
        sw = math.hypot(1.0, self.sigma)
        return self.amplitude * sw ** (-self.mu - 0.5) * t ** (2.0 * self.mu - 1.5)

    def __call__(self, t: float, v: float) -> float:
        env = self.envelope(t)
        if self.sign_mode == "adversarial":
            return env * (1.0 if v >= 0 else -1.0)
        return env


@dataclass(frozen=True)
class TabulatedForcing:
    """G interpolated from samples, linear in log t, zero outside the table."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape:
            raise ValueError("times and values must be equal-length 1D arrays")
        if not np.all(np.diff(t) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __call__(self, t: float, v: float) -> float:
        ts = self.times
        if t <= ts[0] or t >= ts[-1]:
            if t < ts[0] - 1e-9 or t > ts[-1] + 1e-9:
                return 0.0
        return float(np.interp(math.log(t), np.log(ts), self.values))


@dataclass
class ProfileSeries:
    """Sampled ray profile: V(t), forcing samples and Phi = P V^2."""

    times: np.ndarray
    V: np.ndarray
    G: np.ndarray
    Phi: np.ndarray
    sigma: float = 0.0
    P_val: Optional[float] = None

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.V) == len(self.G) == len(self.Phi) == n):
            raise ValueError("series columns must have equal length")
        if n > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("times must be strictly increasing")

    def write_csv(self, fh, bound: Optional[np.ndarray] = None) -> None:
        """Deterministic CSV body: columns t, V, G, Phi [, bound]."""
        cols = ["t", "V", "G", "Phi"]
        data = [self.times, self.V, self.G, self.Phi]
        if bound is not None:
            cols.append("bound")
            data.append(bound)
        fh.write(",".join(cols) + "\n")
        for row in zip(*data):
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def _log_grid(t_start: float, t_end: float) -> np.ndarray:
    decades = math.log10(t_end / t_start)
    n = max(2, int(math.ceil(decades * OUTPUT_POINTS_PER_DECADE)) + 1)
    return np.exp(np.linspace(math.log(t_start), math.log(t_end), n))


def integrate_profile(
    P_val: float,
    ray: RayConfig,
    forcing: Callable[[float, float], float] = ZeroForcing(),
    v0: Optional[float] = None,
) -> ProfileSeries:
    """Integrate dV/dt = -P/(2t) V^3 + G from the ray start time.

    Fourth-order accurate in log t with step-doubling error control;
    output on a logarithmically spaced grid.  The initial amplitude
    defaults to eps * <sigma>^(mu - 1), the a priori size of the profile.
    """
    if P_val < 0:
        raise ValueError("P_val must be nonnegative")
    if v0 is None:
        v0 = ray.eps * ray.sigma_weight ** (ray.mu - 1.0)

    out_t = _log_grid(ray.t_start, ray.t_end)
    out_s = np.log(out_t)

    def rhs(s, v):
        t = math.exp(s)
        return -0.5 * P_val * v ** 3 + t * forcing(t, v)

    def guard(s, v):
        if abs(v) > BLOWUP_GUARD:
            raise ProfileBlowUp(math.exp(s), v)

    vs = _integrate_adaptive(
        rhs, math.log(ray.t_start), math.log(ray.t_end), v0, out_s, guard=guard
    )
    gs = np.array([forcing(t, v) for t, v in zip(out_t, vs)])
    return ProfileSeries(
        times=out_t, V=vs, G=gs, Phi=P_val * vs ** 2,
        sigma=ray.sigma, P_val=P_val,
    )


def check_sqrtlog_decay(series: ProfileSeries, P_val: float) -> float:
    """sup over the series of |V(t)| sqrt(P log t)."""
    if P_val <= 0:
        raise WrongRegime("sqrt-log decay fit requires P > 0")
    mask = series.times > 1.0
    return float(
        np.max(np.abs(series.V[mask]) * np.sqrt(P_val * np.log(series.times[mask])))
    )


@dataclass(frozen=True)
class MatsumuraCheck:
    holds: bool
    max_ratio: float
    c2: float
    times: np.ndarray
    phi: np.ndarray


def check_matsumura_bound(
    params: MatsumuraParams,
    forcing_bound_active: bool = True,
    t_end: float = 1e6,
    slack: float = 1e-7,
) -> MatsumuraCheck:
    """Integrate the ODE saturating the lemma hypothesis and test the bound.

    dPhi/dt = -(C0/t)|Phi|^p + C1/t^q (C1 dropped when the forcing bound
    is inactive); the lemma's claim is Phi(t) <= C2 / (log t)^(p*-1) for
    all t >= t0.
    """
    if t_end <= params.t0:
        raise ValueError("t_end must exceed t0")
    c1 = params.c1 if forcing_bound_active else 0.0
    eff = MatsumuraParams(
        c0=params.c0, c1=c1, p=params.p, q=params.q,
        t0=params.t0, phi0=params.phi0,
    )
    c2 = matsumura_constant(eff)
    out_t = _log_grid(params.t0, t_end)
    out_s = np.log(out_t)

    def rhs(s, phi):
        t = math.exp(s)
        return -eff.c0 * abs(phi) ** eff.p + c1 * t ** (1.0 - eff.q)

    phis = _integrate_adaptive(
        rhs, math.log(params.t0), math.log(t_end), params.phi0, out_s
    )
    ratios = phis * np.log(out_t) ** (eff.p_star - 1.0) / c2
    max_ratio = float(ratios.max())
    holds = bool(np.all(phis <= c2 / np.log(out_t) ** (eff.p_star - 1.0) + slack))
    return MatsumuraCheck(
        holds=holds, max_ratio=max_ratio, c2=c2, times=out_t, phi=phis
    )
