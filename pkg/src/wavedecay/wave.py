"""Finite-difference laboratory for Box u = F(du) on R^2.

Explicit leapfrog with the 5-point Laplacian on a square grid, Dirichlet
outer boundary that the light cone never reaches, compactly supported
smooth data.  The time derivative entering F is resolved by two fixed
point iterations of the implicit centered difference.  Alongside the
solver: discrete energy, finite-propagation diagnostics, and extraction
of the outgoing ray profile V(t) = U(t, (t+sigma) omega) with
U = (d_r - d_t)(sqrt(r) u)/2, which feeds the profile ODE module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .profile_ode import ProfileSeries
from .trig import Direction, NonlinearityCoefficients

BLOWUP_GUARD = 1e10
PROPAGATION_SLACK_CELLS = 4


class BlowUpError(RuntimeError):
    def __init__(self, t: float, maxu: float):
        super().__init__(f"max|u| = {maxu:.3e} at t = {t:.3f} exceeded the guard")
        self.t = t
        self.maxu = maxu


class InstabilityError(RuntimeError):
    pass


class RayOutsideDomain(ValueError):
    pass


@dataclass(frozen=True)
class InitialData:
    """Compactly supported data u(0) = eps*f, u_t(0) = eps*g.

    kinds:
      smooth_bump  f = bump, g = -d1(bump)   (radiates in all directions)
      deriv_bump   f = 0,    g = -d1(bump)
      custom       tabulated grids (eps still multiplies them)
    """

    kind: str = "smooth_bump"
    R: float = 1.0
    eps: float = 0.1
    center: tuple[float, float] = (0.0, 0.0)
    f_grid: Optional[np.ndarray] = None
    g_grid: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.kind not in ("smooth_bump", "deriv_bump", "custom"):
            raise ValueError(f"unknown data kind {self.kind!r}")
        if self.R <= 0:
            raise ValueError("support radius must be positive")


@dataclass(frozen=True)
class SolverConfig:
    h: float
    L: float
    T: float
    nonlinearity: NonlinearityCoefficients = field(
        default_factory=NonlinearityCoefficients
    )
    cfl: float = 0.5
    checkpoint_interval: float = 2.0

    def __post_init__(self):
        if self.cfl > 0.5 or self.cfl <= 0:
            raise ValueError("cfl must lie in (0, 0.5] (2D stability margin)")
        if self.h <= 0 or self.L <= 0 or self.T <= 0:
            raise ValueError("h, L, T must be positive")

    @property
    def n(self) -> int:
        """Points per side (cell count rounded to fit [-L, L] exactly)."""
        return int(round(2.0 * self.L / self.h)) + 1

    @property
    def h_eff(self) -> float:
        return 2.0 * self.L / (self.n - 1)

    @property
    def dt(self) -> float:
        return self.cfl * self.h_eff

    def axis(self) -> np.ndarray:
        return np.linspace(-self.L, self.L, self.n)

    def validate_domain(self, R: float) -> None:
        if self.L < self.T + R + 4 * self.h_eff:
            raise ValueError(
                "domain too small: need L >= T + R + 4h to keep the light "
                "cone away from the boundary"
            )


@dataclass
class WaveField:
    """Snapshot at time t: u and the centered time derivative u_t."""

    t: float
    u: np.ndarray
    u_t: np.ndarray
    h: float
    L: float

    def __post_init__(self):
        m = float(np.abs(self.u).max()) if self.u.size else 0.0
        if m > BLOWUP_GUARD:
            raise BlowUpError(self.t, m)


@dataclass
class EnergySeries:
    times: np.ndarray
    E: np.ndarray      # energy norm ||u(t)||_E = sqrt(0.5 * int |du|^2)

    def write_csv(self, fh, bound: Optional[np.ndarray] = None) -> None:
        cols = ["t", "E"] + (["E_bound"] if bound is not None else [])
        fh.write(",".join(cols) + "\n")
        data = [self.times, self.E] + ([bound] if bound is not None else [])
        for row in zip(*data):
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")


def _bump_profile(rho2: np.ndarray) -> np.ndarray:
    """exp(-1/(1-rho^2)) inside the unit disk, 0 outside (rho2 = |x/R|^2)."""
    out = np.zeros_like(rho2)
    inside = rho2 < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - rho2[inside]))
    return out


def make_initial_data(data: InitialData, cfg: SolverConfig) -> WaveField:
    xs = cfg.axis()
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    if data.kind == "custom":
        f = np.zeros_like(X) if data.f_grid is None else np.asarray(data.f_grid, float)
        g = np.zeros_like(X) if data.g_grid is None else np.asarray(data.g_grid, float)
        if f.shape != X.shape or g.shape != X.shape:
            raise ValueError("custom data grids must match the solver grid")
    else:
        cx, cy = data.center
        rho2 = ((X - cx) ** 2 + (Y - cy) ** 2) / data.R ** 2
        bump = _bump_profile(rho2)
        inside = rho2 < 1.0
        dbump = np.zeros_like(bump)
        # analytic d1 of the bump: bump * (-2 x1 / R^2) / (1 - rho^2)^2
        dbump[inside] = bump[inside] * (
            -2.0 * (X[inside] - cx) / data.R ** 2
        ) / (1.0 - rho2[inside]) ** 2
        if data.kind == "smooth_bump":
            f, g = bump, -dbump
        else:  # deriv_bump: g-only data
            f, g = np.zeros_like(bump), -dbump
    return WaveField(
        t=0.0, u=data.eps * f, u_t=data.eps * g, h=cfg.h_eff, L=cfg.L
    )


def _laplacian(u: np.ndarray, h: float) -> np.ndarray:
    out = np.zeros_like(u)
    out[1:-1, 1:-1] = (
        u[2:, 1:-1] + u[:-2, 1:-1] + u[1:-1, 2:] + u[1:-1, :-2]
        - 4.0 * u[1:-1, 1:-1]
    ) / h ** 2
    return out


def _gradients(u: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    ux = np.zeros_like(u)
    uy = np.zeros_like(u)
    ux[1:-1, :] = (u[2:, :] - u[:-2, :]) / (2.0 * h)
    uy[:, 1:-1] = (u[:, 2:] - u[:, :-2]) / (2.0 * h)
    return ux, uy


def apply_nonlinearity(
    coeffs: NonlinearityCoefficients,
    ut: np.ndarray, ux: np.ndarray, uy: np.ndarray,
) -> np.ndarray:
    """F(du) = sum B_jk d_j d_k + sum C_jkl d_j d_k d_l on grids."""
    d = (ut, ux, uy)
    out = np.zeros_like(ut)
    B, C = coeffs.B, coeffs.C
    for j in range(3):
        for k in range(3):
            if B[j, k] != 0.0:
                out += B[j, k] * d[j] * d[k]
            for l in range(3):
                if C[j, k, l] != 0.0:
                    out += C[j, k, l] * d[j] * d[k] * d[l]
    return out


class LeapfrogSolver:
    """Two-level leapfrog state with the fixed-point nonlinear update."""

    def __init__(self, cfg: SolverConfig, data: InitialData):
        cfg.validate_domain(data.R if data.kind != "custom" else 0.0)
        self.cfg = cfg
        self.h = cfg.h_eff
        self.dt = cfg.dt
        self.linear = (
            not np.any(cfg.nonlinearity.B) and not np.any(cfg.nonlinearity.C)
        )
        field0 = make_initial_data(data, cfg)
        u0, ut0 = field0.u, field0.u_t
        # second-order accurate first step
        rhs0 = _laplacian(u0, self.h) + self._force(ut0, *_gradients(u0, self.h))
        u1 = u0 + self.dt * ut0 + 0.5 * self.dt ** 2 * rhs0
        self._zero_boundary(u1)
        self.u_prev = u0
        self.u_cur = u1
        self.step_index = 1          # u_cur lives at t = step_index * dt
        self.initial_field = field0

    def _force(self, ut, ux, uy):
        if self.linear:
            return 0.0
        return apply_nonlinearity(self.cfg.nonlinearity, ut, ux, uy)

    @staticmethod
    def _zero_boundary(u: np.ndarray) -> None:
        u[0, :] = u[-1, :] = 0.0
        u[:, 0] = u[:, -1] = 0.0

    def _next(self, u_prev: np.ndarray, u_cur: np.ndarray) -> np.ndarray:
        """One leapfrog update; u_t in F solved by two fixed-point sweeps."""
        h, dt = self.h, self.dt
        lap = _laplacian(u_cur, h)
        if self.linear:
            unew = 2.0 * u_cur - u_prev + dt ** 2 * lap
            self._zero_boundary(unew)
            return unew
        ux, uy = _gradients(u_cur, h)
        ut = (u_cur - u_prev) / dt
        unew = u_cur
        for _ in range(2):
            unew = 2.0 * u_cur - u_prev + dt ** 2 * (lap + self._force(ut, ux, uy))
            ut = (unew - u_prev) / (2.0 * dt)
        self._zero_boundary(unew)
        return unew

    def advance(self) -> None:
        unew = self._next(self.u_prev, self.u_cur)
        m = float(np.abs(unew).max())
        if m > BLOWUP_GUARD:
            raise BlowUpError((self.step_index + 1) * self.dt, m)
        self.u_prev = self.u_cur
        self.u_cur = unew
        self.step_index += 1

    @property
    def t(self) -> float:
        return self.step_index * self.dt

    def lookahead(self) -> np.ndarray:
        """The next level, computed without committing (for centered u_t)."""
        return self._next(self.u_prev, self.u_cur)

    def snapshot(self, u_next: Optional[np.ndarray] = None) -> WaveField:
        if u_next is None:
            u_next = self.lookahead()
        u_t = (u_next - self.u_prev) / (2.0 * self.dt)
        return WaveField(
            t=self.t, u=self.u_cur.copy(), u_t=u_t,
            h=self.h, L=self.cfg.L,
        )


def step(state: WaveField, cfg: SolverConfig) -> WaveField:
    """Advance a snapshot by one time step.

    Reconstructs the previous level from (u, u_t) to second order, runs
    one leapfrog update, and centers the new time derivative with a
    lookahead level.
    """
    h = state.h
    dt = cfg.cfl * h
    linear = not np.any(cfg.nonlinearity.B) and not np.any(cfg.nonlinearity.C)

    def force(ut, ux, uy):
        if linear:
            return 0.0
        return apply_nonlinearity(cfg.nonlinearity, ut, ux, uy)

    ux, uy = _gradients(state.u, h)
    rhs = _laplacian(state.u, h) + force(state.u_t, ux, uy)
    u_prev = state.u - dt * state.u_t + 0.5 * dt ** 2 * rhs

    def advance(up, uc):
        lap = _laplacian(uc, h)
        if linear:
            unew = 2.0 * uc - up + dt ** 2 * lap
        else:
            gx, gy = _gradients(uc, h)
            ut = (uc - up) / dt
            unew = uc
            for _ in range(2):
                unew = 2.0 * uc - up + dt ** 2 * (lap + force(ut, gx, gy))
                ut = (unew - up) / (2.0 * dt)
        unew[0, :] = unew[-1, :] = 0.0
        unew[:, 0] = unew[:, -1] = 0.0
        return unew

    u_new = advance(u_prev, state.u)
    m = float(np.abs(u_new).max())
    if m > BLOWUP_GUARD:
        raise BlowUpError(state.t + dt, m)
    u_next = advance(state.u, u_new)
    u_t_new = (u_next - state.u) / (2.0 * dt)
    new = WaveField(t=state.t + dt, u=u_new, u_t=u_t_new, h=h, L=state.L)
    if linear:
        e0, e1 = energy(state), energy(new)
        if e0 > 0 and e1 > 1.1 * e0:
            raise InstabilityError(
                f"linear energy grew by {e1 / e0 - 1.0:.1%} in one step"
            )
    return new


def energy(state: WaveField) -> float:
    """Discrete 0.5 * int |du|^2 dx (squared energy norm)."""
    ux, uy = _gradients(state.u, state.h)
    return 0.5 * state.h ** 2 * float(
        np.sum(state.u_t ** 2 + ux ** 2 + uy ** 2)
    )


def check_propagation(state: WaveField, R: float) -> float:
    """max |u| outside the slack cone |x| > t + R + 4h."""
    n = state.u.shape[0]
    xs = np.linspace(-state.L, state.L, n)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    outside = np.hypot(X, Y) > state.t + R + PROPAGATION_SLACK_CELLS * state.h
    if not outside.any():
        return 0.0
    return float(np.abs(state.u[outside]).max())


def _bilinear(u: np.ndarray, x: float, y: float, h: float, L: float) -> float:
    fx = (x + L) / h
    fy = (y + L) / h
    i, j = int(math.floor(fx)), int(math.floor(fy))
    n = u.shape[0]
    if i < 0 or j < 0 or i + 1 >= n or j + 1 >= n:
        raise RayOutsideDomain(f"point ({x}, {y}) outside the grid")
    ax, ay = fx - i, fy - j
    return float(
        u[i, j] * (1 - ax) * (1 - ay)
        + u[i + 1, j] * ax * (1 - ay)
        + u[i, j + 1] * (1 - ax) * ay
        + u[i + 1, j + 1] * ax * ay
    )


def _ray_w(u: np.ndarray, r: float, omega: Direction, h: float, L: float) -> float:
    """sqrt(r) * u at the point r*omega."""
    x, y = r * omega.omega1, r * omega.omega2
    return math.sqrt(r) * _bilinear(u, x, y, h, L)


@dataclass(frozen=True)
class RayTap:
    sigma: float
    omega: Direction
    stride: int = 2        # sample every this many steps


@dataclass
class RunResult:
    checkpoints: list
    energy: EnergySeries
    diagnostics: dict
    profiles: dict
    snapshots: list


def run(
    cfg: SolverConfig,
    data: InitialData,
    rays: Sequence[RayTap] = (),
    snapshot_stride: int = 0,
    snapshot_window: Optional[tuple[float, float]] = None,
) -> RunResult:
    """Advance to T, tracking energy, propagation, and ray profiles.

    Checkpoints (full snapshots with centered u_t) are emitted at the
    configured cadence; `snapshot_stride` > 0 additionally stores dense
    snapshots every that many steps inside `snapshot_window` (for offline
    ray extraction).  Ray taps stream V(t) during the run: spatial and
    temporal differences use only the three live leapfrog levels.
    """
    solver = LeapfrogSolver(cfg, data)
    dt = solver.dt
    R = data.R if data.kind != "custom" else 0.0
    nsteps = int(round(cfg.T / dt))
    ckpt_every = max(1, int(round(cfg.checkpoint_interval / dt)))

    checkpoints = [solver.initial_field]
    en_t = [0.0]
    en_E = [math.sqrt(energy(solver.initial_field))]
    prop = [(0.0, check_propagation(solver.initial_field, R))]
    snapshots: list[WaveField] = []
    ray_rows: dict[int, list[tuple[float, float]]] = {i: [] for i in range(len(rays))}

    for n in range(1, nsteps + 1):
        u_prevprev = solver.u_prev
        solver.advance()
        # levels now: u_prevprev at t-dt, solver.u_prev at t, solver.u_cur
        # at t+dt, so everything centered at t is available
        t_mid = solver.t - dt
        u_m, u_p = u_prevprev, solver.u_cur
        u_c = solver.u_prev
        step_mid = solver.step_index - 1
        for i, tap in enumerate(rays):
            if step_mid % tap.stride:
                continue
            r = t_mid + tap.sigma
            if t_mid < max(2.0, -2.0 * tap.sigma) or r < max(t_mid / 2.0, 1.0):
                continue
            try:
                wr_p = _ray_w(u_c, r + solver.h, tap.omega, solver.h, cfg.L)
                wr_m = _ray_w(u_c, r - solver.h, tap.omega, solver.h, cfg.L)
                wt_p = _ray_w(u_p, r, tap.omega, solver.h, cfg.L)
                wt_m = _ray_w(u_m, r, tap.omega, solver.h, cfg.L)
            except RayOutsideDomain:
                continue
            w_r = (wr_p - wr_m) / (2.0 * solver.h)
            w_t = (wt_p - wt_m) / (2.0 * dt)
            ray_rows[i].append((t_mid, 0.5 * (w_r - w_t)))
        if step_mid % ckpt_every == 0 or n == nsteps:
            snap = WaveField(
                t=t_mid, u=u_c.copy(), u_t=(u_p - u_m) / (2.0 * dt),
                h=solver.h, L=cfg.L,
            )
            checkpoints.append(snap)
            en_t.append(snap.t)
            en_E.append(math.sqrt(energy(snap)))
            prop.append((snap.t, check_propagation(snap, R)))
            if solver.linear and en_E[-2] > 0:
                if en_E[-1] ** 2 > 1.1 * en_E[-2] ** 2:
                    raise InstabilityError(
                        f"linear energy growing without bound near t = {snap.t:.2f}"
                    )
        if snapshot_stride and step_mid % snapshot_stride == 0:
            if snapshot_window is None or (
                snapshot_window[0] <= t_mid <= snapshot_window[1]
            ):
                snapshots.append(
                    WaveField(
                        t=t_mid, u=u_c.copy(), u_t=(u_p - u_m) / (2.0 * dt),
                        h=solver.h, L=cfg.L,
                    )
                )

    profiles = {}
    for i, tap in enumerate(rays):
        rows = ray_rows[i]
        if not rows:
            continue
        ts = np.array([r[0] for r in rows])
        vs = np.array([r[1] for r in rows])
        profiles[i] = ProfileSeries(
            times=ts, V=vs, G=np.zeros_like(vs), Phi=np.zeros_like(vs),
            sigma=tap.sigma,
        )
    diagnostics = {
        "propagation": prop,
        "max_propagation_leak": max(p for _, p in prop),
        "dt": dt,
        "h": solver.h,
        "steps": nsteps,
    }
    return RunResult(
        checkpoints=checkpoints,
        energy=EnergySeries(times=np.array(en_t), E=np.array(en_E)),
        diagnostics=diagnostics,
        profiles=profiles,
        snapshots=snapshots,
    )


def extract_ray(
    states: Sequence[WaveField], sigma: float, omega: Direction
) -> ProfileSeries:
    """Ray profile V(t; sigma, omega) from uniformly spaced snapshots.

    Spatial derivative by centered differencing of bilinear samples of
    sqrt(r) u along the ray; time derivative by centered differencing
    across neighboring snapshots.
    """
    if len(states) < 3:
        raise ValueError("need at least three snapshots for centered differences")
    dts = np.diff([s.t for s in states])
    if not np.allclose(dts, dts[0], rtol=1e-8):
        raise ValueError("snapshots must be uniformly spaced in time")
    delta = float(dts[0])
    ts, vs = [], []
    for k in range(1, len(states) - 1):
        s = states[k]
        t = s.t
        r = t + sigma
        if t < max(2.0, -2.0 * sigma) or r < max(t / 2.0, 1.0):
            continue
        try:
            wr_p = _ray_w(s.u, r + s.h, omega, s.h, s.L)
            wr_m = _ray_w(s.u, r - s.h, omega, s.h, s.L)
            wt_p = _ray_w(states[k + 1].u, r, omega, s.h, s.L)
            wt_m = _ray_w(states[k - 1].u, r, omega, s.h, s.L)
        except RayOutsideDomain:
            continue
        w_r = (wr_p - wr_m) / (2.0 * s.h)
        w_t = (wt_p - wt_m) / (2.0 * delta)
        ts.append(t)
        vs.append(0.5 * (w_r - w_t))
    if not ts:
        raise RayOutsideDomain("no snapshot time admits the requested ray point")
    ts = np.array(ts)
    vs = np.array(vs)
    return ProfileSeries(
        times=ts, V=vs, G=np.zeros_like(vs), Phi=np.zeros_like(vs), sigma=sigma
    )


@dataclass(frozen=True)
class ResidualReport:
    times: np.ndarray
    H: np.ndarray
    envelope_constant: float    # smallest C with |H| <= C eps t^(2mu-3/2) <sigma>^(-mu-1/2)


def residual_forcing(
    series: ProfileSeries, P_val: float, eps: float, mu: float
) -> ResidualReport:
    """Residual H(t) = dV/dt + P V^3 / (2t) and its envelope fit."""
    t = series.times
    v = series.V
    dv = np.gradient(v, t)
    H = dv + 0.5 * P_val * v ** 3 / t
    # interior points only: np.gradient is one-sided at the ends
    tt, HH = t[1:-1], H[1:-1]
    sw = math.hypot(1.0, series.sigma)
    env = eps * tt ** (2.0 * mu - 1.5) * sw ** (-mu - 0.5)
    c = float(np.max(np.abs(HH) / env))
    return ResidualReport(times=tt, H=HH, envelope_constant=c)
