"""Reduced (center-subspace) dynamics for the four partition classes.

Coordinates are real amplitudes on the critical modes:

    Real1D          u0                      (I1)
    Planar*         (u1, u2)                (I2)  u = u1 cos(k rho x) + u2 sin(k rho x)
    RealComplex3D   (z0, u1, u2)            (I3)
    DoubleHopf4D    (u1, u2, u3, u4)        (I4)  z1 = (u1 - i u2)/2, z2 = (u3 - i u4)/2

Two planar fields are offered.  ``planar_cubic`` is the printed cubic
truncation; its manifold coefficients A, B, C are evaluated either at
lambda0 (``manifold_at="critical"``, the normal form dz/dt = beta z + P z|z|^2)
or at the running lam (``manifold_at="current"``).  ``planar_full_projection``
projects b w^2 - w^3, w = u + Phi(u), by quadrature without truncating.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    BracketInvalid,
    NoCycleFound,
    NonFiniteState,
    NonzeroB,
    StepSizeUnderflow,
    WrongClass,
    WrongSide,
)
from .manifold import I2Manifold
from .spectrum import PartitionClass, SystemParams, analyze, growth_rate
from .transition import DoubleHopfNumbers, double_hopf_numbers


class SystemKind(enum.Enum):
    REAL_1D = "real1d"
    PLANAR_CUBIC = "planar-cubic"
    PLANAR_FULL_PROJECTION = "planar-full"
    REAL_COMPLEX_3D = "real-complex-3d"
    DOUBLE_HOPF_4D = "double-hopf-4d"


_EXPECTED_CLASS = {
    SystemKind.REAL_1D: PartitionClass.I1,
    SystemKind.PLANAR_CUBIC: PartitionClass.I2,
    SystemKind.PLANAR_FULL_PROJECTION: PartitionClass.I2,
    SystemKind.REAL_COMPLEX_3D: PartitionClass.I3,
    SystemKind.DOUBLE_HOPF_4D: PartitionClass.I4,
}


# --- vector fields ----------------------------------------------------------


def vf_real1d(u, lam, b):
    return (lam - 1.0) * u + b * u * u - u**3


def _planar_cubic_terms(u1, u2, b, A, B, C):
    du1 = 2 * b * u1 * C + b * u1 * A + b * u2 * B - 0.75 * u1**3 - 0.75 * u1 * u2**2
    du2 = b * u1 * B - b * u2 * A + 2 * b * u2 * C - 0.75 * u2**3 - 0.75 * u1**2 * u2
    return du1, du2


def _linear_planar(u1, u2, beta):
    # dz/dt = beta z with z = (u1 - i u2)/2
    return beta.real * u1 + beta.imag * u2, beta.real * u2 - beta.imag * u1


def vf_planar_cubic(state, lam, sigma, b, ell, manifold_at="critical"):
    """Cubic reduced field on an I2 length; works elementwise on arrays."""
    return make_system(
        SystemKind.PLANAR_CUBIC, SystemParams(ell, sigma, b, lam), manifold_at=manifold_at
    ).rhs(np.asarray(state, dtype=float))


def vf_planar_full_projection(state, lam, params: SystemParams, manifold_at="current"):
    p = params.with_lambda(lam)
    return make_system(SystemKind.PLANAR_FULL_PROJECTION, p, manifold_at=manifold_at).rhs(
        np.asarray(state, dtype=float)
    )


def vf_real_complex_3d(state, lam, sigma=0.0, ell=2 * math.pi / math.sqrt(2), b=0.0,
                       projected=False):
    return make_system(
        SystemKind.REAL_COMPLEX_3D, SystemParams(ell, sigma, b, lam), projected=projected
    ).rhs(np.asarray(state, dtype=float))


def vf_double_hopf_4d(z1, z2, numbers: DoubleHopfNumbers, beta1: complex, beta2: complex):
    a1, a2 = abs(z1) ** 2, abs(z2) ** 2
    dz1 = beta1 * z1 + z1 * (numbers.A * a1 + numbers.B * a2)
    dz2 = beta2 * z2 + z2 * (numbers.C * a1 + numbers.D * a2)
    return dz1, dz2


def double_hopf_amplitudes(rho, reb1: float, reb2: float, numbers: DoubleHopfNumbers):
    """Right-hand side for (|z1|^2, |z2|^2) implied by the 4D field."""
    r1, r2 = rho
    A, B, C, D = (complex(v).real for v in (numbers.A, numbers.B, numbers.C, numbers.D))
    return np.array([2 * r1 * (reb1 + A * r1 + B * r2), 2 * r2 * (reb2 + C * r1 + D * r2)])


# --- systems ----------------------------------------------------------------


@dataclass(frozen=True)
class ReducedSystem:
    kind: SystemKind
    params: SystemParams
    rhs: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    labels: tuple[str, ...] = ()
    options: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def __call__(self, t, y):
        return self.rhs(np.asarray(y, dtype=float))


def _planar_cubic(p: SystemParams, manifold_at="critical"):
    a = analyze(p.ell)
    lam_m = {"critical": a.lambda0, "current": p.lam}[manifold_at]
    man = I2Manifold(p.ell, p.sigma, p.b, lam_m)
    beta = growth_rate(a.k, p)
    mu_sq, mu_0, b = man.mu_sq, man.mu_0, p.b

    def rhs(y):
        u1, u2 = y[0], y[1]
        x, xy = u1 * u1 - u2 * u2, 2.0 * u1 * u2
        A = 0.5 * (mu_sq.real * x + mu_sq.imag * xy)
        B = 0.5 * (mu_sq.real * xy - mu_sq.imag * x)
        C = 0.5 * mu_0 * (u1 * u1 + u2 * u2)
        l1, l2 = _linear_planar(u1, u2, beta)
        n1, n2 = _planar_cubic_terms(u1, u2, b, A, B, C)
        return np.array([l1 + n1, l2 + n2])

    return rhs, {"manifold_at": manifold_at, "k": a.k}


def _planar_full(p: SystemParams, manifold_at="current", quad_points=None):
    a = analyze(p.ell)
    k = a.k
    lam_m = {"critical": a.lambda0, "current": p.lam}[manifold_at]
    man = I2Manifold(p.ell, p.sigma, p.b, lam_m)
    beta = growth_rate(k, p)
    # integrand is a trig polynomial of degree 7k; the rule is exact above that
    m = quad_points or 16 * k + 16
    theta = 2 * math.pi * np.arange(m) / m
    e1, e2 = np.cos(k * theta), np.sin(k * theta)
    c2, s2 = np.cos(2 * k * theta), np.sin(2 * k * theta)
    b = p.b

    def rhs(y):
        u1, u2 = float(y[0]), float(y[1])
        A, B, C = man.coefficients(u1, u2)
        w = u1 * e1 + u2 * e2 + A * c2 + B * s2 + C
        g = b * w * w - w**3
        l1, l2 = _linear_planar(u1, u2, beta)
        return np.array([l1 + 2.0 * np.mean(g * e1), l2 + 2.0 * np.mean(g * e2)])

    return rhs, {"manifold_at": manifold_at, "k": k, "quad_points": m}


def _real_complex_3d(p: SystemParams, projected=False):
    if p.b != 0.0:
        raise NonzeroB("the real-complex reduced system is only used for b = 0")
    beta0 = growth_rate(0, p).real
    beta1 = growth_rate(1, p)
    # printed coefficients (1, 1, 0) vs those of the projection of -u^3 (3, 3, 6)
    c_z1, c_cube, c_z0 = (3.0, 3.0, 6.0) if projected else (1.0, 1.0, 0.0)

    def rhs(y):
        z0, u1, u2 = y[0], y[1], y[2]
        z1 = 0.5 * (u1 - 1j * u2)
        m1 = abs(z1) ** 2
        dz0 = beta0 * z0 - z0**3 - c_z0 * z0 * m1
        dz1 = beta1 * z1 - c_z1 * z0 * z0 * z1 - c_cube * z1 * m1
        return np.array([dz0, 2 * dz1.real, -2 * dz1.imag])

    return rhs, {"projected": projected}


def _double_hopf(p: SystemParams, numbers: Optional[DoubleHopfNumbers] = None):
    a = analyze(p.ell)
    nums = numbers or double_hopf_numbers(p.ell, p.sigma, p.b)
    b1, b2 = growth_rate(a.k, p), growth_rate(a.k + 1, p)

    def rhs(y):
        z1 = 0.5 * (y[0] - 1j * y[1])
        z2 = 0.5 * (y[2] - 1j * y[3])
        d1, d2 = vf_double_hopf_4d(z1, z2, nums, b1, b2)
        return np.array([2 * d1.real, -2 * d1.imag, 2 * d2.real, -2 * d2.imag])

    return rhs, {"k": a.k, "numbers": nums}


def _real1d(p: SystemParams):
    def rhs(y):
        return np.array([vf_real1d(y[0], p.lam, p.b)])

    return rhs, {}


_BUILDERS = {
    SystemKind.REAL_1D: (_real1d, ("u0",)),
    SystemKind.PLANAR_CUBIC: (_planar_cubic, ("u1", "u2")),
    SystemKind.PLANAR_FULL_PROJECTION: (_planar_full, ("u1", "u2")),
    SystemKind.REAL_COMPLEX_3D: (_real_complex_3d, ("z0", "u1", "u2")),
    SystemKind.DOUBLE_HOPF_4D: (_double_hopf, ("u1", "u2", "u3", "u4")),
}


def make_system(kind, params: SystemParams, check_class: bool = True, **opts) -> ReducedSystem:
    kind = SystemKind(kind)
    if check_class:
        cls = analyze(params.ell).partition_class
        if cls is not _EXPECTED_CLASS[kind]:
            raise WrongClass(
                f"{kind.value} needs class {_EXPECTED_CLASS[kind].name}, "
                f"ell={params.ell!r} is {cls.name}"
            )
    builder, labels = _BUILDERS[kind]
    rhs, info = builder(params, **opts)
    return ReducedSystem(kind, params, rhs, labels, info)


# --- integration ------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    direction: str = "forward"
    labels: tuple[str, ...] = ()

    def write_csv(self, path) -> None:
        labels = self.labels or tuple(f"u{i + 1}" for i in range(self.states.shape[1]))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("t",) + tuple(labels))
            for t, y in zip(self.times, self.states):
                w.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in y])


def _rk4(f, t_end_signed, y0, h):
    n = max(1, int(math.ceil(abs(t_end_signed) / h - 1e-12)))
    h = t_end_signed / n
    ts = np.linspace(0.0, t_end_signed, n + 1)
    ys = np.empty((n + 1, len(y0)))
    ys[0] = y = np.asarray(y0, dtype=float)
    for i in range(n):
        t = ts[i]
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        ys[i + 1] = y
        if not np.all(np.isfinite(y)):
            return ts[: i + 2], ys[: i + 2], False
    return ts, ys, True


def integrate(
    system,
    state0,
    t_end: float,
    dt_max: float = 0.01,
    direction: str = "forward",
    tol: float = 1e-9,
    fixed_step: bool = False,
    escape_radius: float = 1e8,
) -> Trajectory:
    """Integrate a reduced system over [0, t_end] forward or backward in time.

    Adaptive mode uses an embedded 8(5,3) Runge-Kutta pair with rtol = atol =
    ``tol`` and steps capped at ``dt_max``; every accepted step is recorded.
    Backward trajectories carry times running from 0 down to -t_end.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be 'forward' or 'backward', got {direction!r}")
    if not (t_end > 0 and tol > 0 and dt_max > 0):
        raise ValueError("t_end, tol and dt_max must be positive")
    y0 = np.atleast_1d(np.asarray(state0, dtype=float))
    if not np.all(np.isfinite(y0)):
        raise ValueError("initial state must be finite")
    sign = 1.0 if direction == "forward" else -1.0
    labels = getattr(system, "labels", ())

    if fixed_step:
        ts, ys, ok = _rk4(system, sign * t_end, y0, dt_max)
        traj = Trajectory(ts, ys, direction, labels)
        if not ok or np.max(np.abs(ys[-1])) > escape_radius:
            raise NonFiniteState("trajectory escaped", partial=traj)
        return traj

    def escaped(t, y):
        return escape_radius - np.max(np.abs(y))

    escaped.terminal = True

    sol = solve_ivp(
        system,
        (0.0, sign * t_end),
        y0,
        method="DOP853",
        rtol=tol,
        atol=tol,
        max_step=dt_max,
        events=escaped,
    )
    traj = Trajectory(sol.t, sol.y.T, direction, labels)
    if sol.status == -1:
        if not np.all(np.isfinite(sol.y)):
            raise NonFiniteState(sol.message, partial=traj)
        raise StepSizeUnderflow(sol.message, partial=traj)
    if sol.status == 1 or not np.all(np.isfinite(sol.y[:, -1])):
        raise NonFiniteState(f"|state| exceeded {escape_radius:g}", partial=traj)
    return traj


# --- limit cycles -----------------------------------------------------------


@dataclass(frozen=True)
class LimitCycle:
    radius: float
    period: float
    stability: str
    mean_norm: float
    returns: int = 0

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "period": self.period,
            "stability": self.stability,
            "mean_norm": self.mean_norm,
            "returns": self.returns,
        }


@dataclass
class _Return:
    radius: float
    time: float
    mean_norm: float


def _first_return(system, r0: float, sign: float, tol: float, t_max: float,
                  escape_radius: float) -> _Return:
    """Follow the orbit through (r0, 0) to its next crossing of {u2 = 0, u1 > 0}."""
    y0 = np.array([r0, 0.0])
    v = system(0.0, y0)[1]
    if v == 0.0:
        raise NoCycleFound("no rotation at the section point")
    rot = 1.0 if v > 0 else -1.0

    def crossing(t, y):
        return y[1]

    crossing.terminal = True
    crossing.direction = rot * sign  # oriented along the integration order

    def escaped(t, y):
        return escape_radius - abs(y[0]) - abs(y[1])

    escaped.terminal = True

    # leave the section before arming the event
    nudge = solve_ivp(system, (0.0, sign * 1e-3), y0, method="DOP853", rtol=tol, atol=tol * 1e-3)
    t0, y1 = nudge.t[-1], nudge.y[:, -1]
    sol = solve_ivp(
        system,
        (t0, sign * t_max),
        y1,
        method="DOP853",
        rtol=tol,
        atol=tol * 1e-3,
        events=(crossing, escaped),
        dense_output=True,
    )
    if sol.t_events[1].size:
        raise NonFiniteState("orbit escaped before returning")
    if sol.status == -1:
        raise StepSizeUnderflow(sol.message)
    hits = [(t, y) for t, y in zip(sol.t_events[0], sol.y_events[0]) if y[0] > 0]
    if not hits:
        raise NoCycleFound(f"no return to the section within |t| <= {t_max:g}")
    t_ret, y_ret = hits[0]
    ys = sol.sol(np.linspace(t0, t_ret, 128))
    norms = np.hypot(ys[0], ys[1])
    return _Return(float(y_ret[0]), float(abs(t_ret)), float(np.mean(norms)))


def return_map(system, r0: float, direction: str = "forward", tol: float = 1e-12,
               t_max: float = 1e3, escape_radius: float = 1e6) -> float:
    """Radius of the next section crossing starting from (r0, 0)."""
    sign = 1.0 if direction == "forward" else -1.0
    return _first_return(system, r0, sign, tol, t_max, escape_radius).radius


def find_limit_cycle(
    system,
    state0,
    direction: str = "forward",
    t_end: float = 1e4,
    rtol: float = 1e-6,
    confirm: int = 3,
    tol: float = 1e-11,
    min_radius: float = 1e-8,
    escape_radius: float = 1e6,
) -> LimitCycle:
    """Locate a cycle of a planar field from successive crossings of {u2 = 0, u1 > 0}.

    The cycle is accepted once ``confirm`` consecutive returns change the
    crossing radius by less than ``rtol`` (relative).  A cycle found forward
    in time is stable; one found backward in time is unstable.
    """
    if getattr(system, "dim", 2) != 2:
        raise ValueError("find_limit_cycle needs a planar system")
    sign = 1.0 if direction == "forward" else -1.0
    y0 = np.asarray(state0, dtype=float)

    r = float(np.hypot(*y0))
    if y0[1] != 0.0 or y0[0] <= 0.0:
        # bring the initial point onto the section first
        probe = integrate(system, y0, t_end=min(t_end, 50.0), dt_max=0.05,
                          direction=direction, tol=tol)
        u1, u2 = probe.states[:, 0], probe.states[:, 1]
        idx = np.where((np.sign(u2[:-1]) != np.sign(u2[1:])) & (u1[1:] > 0))[0]
        if not idx.size:
            raise NoCycleFound("initial orbit never reaches the section")
        r = float(u1[idx[0] + 1])

    elapsed, radii, last = 0.0, [r], None
    while elapsed < t_end:
        try:
            last = _first_return(system, radii[-1], sign, tol, t_max=min(1e3, t_end),
                                 escape_radius=escape_radius)
        except (NonFiniteState, StepSizeUnderflow) as exc:
            raise NoCycleFound(f"orbit escapes {direction} in time") from exc
        elapsed += last.time
        radii.append(last.radius)
        if last.radius < min_radius:
            raise NoCycleFound(f"orbit decays to the origin {direction} in time")
        if len(radii) > confirm:
            tail = np.array(radii[-(confirm + 1):])
            if np.all(np.abs(np.diff(tail)) < rtol * tail[1:]):
                return LimitCycle(
                    radius=last.radius,
                    period=last.time,
                    stability="stable" if sign > 0 else "unstable",
                    mean_norm=last.mean_norm,
                    returns=len(radii) - 1,
                )
    raise NoCycleFound(f"no convergence within t_end={t_end:g} (last radius {radii[-1]:.6g})")


def radius_by_binary_search(
    system,
    bracket: tuple[float, float] = (1e-3, 5.0),
    xtol: float = 1e-8,
    direction: str = "forward",
    tol: float = 1e-12,
    max_iter: int = 100,
) -> float:
    """Bisect on the initial radius: inside a stable cycle orbits grow over
    one return, outside they shrink (and the reverse for an unstable cycle)."""
    lo, hi = bracket
    if not 0 < lo < hi:
        raise BracketInvalid(f"bracket must satisfy 0 < lo < hi, got {bracket!r}")

    def excess(r):
        try:
            return return_map(system, r, direction, tol) - r
        except NonFiniteState:
            return math.inf

    f_lo, f_hi = excess(lo), excess(hi)
    if np.sign(f_lo) == np.sign(f_hi):
        raise BracketInvalid(
            f"return excess has the same sign at both ends ({f_lo:.3g}, {f_hi:.3g})"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = excess(mid)
        if f_mid == 0:
            return mid
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)


def hopf_prediction(beta: complex, P: complex) -> tuple[float, float]:
    """Amplitude 2 (-Re beta / Re P)^(1/2) and frequency of the bifurcated orbit."""
    beta, P = complex(beta), complex(P)
    if P.real == 0:
        raise ZeroDivisionError("Re P = 0")
    ratio = -beta.real / P.real
    if ratio < 0:
        raise WrongSide(
            f"-Re beta / Re P = {ratio:.3g} < 0: no orbit on this side of lambda0"
        )
    amplitude = 2.0 * math.sqrt(ratio)
    omega = beta.imag - P.imag * (beta.real / P.real)
    return amplitude, omega
