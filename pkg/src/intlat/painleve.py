"""Painleve III transcendent for the two-point Ising scaling functions.

The transcendent eta(x) solves

    eta'' = eta'^2/eta - eta'/x + (alpha*eta^2 + beta)/x + gamma*eta^3 + delta/eta

with alpha = beta = 0, gamma = -delta = 1, and approaches 1 like
1 - (2/pi) K0(2x) as x -> infinity.  It is obtained by shooting backwards
from a large x_max where the Bessel asymptote supplies Cauchy data.  The
integration variable is the deviation u = 1 - eta: near x_max eta is 1 to
eleven digits, and carrying eta itself would leave rounding noise in the
K0 mode, which grows by e^{2 x_max} on the way down.  The scaling
functions are

    G_pm(2r) = (1 -+ eta) eta^{-1/2} exp( int_r^inf (x/4) eta^{-2} [(1 - eta^2)^2 - eta'^2] dx ).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import kernels
from .errors import DomainError, IntegrationError, PartialTrajectoryError, RangeError
from .special_functions import (
    DenseOutput,
    ToleranceSpec,
    bessel_k01,
    integrate_ode,
    integrate_quadrature,
)

__all__ = [
    "PainleveIIIParams",
    "ISING",
    "EtaSample",
    "EtaTrajectory",
    "ScalingFunctionValue",
    "DEFAULT_TOL",
    "asymptote",
    "rhs",
    "deviation_rhs",
    "residual",
    "scaling_integrand",
    "solve_eta",
    "eta_fixed_step",
    "scaling_function",
    "scaling_table",
    "uniform_grid",
]

DEFAULT_X_MAX = 12.0
DEFAULT_X_MIN = 0.5
DEFAULT_GRID_STEP = 0.05
# abs_tol far below the deviation at x_max so that control is relative
DEFAULT_TOL = ToleranceSpec(abs_tol=1e-30, rel_tol=1e-12, max_steps=200_000)
QUAD_TOL = ToleranceSpec(abs_tol=1e-15, rel_tol=1e-14, max_steps=5000)
# step of the finite-difference eta'' used for residuals
FD_STEP = 2e-3


@dataclass(frozen=True)
class PainleveIIIParams:
    alpha: float
    beta: float
    gamma: float
    delta: float

    @classmethod
    def ising(cls) -> "PainleveIIIParams":
        return cls(alpha=0.0, beta=0.0, gamma=1.0, delta=-1.0)


ISING = PainleveIIIParams.ising()


def rhs(params: PainleveIIIParams, x: float, eta: float, eta_prime: float) -> float:
    """eta'' as given by the Painleve III equation."""
    if eta == 0.0 or x == 0.0:
        raise DomainError("Painleve III right-hand side needs eta != 0 and x != 0")
    p = params
    return (
        eta_prime * eta_prime / eta
        - eta_prime / x
        + (p.alpha * eta * eta + p.beta) / x
        + p.gamma * eta**3
        + p.delta / eta
    )


def deviation_rhs(params: PainleveIIIParams, x: float, u: float, u_prime: float) -> float:
    """u'' for u = 1 - eta, written without cancellation near u = 0."""
    eta = 1.0 - u
    if eta == 0.0 or x == 0.0:
        raise DomainError("Painleve III right-hand side needs eta != 0 and x != 0")
    p = params
    quad = (p.alpha + p.beta) - p.alpha * u * (2.0 - u)
    quartic = (p.gamma + p.delta) - p.gamma * u * (4.0 - u * (6.0 - u * (4.0 - u)))
    return -(u_prime * u_prime / eta + u_prime / x + quad / x + quartic / eta)


def residual(params: PainleveIIIParams, x: float, eta: float, eta_prime: float, eta_second: float) -> float:
    """``eta'' - rhs``; zero on an exact solution."""
    return eta_second - rhs(params, x, eta, eta_prime)


def asymptote(x: float) -> tuple[float, float]:
    """Large-x deviation ``(1 - eta, -eta')`` = ``((2/pi) K0(2x), -(4/pi) K1(2x))``."""
    k0, k1 = bessel_k01(2.0 * x)
    return 2.0 / math.pi * k0, -4.0 / math.pi * k1


def scaling_integrand(x: float, eta: float, eta_prime: float) -> float:
    """``(x/4) eta^-2 [(1 - eta^2)^2 - eta'^2]``."""
    return _integrand_dev(x, 1.0 - eta, -eta_prime)


def _integrand_dev(x: float, u: float, u_prime: float) -> float:
    eta = 1.0 - u
    one_minus_sq = u * (2.0 - u)
    return 0.25 * x * (one_minus_sq * one_minus_sq - u_prime * u_prime) / (eta * eta)


def _tail_integrand(x: float) -> float:
    # O(eps^2) part of the integrand with eta = 1 - eps, eps = (2/pi) K0(2x)
    if x > 300.0:
        return 0.0  # below 1e-500
    k0, k1 = bessel_k01(2.0 * x)
    return 4.0 / math.pi**2 * x * (k0 * k0 - k1 * k1)


@dataclass(frozen=True)
class EtaSample:
    x: float
    eta: float
    eta_prime: float
    residual: float
    deviation: float


@dataclass(frozen=True)
class EtaTrajectory:
    """Sampled transcendent on ``[x_min, x_max]`` plus its continuous extension.

    ``error_estimate`` is the largest change of eta on the sample grid when
    the tolerance is tightened tenfold (doubled for safety).
    """

    samples: tuple[EtaSample, ...]
    x_min: float
    x_max: float
    params: PainleveIIIParams
    tol: ToleranceSpec
    residual_tol: float
    error_estimate: float
    _dense: DenseOutput = field(repr=False, compare=False)
    _dense_ref: DenseOutput | None = field(default=None, repr=False, compare=False)

    @property
    def x(self) -> np.ndarray:
        return np.array([s.x for s in self.samples])

    @property
    def eta(self) -> np.ndarray:
        return np.array([s.eta for s in self.samples])

    @property
    def eta_prime(self) -> np.ndarray:
        return np.array([s.eta_prime for s in self.samples])

    @property
    def residuals(self) -> np.ndarray:
        return np.array([s.residual for s in self.samples])

    @property
    def max_residual(self) -> float:
        return float(np.max(np.abs(self.residuals))) if self.samples else 0.0

    @property
    def deviation(self) -> np.ndarray:
        """``1 - eta`` at the samples, at full relative precision."""
        return np.array([s.deviation for s in self.samples])

    def __call__(self, x: float) -> tuple[float, float]:
        """``(eta(x), eta'(x))`` from the continuous extension."""
        u, du = self.deviation_at(x)
        return 1.0 - u, -du

    def deviation_at(self, x: float) -> tuple[float, float]:
        """``(1 - eta(x), -eta'(x))`` from the continuous extension."""
        if not (self.x_min <= x <= self.x_max):
            raise RangeError(f"x = {x!r} outside trajectory window [{self.x_min!r}, {self.x_max!r}]")
        y = self._dense(x)
        return float(y[0]), float(y[1])

    def eta_second_fd(self, x: float, h: float = FD_STEP) -> float:
        """eta'' by a fourth-order finite difference of the interpolated eta'.

        Independent of the ODE right-hand side; near the window edges the
        five-point stencil is shifted inward.
        """
        lo, hi = self._dense.span
        offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        shift = 0.0
        if x + offsets[0] * h < lo:
            shift = (lo - x) / h - offsets[0]
        elif x + offsets[-1] * h > hi:
            shift = (hi - x) / h - offsets[-1]
        offsets = offsets + shift
        weights = _fd_weights(offsets)
        vals = np.array([self._dense(min(max(x + o * h, lo), hi))[1] for o in offsets])
        return -float(weights @ vals) / h


def _fd_weights(offsets: np.ndarray) -> np.ndarray:
    """First-derivative weights on arbitrary offsets (unit spacing)."""
    n = len(offsets)
    vander = np.vander(offsets, n, increasing=True).T
    rhs_vec = np.zeros(n)
    rhs_vec[1] = 1.0
    return np.linalg.solve(vander, rhs_vec)


def uniform_grid(x_min: float, x_max: float, step: float) -> np.ndarray:
    """Grid ``x_min, x_min + step, ...`` ending exactly at ``x_max``."""
    if step <= 0:
        raise DomainError("grid step must be positive")
    n = int(math.floor((x_max - x_min) / step + 1e-9))
    pts = x_min + step * np.arange(n + 1)
    if x_max - pts[-1] > 1e-9 * step:
        pts = np.append(pts, x_max)
    else:
        pts[-1] = x_max
    return pts


def _solve(params, x_max, x_min, tol, grid):
    u0, du0 = asymptote(x_max)

    def f(x, y):
        u, du = y
        if not u < 1.0:
            return (math.nan, math.nan)
        return (du, deviation_rhs(params, x, u, du))

    return integrate_ode(f, x_max, x_min, [u0, du0], tol, samples=grid)


def solve_eta(
    params: PainleveIIIParams = ISING,
    x_max: float = DEFAULT_X_MAX,
    x_min: float = DEFAULT_X_MIN,
    tol: ToleranceSpec | None = None,
    grid: Sequence[float] | None = None,
    residual_tol: float = 1e-8,
) -> EtaTrajectory:
    """Integrate the transcendent backwards from ``x_max`` to ``x_min``.

    Initial data come from the Bessel asymptote at ``x_max``.  Samples are
    taken on ``grid`` (default: spacing 0.05), each with its residual
    computed from a finite-difference eta''.  If eta stops being positive
    before ``x_min`` a :class:`PartialTrajectoryError` is raised; its
    ``trajectory`` covers the window actually reached.
    """
    tol = tol or DEFAULT_TOL
    x_max = float(x_max)
    x_min = float(x_min)
    if not (0.0 < x_min < x_max):
        raise DomainError(f"need 0 < x_min < x_max, got x_min={x_min!r}, x_max={x_max!r}")
    if grid is None:
        grid = uniform_grid(x_min, x_max, DEFAULT_GRID_STEP)
    grid = np.asarray(grid, dtype=float)
    if grid.size and (grid.min() < x_min or grid.max() > x_max):
        raise RangeError("sample grid must lie inside [x_min, x_max]")
    grid = np.unique(grid)

    try:
        sol = _solve(params, x_max, x_min, tol, grid)
    except IntegrationError as exc:
        partial = None
        dense = getattr(exc, "dense", None)
        if dense is not None:
            lo = dense.span[0]
            kept = grid[grid >= lo]
            if kept.size:
                partial = _build(params, lo, x_max, tol, residual_tol, kept, dense, None, math.nan)
        raise PartialTrajectoryError(
            "eta left the positive window or blew up before x_min", exc.last_x, partial
        ) from exc

    ref = _solve(params, x_max, x_min, tol.tightened(10.0), grid)
    diff = float(np.max(np.abs(sol.y[:, 0] - ref.y[:, 0]))) if grid.size else 0.0
    error_estimate = max(2.0 * diff, 4.0 * np.finfo(float).eps)
    return _build(params, x_min, x_max, tol, residual_tol, grid, sol.dense, ref.dense, error_estimate)


def _build(params, x_min, x_max, tol, residual_tol, grid, dense, dense_ref, error_estimate):
    traj = EtaTrajectory((), x_min, x_max, params, tol, residual_tol, error_estimate, dense, dense_ref)
    samples = []
    for x in grid:
        u, du = (float(v) for v in dense(x))
        eta, deta = 1.0 - u, -du
        res = residual(params, x, eta, deta, traj.eta_second_fd(x))
        samples.append(EtaSample(float(x), eta, deta, float(res), u))
    object.__setattr__(traj, "samples", tuple(samples))
    return traj


def eta_fixed_step(
    x: float,
    params: PainleveIIIParams = ISING,
    x_max: float = DEFAULT_X_MAX,
    h: float = 1e-5,
) -> tuple[float, float]:
    """``(eta(x), eta'(x))`` by classical RK4 with a fixed step (brute force).

    Runs in the compiled kernel when available.
    """
    n = int(round((x_max - x) / h))
    if n < 1 or abs(n * h - (x_max - x)) > 1e-9:
        raise DomainError("x_max - x must be a positive multiple of h")
    u0, du0 = asymptote(x_max)
    _, u, du = kernels.rk4_painleve(
        params.alpha, params.beta, params.gamma, params.delta, float(x_max), u0, du0, -float(h), n
    )
    return 1.0 - u, -du


@dataclass(frozen=True)
class ScalingFunctionValue:
    r: float
    g_plus: float
    g_minus: float
    est_error: float


def _g_values(u: float, log_factor: float) -> tuple[float, float]:
    scale = math.exp(log_factor) / math.sqrt(1.0 - u)
    return u * scale, (2.0 - u) * scale


def _check_r(traj: EtaTrajectory, r: float) -> None:
    if not (traj.x_min <= r <= traj.x_max):
        raise RangeError(f"r = {r!r} outside trajectory window [{traj.x_min!r}, {traj.x_max!r}]")


def scaling_function(traj: EtaTrajectory, r: float, tol: ToleranceSpec | None = None) -> ScalingFunctionValue:
    """``G_+(2r)`` and ``G_-(2r)`` from a solved trajectory.

    The integral over ``[x_max, inf)`` uses the Bessel asymptote (its
    integrand is second order in the asymptotic amplitude).  ``est_error``
    adds the quadrature error estimates to the change in G obtained from the
    tenfold-tighter reference solution.
    """
    return scaling_table(traj, [r], tol)[0]


def scaling_table(
    traj: EtaTrajectory, r_grid: Sequence[float], tol: ToleranceSpec | None = None
) -> list[ScalingFunctionValue]:
    """Batch version of :func:`scaling_function` on an ascending grid.

    The integral is accumulated downward from ``x_max`` so each segment
    between neighbouring grid points is integrated once.
    """
    quad_tol = tol or QUAD_TOL
    r_grid = [float(r) for r in r_grid]
    if not r_grid:
        return []
    if any(b <= a for a, b in zip(r_grid, r_grid[1:])):
        raise ValueError("r_grid must be strictly increasing")
    for r in (r_grid[0], r_grid[-1]):
        _check_r(traj, r)

    tail, tail_err = integrate_quadrature(_tail_integrand, traj.x_max, math.inf, quad_tol, return_error=True)
    denses = [traj._dense] + ([traj._dense_ref] if traj._dense_ref is not None else [])
    results = [[None] * len(r_grid) for _ in denses]
    errs = [0.0] * len(r_grid)
    for k, dense in enumerate(denses):
        acc, acc_err = tail, tail_err
        upper = traj.x_max
        for i in range(len(r_grid) - 1, -1, -1):
            r = r_grid[i]
            if r < upper:
                seg, seg_err = integrate_quadrature(
                    lambda x, d=dense: _integrand_dev(x, *d(x)), r, upper, quad_tol, return_error=True
                )
                acc += seg
                acc_err += seg_err
            upper = r
            results[k][i] = _g_values(float(dense(r)[0]), acc)
            if k == 0:
                errs[i] = acc_err

    out = []
    for i, r in enumerate(r_grid):
        gp, gm = results[0][i]
        est = errs[i] * max(abs(gp), abs(gm))
        if len(denses) > 1:
            gp_ref, gm_ref = results[1][i]
            est += max(abs(gp - gp_ref), abs(gm - gm_ref))
        out.append(ScalingFunctionValue(r, gp, gm, est))
    return out
