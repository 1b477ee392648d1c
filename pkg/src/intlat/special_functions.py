"""Numerical kernels: modified Bessel functions K0/K1, an embedded
Runge-Kutta integrator with dense output, and adaptive Gauss-Kronrod
quadrature.

Everything here is pure and dependency-light (numpy only) so that the
physics modules can be checked against independent libraries in the tests.
"""

from __future__ import annotations

import bisect
import heapq
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, IntegrationError, QuadratureError

__all__ = [
    "ToleranceSpec",
    "BesselUnderflowWarning",
    "bessel_k0",
    "bessel_k1",
    "bessel_k01",
    "OdeSolution",
    "DenseOutput",
    "integrate_ode",
    "integrate_quadrature",
]

EULER_GAMMA = 0.57721566490153286061
# Below the crossover the power series is used, above it Steed's continued
# fraction (Temme's CF2).  Both are accurate to a few ulp at x = 2.
BESSEL_CROSSOVER = 2.0
# exp(-x) leaves the normal float range just above this.
BESSEL_UNDERFLOW_X = 705.0


@dataclass(frozen=True)
class ToleranceSpec:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_steps: int = 100_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and math.isfinite(self.abs_tol)):
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise ValueError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if int(self.max_steps) != self.max_steps or self.max_steps < 1:
            raise ValueError(f"max_steps must be a positive integer, got {self.max_steps!r}")

    def tightened(self, factor: float = 10.0) -> "ToleranceSpec":
        return ToleranceSpec(self.abs_tol / factor, self.rel_tol / factor, self.max_steps)


# ---------------------------------------------------------------------------
# Modified Bessel functions of the second kind, orders 0 and 1
# ---------------------------------------------------------------------------


class BesselUnderflowWarning(RuntimeWarning):
    """K0/K1 argument so large that the result underflows to (near) zero."""


def _k01_series(x: float) -> tuple[float, float]:
    t = 0.25 * x * x
    log_half = math.log(0.5 * x)

    # K0 = -(ln(x/2) + gamma) I0 + sum_k H_k t^k / (k!)^2
    term = 1.0  # t^k / (k!)^2
    harmonic = 0.0
    i0 = 1.0
    s0 = 0.0
    # K1 = 1/x + ln(x/2) I1 - (x/4) sum_k [psi(k+1) + psi(k+2)] t^k / (k!(k+1)!)
    term1 = 1.0  # t^k / (k!(k+1)!)
    i1_sum = 1.0
    s1 = (-EULER_GAMMA) + (1.0 - EULER_GAMMA)
    k = 0
    while True:
        k += 1
        term *= t / (k * k)
        term1 *= t / (k * (k + 1))
        harmonic += 1.0 / k
        i0 += term
        s0 += harmonic * term
        i1_sum += term1
        ds1 = (2.0 * harmonic + 1.0 / (k + 1) - 2.0 * EULER_GAMMA) * term1
        s1 += ds1
        if term < 1e-17 * i0 and abs(ds1) < 1e-17 * abs(s1) and k > 2:
            break
    k0 = -(log_half + EULER_GAMMA) * i0 + s0
    i1 = 0.5 * x * i1_sum
    k1 = 1.0 / x + log_half * i1 - 0.25 * x * s1
    return k0, k1


def _k01_scaled_cf(x: float) -> tuple[float, float]:
    """exp(x)*K0(x), exp(x)*K1(x) by Steed's method on Temme's CF2 (order 0)."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 100_000):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels) < 1e-17 * abs(s):
            break
    h *= a1
    k0 = math.sqrt(math.pi / (2.0 * x)) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def bessel_k01(x: float) -> tuple[float, float]:
    """Return ``(K0(x), K1(x))`` for ``x > 0``."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"modified Bessel K requires x > 0, got {x!r}")
    if math.isinf(x):
        warnings.warn("K0/K1 at x = inf underflow to zero", BesselUnderflowWarning, stacklevel=2)
        return 0.0, 0.0
    if x <= BESSEL_CROSSOVER:
        return _k01_series(x)
    k0s, k1s = _k01_scaled_cf(x)
    if x > BESSEL_UNDERFLOW_X:
        warnings.warn(
            f"K0/K1 at x = {x!r} underflow below the normal float range",
            BesselUnderflowWarning,
            stacklevel=2,
        )
    e = math.exp(-x)
    return k0s * e, k1s * e


def bessel_k0(x: float) -> float:
    """Modified Bessel function of the second kind of order zero."""
    return bessel_k01(x)[0]


def bessel_k1(x: float) -> float:
    """Modified Bessel function of the second kind of order one, ``K1 = -K0'``."""
    return bessel_k01(x)[1]


# ---------------------------------------------------------------------------
# Dormand-Prince 5(4) with PI step control and 4th-order dense output
# ---------------------------------------------------------------------------

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
# difference between the 5th-order solution and the embedded 4th-order one
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# continuous extension (Hairer, Norsett & Wanner, DOPRI5 dense output)
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)
_A_MAT = np.zeros((7, 7))
for _i, _row in enumerate(_A):
    _A_MAT[_i, : len(_row)] = _row
_E_VEC = np.array(_E)
_D_VEC = np.array(_D)


class DenseOutput:
    """Piecewise quartic interpolant over the accepted steps.

    Steps may run backwards; lookups work for any x inside the covered span.
    """

    def __init__(self, direction: float):
        self._direction = direction
        self._keys: list[float] = []  # step starts, in increasing direction*x
        self._steps: list[tuple[float, float, np.ndarray]] = []

    def _append(self, x0: float, h: float, coeffs: np.ndarray) -> None:
        self._keys.append(self._direction * x0)
        self._steps.append((x0, h, coeffs))

    @property
    def span(self) -> tuple[float, float]:
        x0 = self._steps[0][0]
        last = self._steps[-1]
        x1 = last[0] + last[1]
        return (min(x0, x1), max(x0, x1))

    @property
    def breakpoints(self) -> list[float]:
        pts = [s[0] for s in self._steps]
        last = self._steps[-1]
        pts.append(last[0] + last[1])
        return sorted(pts)

    def __call__(self, x: float) -> np.ndarray:
        lo, hi = self.span
        if not (lo <= x <= hi):
            raise DomainError(f"x = {x!r} outside dense-output span [{lo!r}, {hi!r}]")
        i = bisect.bisect_right(self._keys, self._direction * x) - 1
        i = min(max(i, 0), len(self._steps) - 1)
        x0, h, (r1, r2, r3, r4, r5) = self._steps[i]
        th = (x - x0) / h
        th1 = 1.0 - th
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)))


@dataclass(frozen=True)
class OdeSolution:
    x: np.ndarray
    y: np.ndarray  # shape (len(x), dim)
    dense: DenseOutput
    n_steps: int
    n_rejected: int
    n_evals: int


def _initial_step(rhs, x0, y0, f0, direction, tol: ToleranceSpec, span):
    scale = tol.abs_tol + tol.rel_tol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, span)
    y1 = y0 + direction * h0 * f0
    f1 = np.asarray(rhs(x0 + direction * h0, y1), dtype=float)
    if not np.all(np.isfinite(f1)):
        return h0 * 1e-3
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, span)


def _failure(message, x, y, dense):
    err = IntegrationError(message, float(x), y.copy())
    err.dense = dense if dense._steps else None
    return err


def integrate_ode(
    rhs: Callable[[float, np.ndarray], Sequence[float]],
    x_start: float,
    x_end: float,
    state0: Sequence[float],
    tol: ToleranceSpec | None = None,
    samples: Sequence[float] | None = None,
    h0: float | None = None,
    h_max: float | None = None,
) -> OdeSolution:
    """Integrate ``y' = rhs(x, y)`` from ``x_start`` to ``x_end``.

    Dormand-Prince 5(4), local extrapolation, PI step-size control on the
    RMS-scaled error.  ``samples`` (default: the two endpoints) are filled
    from the continuous extension, which is 4th order.  Integration may run
    backwards (``x_end < x_start``).

    Raises :class:`IntegrationError` on step-size underflow, non-finite
    states that cannot be cured by step reduction, or ``tol.max_steps``
    exceeded.
    """
    tol = tol or ToleranceSpec()
    x_start = float(x_start)
    x_end = float(x_end)
    if x_start == x_end:
        raise DomainError("x_start and x_end must differ")
    direction = 1.0 if x_end > x_start else -1.0
    span = abs(x_end - x_start)
    h_max = span if h_max is None else min(abs(h_max), span)

    if samples is None:
        samples = [x_start, x_end]
    samples = np.asarray(samples, dtype=float)
    if samples.size and (
        np.min(direction * samples) < direction * x_start - 1e-12 * span
        or np.max(direction * samples) > direction * x_end + 1e-12 * span
    ):
        raise DomainError("sample points must lie within [x_start, x_end]")
    order = np.argsort(direction * samples, kind="stable")

    y = np.array(state0, dtype=float)
    f = np.asarray(rhs(x_start, y), dtype=float)
    n_evals = 1
    if not np.all(np.isfinite(f)) or not np.all(np.isfinite(y)):
        raise IntegrationError("non-finite initial state or derivative", x_start, y)

    h = abs(h0) if h0 else _initial_step(rhs, x_start, y, f, direction, tol, span)
    h = float(min(h, h_max))
    n_evals += 1

    beta = 0.04
    alpha = 0.2 - 0.75 * beta
    safety, fac_min, fac_max = 0.9, 0.2, 10.0
    err_old = 1e-4
    h_min_rel = 16.0 * np.finfo(float).eps

    dense = DenseOutput(direction)
    out_y = np.empty((samples.size, y.size))
    next_sample = 0
    # samples coinciding with the start
    while next_sample < samples.size and direction * samples[order[next_sample]] <= direction * x_start:
        out_y[order[next_sample]] = y
        next_sample += 1

    x = x_start
    n_steps = n_rejected = 0
    rejected_last = False
    k = np.empty((7, y.size))
    k[0] = f
    isfinite = math.isfinite
    while direction * (x_end - x) > 0:
        if n_steps + n_rejected >= tol.max_steps:
            raise _failure(f"max_steps = {tol.max_steps} exceeded", x, y, dense)
        if h < h_min_rel * max(abs(x), 1.0):
            raise _failure("step size underflow", x, y, dense)
        if direction * (x + direction * h - x_end) > 0:
            h = abs(x_end - x)
        hs = direction * h

        finite = True
        for s in range(1, 7):
            ys = y + hs * (_A_MAT[s, :s] @ k[:s])
            with np.errstate(all="ignore"):
                try:
                    k[s] = rhs(x + _C[s] * hs, ys)
                except (ArithmeticError, ValueError):
                    k[s] = np.nan
            n_evals += 1
            if not isfinite(k[s].sum()):
                finite = False
                break
        if not finite:
            h *= fac_min
            n_rejected += 1
            rejected_last = True
            continue

        y_new = ys  # stage 7 argument is the 5th-order solution (FSAL)
        err_vec = hs * (_E_VEC @ k)
        scale = tol.abs_tol + tol.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        ratio = err_vec / scale
        err = math.sqrt(float(ratio @ ratio) / ratio.size)

        if err <= 1.0:
            err = max(err, 1e-10)
            fac = safety * err ** (-alpha) * err_old ** beta
            fac = min(fac_max, max(fac_min, fac))
            if rejected_last:
                fac = min(fac, 1.0)
            err_old = err

            ydiff = y_new - y
            bspl = hs * k[0] - ydiff
            coeffs = np.array(
                [
                    y,
                    ydiff,
                    bspl,
                    ydiff - hs * k[6] - bspl,
                    hs * (_D_VEC @ k),
                ]
            )
            dense._append(x, hs, coeffs)
            x_next = x + hs
            if direction * (x_end - x_next) <= 0:
                x_next = x_end
            while next_sample < samples.size and direction * samples[order[next_sample]] <= direction * x_next:
                xs = samples[order[next_sample]]
                out_y[order[next_sample]] = y_new if xs == x_next else dense(xs)
                next_sample += 1

            x = x_next
            y = y_new
            k[0] = k[6]
            n_steps += 1
            rejected_last = False
            h = min(h * fac, h_max)
        else:
            fac = max(fac_min, safety * err ** (-alpha))
            h *= fac
            n_rejected += 1
            rejected_last = True

    while next_sample < samples.size:
        out_y[order[next_sample]] = y
        next_sample += 1
    return OdeSolution(samples, out_y, dense, n_steps, n_rejected, n_evals)


# ---------------------------------------------------------------------------
# Adaptive Gauss-Kronrod (7, 15) quadrature
# ---------------------------------------------------------------------------

_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_G_WEIGHTS = np.zeros(15)
_G_WEIGHTS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:3], _WG[3:], _WG[:3][::-1]])


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    c = 0.5 * (a + b)
    hl = 0.5 * (b - a)
    fx = np.array([f(c + hl * t) for t in _GK_NODES], dtype=float)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError(f"non-finite integrand on [{a!r}, {b!r}]", math.nan, math.inf)
    kron = hl * float(_GK_WEIGHTS @ fx)
    gauss = hl * float(_G_WEIGHTS @ fx)
    return kron, abs(kron - gauss)


def integrate_quadrature(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: ToleranceSpec | None = None,
    return_error: bool = False,
):
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[a, b]``.

    ``b`` may be ``math.inf``: the range is then mapped onto ``[0, 1)`` by
    ``x = a + t/(1 - t)``.  Because no Kronrod node sits at ``t = 1`` the
    whole tail is covered, and the error estimate of the last subinterval
    bounds its contribution; the integrand must decay at least exponentially.

    Subintervals are bisected greedily (largest error first) until the
    summed error estimate is below ``max(abs_tol, rel_tol*|I|)``;
    ``tol.max_steps`` caps the number of subintervals.
    """
    tol = tol or ToleranceSpec(abs_tol=1e-12, rel_tol=1e-12, max_steps=2000)
    a = float(a)
    b = float(b)
    if math.isinf(a):
        raise DomainError("lower limit must be finite")
    if a == b:
        return (0.0, 0.0) if return_error else 0.0
    if b < a:
        res = integrate_quadrature(f, b, a, tol, return_error=True)
        return (-res[0], res[1]) if return_error else -res[0]

    if math.isinf(b):
        def g(t: float) -> float:
            u = 1.0 - t
            x = a + t / u
            if math.isinf(x):
                return 0.0
            return f(x) / (u * u)

        lo, hi = 0.0, 1.0
    else:
        g, lo, hi = f, a, b

    value, err = _gk15(g, lo, hi)
    heap = [(-err, lo, hi, value, err)]
    n_intervals = 1
    while err > max(tol.abs_tol, tol.rel_tol * abs(value)):
        if n_intervals >= tol.max_steps:
            raise QuadratureError("subinterval limit reached", value, err)
        _, l, h, v, e = heapq.heappop(heap)
        m = 0.5 * (l + h)
        if not (l < m < h):
            raise QuadratureError("interval bisection underflow", value, err)
        v1, e1 = _gk15(g, l, m)
        v2, e2 = _gk15(g, m, h)
        heapq.heappush(heap, (-e1, l, m, v1, e1))
        heapq.heappush(heap, (-e2, m, h, v2, e2))
        n_intervals += 1
        # resum to avoid drift from repeated subtraction
        value = math.fsum(item[3] for item in heap)
        err = math.fsum(item[4] for item in heap)
    return (value, err) if return_error else value
