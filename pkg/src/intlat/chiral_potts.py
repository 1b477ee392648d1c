"""Integrable chiral Potts model: curve points, Boltzmann weights, row
transfer matrices and their commuting family.

Points p = (a, b, c, d) live on the curve

    a^N + k b^N = k' d^N,    k a^N + b^N = k' c^N,    k^2 + k'^2 = 1,

and a pair (p, q) of points fixes the weight ratios

    W^h(n)/W^h(0) = prod_{j=1}^n (d_p b_q - a_p c_q w^j) / (b_p d_q - c_p a_q w^j)
    W^v(n)/W^v(0) = prod_{j=1}^n (w a_p d_q - d_p a_q w^j) / (c_p b_q - b_p c_q w^j)

with w = exp(2 pi i / N).  Only the ratios are represented (W(0) = 1).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
import numpy as np

from . import kernels
from .errors import CurveError, DimensionCapError, ReductionSliceError, SingularWeightError

__all__ = [
    "Modulus",
    "CurvePoint",
    "WeightTable",
    "TransferMatrixSpec",
    "IsingReduction",
    "IsingReductionReport",
    "DEFAULT_DIM_CAP",
    "make_curve_point",
    "random_curve_point",
    "curve_residuals",
    "weight_table",
    "periodicity_defect",
    "transfer_matrix",
    "shift_operator",
    "commutator_norm",
    "order_parameter",
    "order_parameter_exponent",
    "ising_reduction_check",
    "curve_genus",
]

DEFAULT_DIM_CAP = 3**8
# relative size below which a weight denominator counts as zero
SINGULAR_RTOL = 1e-13


@dataclass(frozen=True)
class Modulus:
    k: float
    k_prime: float

    def __post_init__(self):
        if not (0.0 < self.k < 1.0):
            raise CurveError(f"modulus k must lie in (0, 1), got {self.k!r}")
        if self.k_prime == 0.0:
            raise CurveError("degenerate modulus: k' = 0")
        if not (0.0 < self.k_prime < 1.0):
            raise CurveError(f"modulus k' must lie in (0, 1), got {self.k_prime!r}")
        if abs(self.k**2 + self.k_prime**2 - 1.0) > 1e-14:
            raise CurveError(f"k^2 + k'^2 = {self.k**2 + self.k_prime**2!r} != 1")

    @classmethod
    def from_k(cls, k: float) -> "Modulus":
        k = float(k)
        if not (0.0 < k < 1.0):
            raise CurveError(f"modulus k must lie in (0, 1), got {k!r}")
        return cls(k, math.sqrt((1.0 - k) * (1.0 + k)))


@dataclass(frozen=True)
class CurvePoint:
    n_states: int
    a: complex
    b: complex
    c: complex
    d: complex
    modulus: Modulus
    # set when c or d vanished: weight denominators may then be singular
    flagged: bool = False

    @property
    def omega(self) -> complex:
        return _omega(self.n_states)

    def perturbed(self, rel: float, component: str = "d") -> "CurvePoint":
        """Copy with one coordinate scaled by ``1 + rel`` (moves it off the curve)."""
        vals = {"a": self.a, "b": self.b, "c": self.c, "d": self.d}
        vals[component] = vals[component] * (1.0 + rel)
        return CurvePoint(self.n_states, modulus=self.modulus, flagged=self.flagged, **vals)


def _omega(n: int) -> complex:
    re, im = math.cos(2 * math.pi / n), math.sin(2 * math.pi / n)
    # exact zeros for N = 2, 4 keep the N = 2 weights exactly real
    return complex(0.0 if abs(re) < 1e-15 else re, 0.0 if abs(im) < 1e-15 else im)


def curve_genus(n_states: int) -> int:
    return n_states**3 - 2 * n_states**2 + 1


def _principal_root(z: complex, n: int) -> complex:
    if z == 0:
        return 0j
    if z.imag == 0.0 and z.real > 0.0:
        return complex(z.real ** (1.0 / n))
    return cmath.exp(cmath.log(z) / n)


def make_curve_point(
    n_states: int,
    modulus: Modulus,
    a: complex,
    b: complex,
    root_branch: tuple[int, int] = (0, 0),
) -> CurvePoint:
    """Complete ``(a, b)`` to a curve point.

    ``root_branch = (branch_c, branch_d)`` selects which N-th roots are
    taken: ``c`` and ``d`` are the principal roots times ``w**branch``.
    """
    n = int(n_states)
    if n < 2:
        raise ValueError(f"N must be >= 2, got {n_states!r}")
    a = complex(a)
    b = complex(b)
    if a == 0 and b == 0:
        raise CurveError("a and b cannot both vanish")
    bc, bd = (int(v) for v in root_branch)
    if not (0 <= bc < n and 0 <= bd < n):
        raise ValueError(f"root branches must lie in [0, {n}), got {root_branch!r}")
    k, kp = modulus.k, modulus.k_prime
    an, bn = a**n, b**n
    w = _omega(n)
    dn, cn = an + k * bn, k * an + bn
    d = _principal_root(dn / kp, n) * w**bd
    c = _principal_root(cn / kp, n) * w**bc
    # c^N or d^N cancelled to roundoff: the root is numerically zero
    flagged = abs(dn) <= 1e-13 * (abs(an) + k * abs(bn)) or abs(cn) <= 1e-13 * (k * abs(an) + abs(bn))
    return CurvePoint(n, a, b, c, d, modulus, flagged=flagged)


def random_curve_point(n_states: int, modulus: Modulus, rng: np.random.Generator) -> CurvePoint:
    """Curve point from standard-normal complex ``a, b`` and uniform branches."""
    a = complex(*rng.standard_normal(2))
    b = complex(*rng.standard_normal(2))
    branch = tuple(int(v) for v in rng.integers(0, n_states, size=2))
    return make_curve_point(n_states, modulus, a, b, branch)


def curve_residuals(p: CurvePoint) -> tuple[float, float]:
    """Scaled residuals of the two curve equations."""
    n, k, kp = p.n_states, p.modulus.k, p.modulus.k_prime
    an, bn, cn, dn = p.a**n, p.b**n, p.c**n, p.d**n
    out = []
    for terms, lhs in (((an, k * bn, kp * dn), an + k * bn - kp * dn), ((k * an, bn, kp * cn), k * an + bn - kp * cn)):
        scale = max(abs(t) for t in terms)
        if scale == 0.0:
            raise CurveError("degenerate point: all curve terms vanish")
        out.append(abs(lhs) / scale)
    return out[0], out[1]


def _same_curve(p: CurvePoint, q: CurvePoint) -> None:
    if p.n_states != q.n_states:
        raise ValueError(f"points have different N ({p.n_states} vs {q.n_states})")
    if abs(p.modulus.k - q.modulus.k) > 1e-14:
        raise ValueError("points lie on curves with different modulus")


def _factors(p: CurvePoint, q: CurvePoint, j: int):
    w = _omega(p.n_states) ** j
    wn = _omega(p.n_states)
    h_num = p.d * q.b - p.a * q.c * w
    h_den = p.b * q.d - p.c * q.a * w
    h_scale = abs(p.b * q.d) + abs(p.c * q.a)
    v_num = wn * p.a * q.d - p.d * q.a * w
    v_den = p.c * q.b - p.b * q.c * w
    v_scale = abs(p.c * q.b) + abs(p.b * q.c)
    if abs(h_den) <= SINGULAR_RTOL * h_scale:
        raise SingularWeightError("h", j, h_den)
    if abs(v_den) <= SINGULAR_RTOL * v_scale:
        raise SingularWeightError("v", j, v_den)
    return h_num / h_den, v_num / v_den


@dataclass(frozen=True)
class WeightTable:
    n_states: int
    omega: complex
    w_h: np.ndarray = field(repr=False)
    w_v: np.ndarray = field(repr=False)

    def h(self, n: int) -> complex:
        return complex(self.w_h[n % self.n_states])

    def v(self, n: int) -> complex:
        return complex(self.w_v[n % self.n_states])


def weight_table(p: CurvePoint, q: CurvePoint) -> WeightTable:
    """Weight ratios ``W(n)/W(0)`` for ``n = 0..N-1``, both families."""
    _same_curve(p, q)
    n = p.n_states
    w_h = np.ones(n, dtype=complex)
    w_v = np.ones(n, dtype=complex)
    for j in range(1, n):
        fh, fv = _factors(p, q, j)
        w_h[j] = w_h[j - 1] * fh
        w_v[j] = w_v[j - 1] * fv
    w_h.setflags(write=False)
    w_v.setflags(write=False)
    return WeightTable(n, _omega(n), w_h, w_v)


def periodicity_defect(p: CurvePoint, q: CurvePoint) -> tuple[float, float]:
    """``|W(N)/W(0) - 1|`` for the h and v families, products taken to j = N.

    Zero on the curve because prod_j (x - y w^j) = x^N - y^N and the curve
    equations equate the numerator and denominator products.
    """
    _same_curve(p, q)
    ph = pv = 1.0 + 0j
    for j in range(1, p.n_states + 1):
        fh, fv = _factors(p, q, j)
        ph *= fh
        pv *= fv
    return abs(ph - 1.0), abs(pv - 1.0)


@dataclass(frozen=True)
class TransferMatrixSpec:
    width: int
    weights: WeightTable
    boundary: str = "periodic"
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        if self.width < 1:
            raise ValueError(f"width must be positive, got {self.width!r}")
        if self.boundary != "periodic":
            raise ValueError("only periodic boundary conditions are supported")

    @property
    def dim(self) -> int:
        return self.weights.n_states**self.width


def transfer_matrix(spec: TransferMatrixSpec, threads: int = 0) -> np.ndarray:
    """Dense row-to-row transfer matrix.

    ``T[l, l'] = prod_j w_v[l_j - l'_j] w_h[l_j - l'_{j+1}]`` with
    ``l'_{width+1} = l'_1``; configuration ``(l_1, ..., l_width)`` has index
    ``sum_j l_j N^(j-1)``.  ``threads = 0`` lets the compiled kernel use all
    cores.  Entries are independent, so the result does not depend on the
    thread count.
    """
    if spec.dim > spec.dim_cap:
        raise DimensionCapError(f"dimension {spec.dim} exceeds cap {spec.dim_cap}")
    w = spec.weights
    return kernels.transfer_fill(
        np.ascontiguousarray(w.w_v), np.ascontiguousarray(w.w_h), w.n_states, spec.width, threads
    )


def shift_operator(n_states: int, width: int) -> np.ndarray:
    """Permutation matrix of the cyclic shift ``l_j -> l_{j+1}`` on configurations."""
    dim = n_states**width
    idx = np.arange(dim)
    digits = [(idx // n_states**j) % n_states for j in range(width)]
    shifted = sum(digits[(j + 1) % width] * n_states**j for j in range(width))
    s = np.zeros((dim, dim))
    s[idx, shifted] = 1.0
    return s


def commutator_norm(
    p: CurvePoint,
    q1: CurvePoint,
    q2: CurvePoint,
    width: int,
    dim_cap: int = DEFAULT_DIM_CAP,
    threads: int = 0,
) -> float:
    """``||[T(p,q1), T(p,q2)]||_F / (||T(p,q1)||_F ||T(p,q2)||_F)``."""
    t1 = transfer_matrix(TransferMatrixSpec(width, weight_table(p, q1), dim_cap=dim_cap), threads)
    if q1 == q2:
        return 0.0
    t2 = transfer_matrix(TransferMatrixSpec(width, weight_table(p, q2), dim_cap=dim_cap), threads)
    comm = t1 @ t2 - t2 @ t1
    return float(np.linalg.norm(comm) / (np.linalg.norm(t1) * np.linalg.norm(t2)))


def order_parameter_exponent(n_states: int, n: int) -> Fraction:
    """Exact exponent ``n(N-n)/(2N^2)``."""
    if not (1 <= n <= n_states - 1):
        raise ValueError(f"need 1 <= n <= N-1, got n={n!r}, N={n_states!r}")
    return Fraction(n * (n_states - n), 2 * n_states**2)


def order_parameter(n_states: int, n: int, k: float) -> float:
    """``M_n = (1 - k^2)^(n(N-n)/(2N^2))``."""
    expo = order_parameter_exponent(n_states, n)
    if not (0.0 < k < 1.0):
        raise ValueError(f"k must lie in (0, 1), got {k!r}")
    return ((1.0 - k) * (1.0 + k)) ** (expo.numerator / expo.denominator)


@dataclass(frozen=True)
class IsingReduction:
    e_v: float
    e_h: float
    field: float = 0.0

    def __post_init__(self):
        if self.field != 0.0:
            raise ValueError("the N=2 reduction holds only in zero field")

    def weight_ratio(self, family: str) -> float:
        """``W(1)/W(0) = exp(-2E)`` for Ising weights ``exp(+-E)``."""
        e = self.e_h if family == "h" else self.e_v
        return math.exp(-2.0 * e)


@dataclass(frozen=True)
class IsingReductionReport:
    couplings: IsingReduction
    w_h1: complex
    w_v1: complex
    residual: float
    slice: str = "real positive a, b with root branches (0, 0)"


def _on_real_slice(p: CurvePoint) -> bool:
    return all(abs(z.imag) <= 1e-14 * max(abs(z), 1e-300) and z.real > 0 for z in (p.a, p.b, p.c, p.d))


def ising_reduction_check(k: float, p: CurvePoint, q: CurvePoint) -> IsingReductionReport:
    """Match N=2 weights to Ising couplings at H = 0.

    On the slice of real positive ``a, b`` with branches (0, 0) every
    coordinate is real and positive; the weight ratios there must be real
    and non-negative, and ``E = -(1/2) ln(W(1)/W(0))`` per family.  A zero
    ratio (``w_v`` at p = q) gives an infinite coupling.
    """
    if p.n_states != 2 or q.n_states != 2:
        raise ValueError("the Ising reduction requires N = 2 points")
    if abs(p.modulus.k - k) > 1e-14:
        raise ValueError(f"points carry modulus k={p.modulus.k!r}, expected {k!r}")
    for name, pt in (("p", p), ("q", q)):
        if not _on_real_slice(pt):
            raise ReductionSliceError(f"{name} is not on the real positive slice")
    table = weight_table(p, q)
    w_h1, w_v1 = complex(table.w_h[1]), complex(table.w_v[1])
    couplings = {}
    for fam, w in (("h", w_h1), ("v", w_v1)):
        if abs(w.imag) > 1e-12 * max(abs(w), 1.0) or w.real < 0.0:
            raise ReductionSliceError(f"W^{fam}(1)/W^{fam}(0) = {w!r} is not real and non-negative")
        couplings[fam] = math.inf if w.real == 0.0 else 0.0 - 0.5 * math.log(w.real)
    red = IsingReduction(e_v=couplings["v"], e_h=couplings["h"])
    res = max(abs(red.weight_ratio(fam) - w) for fam, w in (("h", w_h1), ("v", w_v1)))
    return IsingReductionReport(red, w_h1, w_v1, res)
