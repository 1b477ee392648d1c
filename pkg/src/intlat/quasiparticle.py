"""Quasiparticle momentum rules with fractional exclusion.

A state with content m = (m_1, ..., m_n) places m_a particles of species a
on distinct momenta from the grid

    P_min^a(m), P_min^a(m) + 2pi/M, ..., P_max^a(m)

with

    P_min^a(m) = (pi/M) [ (m (B - 1))_a - A_a + 1 ]
    P_max^a(m) = -P_min^a(m) + (2pi/M) (u_a/2 - A_a)

(``P_max = inf`` when ``u_a = inf``).  Energies add, E = sum e_a(P), and the
total momentum is the sum reduced mod 2pi.

Momenta are handled exactly: P_min in units of pi/M is a Fraction and each
particle sits at an integer grid offset s, P = P_min + (2pi/M) s.  Floating
point only enters through the dispersion and the reported radians.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import EnumerationCapError, InfiniteWindowError

__all__ = [
    "QuasiparticleSpec",
    "ParticleContent",
    "Window",
    "MultiParticleState",
    "CountingPolynomial",
    "DEFAULT_ENUMERATION_CAP",
    "parse_rational",
    "ising_spec",
    "p_min",
    "p_max",
    "window",
    "windows",
    "grid_violations",
    "enumerate_states",
    "count_states",
    "counting_polynomial",
    "gaussian_binomial",
    "state_energy",
]

DEFAULT_ENUMERATION_CAP = 1_000_000

Rational = Fraction
Dispersion = Callable[[float], float]


def parse_rational(value) -> Fraction | float:
    """``Fraction`` from ints, Fractions or strings such as ``"3/2"``;
    ``"inf"``/``math.inf`` gives ``math.inf``.  Floats are rejected unless
    they are integral, so that inexact decimals never slip in silently.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if math.isinf(value) and value > 0:
            return math.inf
        if value.is_integer():
            return Fraction(int(value))
        raise ValueError(f"inexact float {value!r}; pass a 'p/q' string or Fraction")
    text = str(value).strip().lower()
    if text in ("inf", "+inf", "infinity", "oo"):
        return math.inf
    return Fraction(text)


@dataclass(frozen=True)
class QuasiparticleSpec:
    """Species data. ``dispersions[a]`` defaults to ``speed * |P|``."""

    m_sites: int
    b_matrix: tuple[tuple[Fraction, ...], ...]
    a_vector: tuple[Fraction, ...]
    u_vector: tuple[Fraction | float, ...]
    speed: float = 1.0
    dispersions: tuple[Dispersion | None, ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.a_vector)
        object.__setattr__(self, "b_matrix", tuple(tuple(parse_rational(x) for x in row) for row in self.b_matrix))
        object.__setattr__(self, "a_vector", tuple(parse_rational(x) for x in self.a_vector))
        object.__setattr__(self, "u_vector", tuple(parse_rational(x) for x in self.u_vector))
        if n < 1:
            raise ValueError("need at least one species")
        if int(self.m_sites) != self.m_sites or self.m_sites < 1:
            raise ValueError(f"M must be a positive integer, got {self.m_sites!r}")
        if len(self.b_matrix) != n or any(len(row) != n for row in self.b_matrix):
            raise ValueError(f"B must be {n}x{n}")
        if len(self.u_vector) != n:
            raise ValueError(f"u must have length {n}")
        if any(isinstance(x, float) for row in self.b_matrix for x in row) or any(
            isinstance(x, float) for x in self.a_vector
        ):
            raise ValueError("B and A entries must be finite rationals")
        if not self.speed > 0:
            raise ValueError("speed must be positive")
        if self.dispersions is not None and len(self.dispersions) != n:
            raise ValueError(f"need {n} dispersions")

    @property
    def n_species(self) -> int:
        return len(self.a_vector)

    @property
    def grid_step(self) -> float:
        return 2.0 * math.pi / self.m_sites

    def dispersion(self, species: int) -> Dispersion:
        if self.dispersions is not None and self.dispersions[species] is not None:
            return self.dispersions[species]
        v = self.speed
        return lambda p: v * abs(p)

    def to_dict(self) -> dict:
        return {
            "n_species": self.n_species,
            "m_sites": self.m_sites,
            "b_matrix": [[str(x) for x in row] for row in self.b_matrix],
            "a_vector": [str(x) for x in self.a_vector],
            "u_vector": ["inf" if isinstance(x, float) else str(x) for x in self.u_vector],
            "speed": self.speed,
        }


def ising_spec(m_sites: int, u: Fraction | float | str = math.inf) -> QuasiparticleSpec:
    """Single free-fermion species: ``B = 1``, ``A = 1``."""
    return QuasiparticleSpec(m_sites, ((Fraction(1),),), (Fraction(1),), (parse_rational(u),))


@dataclass(frozen=True)
class ParticleContent:
    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if any(c < 0 for c in counts):
            raise ValueError(f"particle numbers must be non-negative, got {counts!r}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def of(cls, *counts: int) -> "ParticleContent":
        return cls(tuple(counts))

    def __len__(self) -> int:
        return len(self.counts)

    def __iter__(self):
        return iter(self.counts)


def _content(spec: QuasiparticleSpec, m) -> ParticleContent:
    if not isinstance(m, ParticleContent):
        m = ParticleContent(tuple(m))
    if len(m) != spec.n_species:
        raise ValueError(f"content has {len(m)} entries, spec has {spec.n_species} species")
    return m


def _check_species(spec: QuasiparticleSpec, species: int) -> None:
    if not (0 <= species < spec.n_species):
        raise IndexError(f"species {species!r} out of range 0..{spec.n_species - 1}")


def _pmin_units(spec: QuasiparticleSpec, m: ParticleContent, a: int) -> Fraction:
    # (m (B - 1))_a - A_a + 1, in units of pi/M
    shifted = sum(
        (mb * (spec.b_matrix[b][a] - (1 if a == b else 0)) for b, mb in enumerate(m.counts)),
        Fraction(0),
    )
    return shifted - spec.a_vector[a] + 1


def _pmax_units(spec: QuasiparticleSpec, m: ParticleContent, a: int) -> Fraction | float:
    u = spec.u_vector[a]
    if isinstance(u, float):
        return math.inf
    return -_pmin_units(spec, m, a) + u - 2 * spec.a_vector[a]


def p_min(spec: QuasiparticleSpec, m, species: int) -> float:
    """Lowest allowed momentum of ``species`` (radians)."""
    m = _content(spec, m)
    _check_species(spec, species)
    return math.pi / spec.m_sites * float(_pmin_units(spec, m, species))


def p_max(spec: QuasiparticleSpec, m, species: int) -> float:
    """Highest allowed momentum of ``species`` (radians); ``inf`` if ``u = inf``."""
    m = _content(spec, m)
    _check_species(spec, species)
    top = _pmax_units(spec, m, species)
    return math.inf if isinstance(top, float) else math.pi / spec.m_sites * float(top)


@dataclass(frozen=True)
class Window:
    """Momentum window of one species, endpoints in units of pi/M.

    ``size`` counts grid points P_min + 2k pi/M not exceeding P_max (both
    endpoints inclusive); ``on_grid`` says whether P_max is itself one of
    them.
    """

    species: int
    pmin_units: Fraction
    pmax_units: Fraction | float
    size: int | float
    on_grid: bool

    def p_min(self, m_sites: int) -> float:
        return math.pi / m_sites * float(self.pmin_units)

    def p_max(self, m_sites: int) -> float:
        if isinstance(self.pmax_units, float):
            return math.inf
        return math.pi / m_sites * float(self.pmax_units)


def window(spec: QuasiparticleSpec, m, species: int) -> Window:
    m = _content(spec, m)
    _check_species(spec, species)
    lo = _pmin_units(spec, m, species)
    hi = _pmax_units(spec, m, species)
    if isinstance(hi, float):
        return Window(species, lo, hi, math.inf, True)
    span = hi - lo
    size = max(0, math.floor(span / 2) + 1)
    on_grid = span >= 0 and span.denominator == 1 and span.numerator % 2 == 0
    return Window(species, lo, hi, size, on_grid)


def windows(spec: QuasiparticleSpec, m) -> list[Window]:
    m = _content(spec, m)
    return [window(spec, m, a) for a in range(spec.n_species)]


def grid_violations(spec: QuasiparticleSpec, m) -> list[str]:
    """Human-readable list of windows whose P_max misses the 2pi/M grid
    anchored at P_min, or which are empty.  Empty list means consistent."""
    out = []
    for w in windows(spec, m):
        if isinstance(w.pmax_units, float):
            continue
        if w.pmax_units < w.pmin_units:
            out.append(f"species {w.species}: empty window (P_max < P_min)")
        elif not w.on_grid:
            out.append(f"species {w.species}: P_max - P_min = {w.pmax_units - w.pmin_units} pi/M is not a multiple of 2pi/M")
    return out


@dataclass(frozen=True)
class MultiParticleState:
    """Per-species strictly increasing grid offsets plus derived observables.

    ``total_units`` is the unreduced total momentum in units of pi/M;
    ``total_momentum`` is it reduced to [0, 2pi) in radians.
    """

    offsets: tuple[tuple[int, ...], ...]
    momenta: tuple[tuple[float, ...], ...]
    total_units: Fraction
    total_momentum: float
    energy: float

    @property
    def content(self) -> ParticleContent:
        return ParticleContent(tuple(len(o) for o in self.offsets))


def _momentum_units(w: Window, s: int) -> Fraction:
    return w.pmin_units + 2 * s


def _make_state(spec: QuasiparticleSpec, wins: list[Window], offsets) -> MultiParticleState:
    scale = math.pi / spec.m_sites
    momenta = tuple(tuple(scale * float(_momentum_units(w, s)) for s in offs) for w, offs in zip(wins, offsets))
    total = sum((_momentum_units(w, s) for w, offs in zip(wins, offsets) for s in offs), Fraction(0))
    reduced = total % (2 * spec.m_sites)
    energy = _energy(spec, momenta)
    return MultiParticleState(tuple(tuple(o) for o in offsets), momenta, total, scale * float(reduced), energy)


def _energy(spec: QuasiparticleSpec, momenta) -> float:
    total = []
    for a, ps in enumerate(momenta):
        e = spec.dispersion(a)
        for p in ps:
            val = float(e(p))
            if val < 0 or not math.isfinite(val):
                raise ValueError(f"dispersion of species {a} gave {val!r} at P = {p!r}")
            total.append(val)
    return math.fsum(total)


def _finite_windows(spec: QuasiparticleSpec, m: ParticleContent) -> list[Window]:
    wins = windows(spec, m)
    for w, ma in zip(wins, m.counts):
        if isinstance(w.size, float) and ma > 0:
            raise InfiniteWindowError(
                f"species {w.species} has u = inf, so its momentum window is unbounded; "
                "a finite u is needed to enumerate states"
            )
    return wins


def count_states(spec: QuasiparticleSpec, m) -> int:
    """``prod_a C(D_a, m_a)`` without enumerating."""
    m = _content(spec, m)
    wins = _finite_windows(spec, m)
    total = 1
    for w, ma in zip(wins, m.counts):
        if ma:
            total *= math.comb(int(w.size), ma)
    return total


def _sector_match(state: MultiParticleState, sector: float, m_sites: int) -> bool:
    diff = (state.total_momentum - sector) % (2 * math.pi)
    tol = 1e-6 * math.pi / m_sites
    return diff < tol or 2 * math.pi - diff < tol


def enumerate_states(
    spec: QuasiparticleSpec,
    m,
    momentum_sector: float | None = None,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[MultiParticleState]:
    """All admissible states of content ``m``, lexicographic in grid offsets.

    ``momentum_sector`` keeps only states whose reduced total momentum
    equals it (radians, compared to within a millionth of a grid step).
    """
    m = _content(spec, m)
    total = count_states(spec, m)
    if total > cap:
        raise EnumerationCapError(f"{total} states exceed the enumeration cap {cap}")
    wins = _finite_windows(spec, m)
    choices = [
        itertools.combinations(range(int(w.size)), ma) if ma else [()]
        for w, ma in zip(wins, m.counts)
    ]
    states = []
    for offsets in itertools.product(*choices):
        st = _make_state(spec, wins, offsets)
        if momentum_sector is None or _sector_match(st, momentum_sector, spec.m_sites):
            states.append(st)
    return states


@dataclass(frozen=True)
class CountingPolynomial:
    """``sum_states q^s`` with s the total grid offset above the lowest state."""

    coefficients: dict[int, int]

    @property
    def total(self) -> int:
        return sum(self.coefficients.values())

    def __mul__(self, other: "CountingPolynomial") -> "CountingPolynomial":
        out: Counter = Counter()
        for i, a in self.coefficients.items():
            for j, b in other.coefficients.items():
                out[i + j] += a * b
        return CountingPolynomial(dict(sorted(out.items())))

    def to_dict(self) -> dict[str, int]:
        return {str(k): v for k, v in sorted(self.coefficients.items())}


def counting_polynomial(spec: QuasiparticleSpec, m) -> CountingPolynomial:
    """Histogram of enumerated states by unreduced total grid offset."""
    m = _content(spec, m)
    base = sum(ma * (ma - 1) // 2 for ma in m.counts)
    hist = Counter(sum(sum(o) for o in st.offsets) - base for st in enumerate_states(spec, m))
    return CountingPolynomial(dict(sorted(hist.items())))


def gaussian_binomial(n: int, k: int) -> CountingPolynomial:
    """Coefficients of ``[n choose k]_q`` from the q-Pascal recurrence
    ``[n, k] = [n-1, k-1] + q^k [n-1, k]``."""
    if k < 0 or n < 0 or k > n:
        return CountingPolynomial({})
    row = [[1]]  # row[j] = coefficients of [i choose j]_q for current i
    for i in range(1, n + 1):
        new = []
        for j in range(0, min(i, k) + 1):
            left = row[j - 1] if j >= 1 else []
            right = row[j] if j < len(row) and j <= i - 1 else []
            size = max(len(left), len(right) + j)
            coeffs = [0] * size
            for t, c in enumerate(left):
                coeffs[t] += c
            for t, c in enumerate(right):
                coeffs[t + j] += c
            new.append(coeffs)
        row = new
    return CountingPolynomial({i: c for i, c in enumerate(row[k]) if c})


def _validate_state(spec: QuasiparticleSpec, state: MultiParticleState) -> list[Window]:
    if len(state.offsets) != spec.n_species:
        raise ValueError("state does not match the number of species")
    m = state.content
    wins = windows(spec, m)
    for w, offs in zip(wins, state.offsets):
        if any(b <= a for a, b in zip(offs, offs[1:])):
            raise ValueError(f"species {w.species}: momenta must be distinct and increasing")
        if offs and (offs[0] < 0 or offs[-1] >= w.size):
            raise ValueError(f"species {w.species}: momentum outside [P_min, P_max]")
    return wins


def state_energy(spec: QuasiparticleSpec, state: MultiParticleState) -> float:
    """``sum_a sum_j e_a(P_j^a)`` recomputed from the offsets."""
    wins = _validate_state(spec, state)
    scale = math.pi / spec.m_sites
    momenta = [[scale * float(_momentum_units(w, s)) for s in offs] for w, offs in zip(wins, state.offsets)]
    return _energy(spec, momenta)
