"""Command-line front end.

Exit codes: 0 success; 1 computation failed (integration failure, commutator
above --tol, enumeration cap); 2 usage error; 3 point off the curve;
4 singular weight; 5 enumeration with an infinite momentum window.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import chiral_potts as cp
from . import painleve as pv
from . import quasiparticle as qp
from .errors import (
    CurveError,
    EnumerationCapError,
    InfiniteWindowError,
    IntegrationError,
    IntlatError,
    ReductionSliceError,
    SingularWeightError,
)
from .special_functions import ToleranceSpec

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_OFF_CURVE = 3
EXIT_SINGULAR = 4
EXIT_INFINITE = 5

CURVE_TOL = 1e-12


@dataclass(frozen=True)
class OutputFormat:
    kind: str = "csv"
    precision: int = 17

    def __post_init__(self):
        if self.kind not in ("csv", "json"):
            raise ValueError(f"unknown output kind {self.kind!r}")
        if not (6 <= self.precision <= 17):
            raise ValueError("precision must lie in [6, 17]")

    def fmt(self, x: float) -> str:
        return f"{x:.{self.precision}g}"

    def num(self, x: float):
        """JSON-ready number: repr round-trips exactly at precision 17."""
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x if self.precision == 17 else float(self.fmt(x))

    def cplx(self, z: complex) -> list:
        z = complex(z)
        return [self.num(z.real), self.num(z.imag)]


class _Usage(Exception):
    pass


def _die(msg: str, code: int) -> int:
    print(f"intlat: {msg}", file=sys.stderr)
    return code


# ---------------------------------------------------------------------------
# parsing helpers
# ---------------------------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from exc


def _complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise _Usage(f"bad complex value {text!r}; use 're' or 're,im'")


def _parse_point(text: str, n_states: int, modulus: cp.Modulus) -> cp.CurvePoint:
    """``a:b``, ``a:b:bc,bd`` (root branches) or ``a:b:c:d`` (raw coordinates)."""
    fields = text.split(":")
    if len(fields) in (2, 3):
        a, b = _complex(fields[0]), _complex(fields[1])
        branch = (0, 0)
        if len(fields) == 3:
            try:
                branch = tuple(int(t) for t in fields[2].split(","))
            except ValueError as exc:
                raise _Usage(f"bad branch pair {fields[2]!r}") from exc
            if len(branch) != 2:
                raise _Usage(f"branch needs two integers, got {fields[2]!r}")
        try:
            return cp.make_curve_point(n_states, modulus, a, b, branch)
        except ValueError as exc:
            if isinstance(exc, CurveError):
                raise
            raise _Usage(str(exc)) from exc
    if len(fields) == 4:
        a, b, c, d = (_complex(f) for f in fields)
        return cp.CurvePoint(n_states, a, b, c, d, modulus)
    raise _Usage(f"bad point {text!r}; use a:b, a:b:bc,bd or a:b:c:d")


def _rational_list(text: str):
    try:
        return [qp.parse_rational(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise _Usage(f"bad rational list {text!r}") from exc


def _rational_matrix(text: str):
    return [_rational_list(row) for row in text.split(";") if row.strip()]


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise _Usage(f"bad integer list {text!r}") from exc


# ---------------------------------------------------------------------------
# painleve
# ---------------------------------------------------------------------------


def _tol_from(args) -> ToleranceSpec:
    base = pv.DEFAULT_TOL
    return ToleranceSpec(
        args.abs_tol if args.abs_tol is not None else base.abs_tol,
        args.rel_tol if args.rel_tol is not None else base.rel_tol,
        args.max_steps if args.max_steps is not None else base.max_steps,
    )


def cmd_painleve(args, out: OutputFormat) -> int:
    if not (args.x_min > 0 and args.x_max > args.x_min):
        raise _Usage(f"need 0 < x_min < x_max, got x_min={args.x_min}, x_max={args.x_max}")
    if args.grid <= 0:
        raise _Usage("--grid must be positive")
    try:
        tol = _tol_from(args)
    except ValueError as exc:
        raise _Usage(str(exc)) from exc
    writer = csv.writer(sys.stdout, lineterminator="\r\n")
    try:
        if args.scaling:
            if not args.r:
                raise _Usage("--scaling needs --r")
            r_grid = sorted(args.r)
            x_min = min(args.x_min, r_grid[0])
            if r_grid[-1] > args.x_max or x_min <= 0:
                raise _Usage("every r must lie in (0, x_max]")
            traj = pv.solve_eta(pv.ISING, args.x_max, x_min, tol, grid=[x_min, args.x_max])
            rows = pv.scaling_table(traj, r_grid)
            writer.writerow(["r", "g_plus", "g_minus", "est_error"])
            for v in rows:
                writer.writerow([out.fmt(v.r), out.fmt(v.g_plus), out.fmt(v.g_minus), out.fmt(v.est_error)])
        else:
            grid = pv.uniform_grid(args.x_min, args.x_max, args.grid)
            traj = pv.solve_eta(pv.ISING, args.x_max, args.x_min, tol, grid=grid)
            writer.writerow(["x", "eta", "eta_prime", "residual"])
            for s in traj.samples:
                writer.writerow([out.fmt(s.x), out.fmt(s.eta), out.fmt(s.eta_prime), out.fmt(s.residual)])
    except IntegrationError as exc:
        return _die(f"integration failed: {exc}", EXIT_FAIL)
    return EXIT_OK


# ---------------------------------------------------------------------------
# chiral potts
# ---------------------------------------------------------------------------


def _point_json(p: cp.CurvePoint, out: OutputFormat) -> dict:
    res = cp.curve_residuals(p)
    return {
        "n_states": p.n_states,
        "k": out.num(p.modulus.k),
        "k_prime": out.num(p.modulus.k_prime),
        "a": out.cplx(p.a),
        "b": out.cplx(p.b),
        "c": out.cplx(p.c),
        "d": out.cplx(p.d),
        "curve_residuals": [out.num(r) for r in res],
    }


def _checked(p: cp.CurvePoint, name: str) -> cp.CurvePoint:
    res = cp.curve_residuals(p)
    if max(res) >= CURVE_TOL:
        raise CurveError(f"point {name} is off the curve: residuals {res[0]:.3e}, {res[1]:.3e} (limit {CURVE_TOL:g})")
    return p


def _points(args, names: Sequence[str]) -> tuple[cp.Modulus, list[cp.CurvePoint]]:
    if args.n_states < 2:
        raise _Usage("--n-states must be >= 2")
    try:
        modulus = cp.Modulus.from_k(args.k)
    except CurveError as exc:
        raise _Usage(str(exc)) from exc
    rng = np.random.default_rng(args.seed)
    pts = []
    for name in names:
        text = getattr(args, name)
        if text is None:
            p = cp.random_curve_point(args.n_states, modulus, rng)
        else:
            p = _parse_point(text, args.n_states, modulus)
        pts.append(_checked(p, name))
    return modulus, pts


def cmd_weights(args, out: OutputFormat) -> int:
    _, (p, q) = _points(args, ["p", "q"])
    table = cp.weight_table(p, q)
    try:
        defect = [out.num(x) for x in cp.periodicity_defect(p, q)]
    except SingularWeightError:
        defect = None
    _emit({
        "n_states": table.n_states,
        "omega": out.cplx(table.omega),
        "w_h": [out.cplx(z) for z in table.w_h],
        "w_v": [out.cplx(z) for z in table.w_v],
        "periodicity_defect": defect,
        "p": _point_json(p, out),
        "q": _point_json(q, out),
    })
    return EXIT_OK


def cmd_transfer(args, out: OutputFormat) -> int:
    _, (p, q) = _points(args, ["p", "q"])
    spec = cp.TransferMatrixSpec(args.width, cp.weight_table(p, q), dim_cap=args.dim_cap)
    t = cp.transfer_matrix(spec, threads=args.threads)
    _emit({
        "n_states": p.n_states,
        "width": args.width,
        "dim": spec.dim,
        "matrix": [[out.cplx(z) for z in row] for row in t],
    })
    return EXIT_OK


def cmd_commutator(args, out: OutputFormat) -> int:
    _, (p, q1, q2) = _points(args, ["p", "q1", "q2"])
    norm = cp.commutator_norm(p, q1, q2, args.width, dim_cap=args.dim_cap, threads=args.threads)
    _emit({"n_states": p.n_states, "width": args.width, "norm": out.num(norm)})
    return EXIT_OK if norm < args.tol else EXIT_FAIL


def cmd_order_param(args, out: OutputFormat) -> int:
    try:
        expo = cp.order_parameter_exponent(args.n_states, args.n)
        value = cp.order_parameter(args.n_states, args.n, args.k)
    except ValueError as exc:
        raise _Usage(str(exc)) from exc
    _emit({
        "n_states": args.n_states,
        "n": args.n,
        "k": out.num(args.k),
        "exponent": str(expo),
        "value": out.num(value),
    })
    return EXIT_OK


def cmd_ising(args, out: OutputFormat) -> int:
    if args.n_states != 2:
        raise _Usage("ising-reduction needs --n-states 2")
    _, (p, q) = _points(args, ["p", "q"])
    rep = cp.ising_reduction_check(args.k, p, q)
    _emit({
        "e_v": out.num(rep.couplings.e_v),
        "e_h": out.num(rep.couplings.e_h),
        "field": out.num(rep.couplings.field),
        "w_h1": out.cplx(rep.w_h1),
        "w_v1": out.cplx(rep.w_v1),
        "residual": out.num(rep.residual),
        "slice": rep.slice,
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# quasiparticles
# ---------------------------------------------------------------------------


def _spec(args) -> tuple[qp.QuasiparticleSpec, qp.ParticleContent]:
    b = _rational_matrix(args.b_matrix)
    a = _rational_list(args.a_vector)
    u = _rational_list(args.u_vector) if args.u_vector else [math.inf] * len(a)
    try:
        spec = qp.QuasiparticleSpec(args.m_sites, b, a, u, speed=args.speed)
        m = qp.ParticleContent(tuple(_int_list(args.content)))
        if len(m) != spec.n_species:
            raise ValueError(f"--content needs {spec.n_species} entries")
    except ValueError as exc:
        raise _Usage(str(exc)) from exc
    return spec, m


def _window_json(w: qp.Window, m_sites: int, out: OutputFormat) -> dict:
    finite = not isinstance(w.pmax_units, float)
    return {
        "species": w.species,
        "p_min": out.num(w.p_min(m_sites)),
        "p_max": out.num(w.p_max(m_sites)),
        "p_min_units": str(w.pmin_units),
        "p_max_units": str(w.pmax_units) if finite else "inf",
        "D": w.size if finite else "inf",
        "on_grid": w.on_grid,
    }


def cmd_windows(args, out: OutputFormat) -> int:
    spec, m = _spec(args)
    _emit({
        "spec": spec.to_dict(),
        "content": list(m.counts),
        "windows": [_window_json(w, spec.m_sites, out) for w in qp.windows(spec, m)],
        "grid_violations": qp.grid_violations(spec, m),
    })
    return EXIT_OK


def cmd_enumerate(args, out: OutputFormat) -> int:
    spec, m = _spec(args)
    states = qp.enumerate_states(spec, m, momentum_sector=args.sector, cap=args.cap)
    _emit({
        "spec": spec.to_dict(),
        "content": list(m.counts),
        "windows": [_window_json(w, spec.m_sites, out) for w in qp.windows(spec, m)],
        "count": len(states),
        "states": [
            {
                "offsets": [list(o) for o in st.offsets],
                "momenta": [[out.num(p) for p in ps] for ps in st.momenta],
                "total_momentum": out.num(st.total_momentum),
                "energy": out.num(st.energy),
            }
            for st in states
        ],
    })
    return EXIT_OK


def cmd_polynomial(args, out: OutputFormat) -> int:
    spec, m = _spec(args)
    poly = qp.counting_polynomial(spec, m)
    _emit({
        "spec": spec.to_dict(),
        "content": list(m.counts),
        "windows": [_window_json(w, spec.m_sites, out) for w in qp.windows(spec, m)],
        "polynomial": poly.to_dict(),
        "total": poly.total,
    })
    return EXIT_OK


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, ensure_ascii=False)
    sys.stdout.write("\n")


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intlat", description=__doc__.splitlines()[0])
    parser.add_argument("--precision", type=int, default=17, help="significant digits (6-17)")
    parser.add_argument("--threads", type=int, default=0, help="kernel threads (0 = all cores)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("painleve", help="Painleve III transcendent and Ising scaling functions (CSV)")
    p.add_argument("--x-min", type=float, default=pv.DEFAULT_X_MIN)
    p.add_argument("--x-max", type=float, default=pv.DEFAULT_X_MAX)
    p.add_argument("--grid", type=float, default=pv.DEFAULT_GRID_STEP, help="sample spacing")
    p.add_argument("--abs-tol", type=float)
    p.add_argument("--rel-tol", type=float)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--scaling", action="store_true", help="emit the G+-(2r) table instead")
    p.add_argument("--r", type=_float_list, help="comma-separated r values")
    p.set_defaults(func=cmd_painleve)

    c = sub.add_parser("chiral-potts", help="chiral Potts weights and transfer matrices (JSON)")
    csub = c.add_subparsers(dest="action", required=True)

    def curve_flags(sp, points):
        sp.add_argument("--n-states", "--n", dest="n_states", type=int, default=3)
        sp.add_argument("--k", type=float, default=0.6)
        sp.add_argument("--seed", type=int, default=0, help="seed for points not given explicitly")
        for name in points:
            sp.add_argument(f"--{name}", help="a:b, a:b:bc,bd or a:b:c:d; complex values as re,im")

    w = csub.add_parser("weights")
    curve_flags(w, ["p", "q"])
    w.set_defaults(func=cmd_weights)

    t = csub.add_parser("transfer")
    curve_flags(t, ["p", "q"])
    t.add_argument("--width", type=int, default=2)
    t.add_argument("--dim-cap", type=int, default=cp.DEFAULT_DIM_CAP)
    t.set_defaults(func=cmd_transfer)

    cm = csub.add_parser("commutator")
    curve_flags(cm, ["p", "q1", "q2"])
    cm.add_argument("--width", type=int, default=2)
    cm.add_argument("--tol", type=float, default=1e-10)
    cm.add_argument("--dim-cap", type=int, default=cp.DEFAULT_DIM_CAP)
    cm.set_defaults(func=cmd_commutator)

    op = csub.add_parser("order-param")
    op.add_argument("--n-states", type=int, required=True)
    op.add_argument("--n", type=int, required=True)
    op.add_argument("--k", type=float, required=True)
    op.set_defaults(func=cmd_order_param)

    ir = csub.add_parser("ising-reduction")
    curve_flags(ir, ["p", "q"])
    ir.set_defaults(func=cmd_ising, n_states=2)

    q = sub.add_parser("quasi", help="quasiparticle windows, states and counting polynomials (JSON)")
    qsub = q.add_subparsers(dest="action", required=True)
    for name, func in (("windows", cmd_windows), ("enumerate", cmd_enumerate), ("polynomial", cmd_polynomial)):
        sp = qsub.add_parser(name)
        sp.add_argument("--m-sites", type=int, required=True)
        sp.add_argument("--b-matrix", required=True, help="rows separated by ';', entries p/q")
        sp.add_argument("--a-vector", required=True)
        sp.add_argument("--u-vector", help="entries p/q or inf (default: all inf)")
        sp.add_argument("--content", required=True, help="particle numbers m_1,...,m_n")
        sp.add_argument("--speed", type=float, default=1.0)
        if name == "enumerate":
            sp.add_argument("--sector", type=float, help="keep one total momentum (radians)")
        if name != "windows":
            sp.add_argument("--cap", type=int, default=qp.DEFAULT_ENUMERATION_CAP)
        sp.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        out = OutputFormat("csv" if args.command == "painleve" else "json", args.precision)
    except ValueError as exc:
        return _die(str(exc), EXIT_USAGE)
    try:
        return args.func(args, out)
    except _Usage as exc:
        parser.print_usage(sys.stderr)
        return _die(str(exc), EXIT_USAGE)
    except CurveError as exc:
        return _die(str(exc), EXIT_OFF_CURVE)
    except SingularWeightError as exc:
        return _die(str(exc), EXIT_SINGULAR)
    except InfiniteWindowError as exc:
        return _die(str(exc), EXIT_INFINITE)
    except (EnumerationCapError, ReductionSliceError, IntlatError) as exc:
        return _die(str(exc), EXIT_FAIL)


if __name__ == "__main__":
    sys.exit(main())
