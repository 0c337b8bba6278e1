"""``rz`` command line.

Every subcommand writes deterministic JSON (or CSV for sweeps) to stdout.
Exit codes: 0 success, 1 negative verdict, 2 usage error, 3 numerical
failure.  Errors are printed to stderr as ``{"error": {"code", "message"}}``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import amalgam, detrep, geometry, pencil as pencil_mod
from .errors import (
    CapacityError,
    ParseError,
    RZError,
    UsageError,
)
from .linalg import TolerancePolicy, is_psd, matrix_from_json, matrix_to_json
from .moments import DetRep, detrep_expand, moment_table
from .poly import MAX_CUTOFF, MAX_VARS, Polynomial, format_rational, parse_polynomial

CSV_FIELDS_HEAD = ["ray_index"]
CSV_FIELDS_TAIL = ["gauge_C", "gauge_S", "ratio"]
MAX_DEGREE = 12


@dataclass
class RunConfig:
    seed: int = 0
    psd_tol: float = 1e-8
    root_tol: float = 1e-7
    gauge_tol: float = 1e-9
    max_vars: int = MAX_VARS
    max_degree: int = MAX_DEGREE
    max_cutoff: int = MAX_CUTOFF
    output_format: str = "json"

    def validate(self):
        for name in ("psd_tol", "root_tol", "gauge_tol"):
            if not getattr(self, name) > 0:
                raise UsageError(f"{name} must be positive")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if not 1 <= self.max_vars <= MAX_VARS:
            raise UsageError(f"max_vars must lie in 1..{MAX_VARS}")
        if not 1 <= self.max_cutoff <= MAX_CUTOFF:
            raise UsageError(f"max_cutoff must lie in 1..{MAX_CUTOFF}")
        if not 1 <= self.max_degree <= MAX_DEGREE:
            raise UsageError(f"max_degree must lie in 1..{MAX_DEGREE}")
        if self.output_format not in ("json", "csv"):
            raise UsageError("output_format must be json or csv")
        return self

    @property
    def policy(self) -> TolerancePolicy:
        return TolerancePolicy(psd_rel=self.psd_tol,
                               not_psd_rel=max(self.psd_tol, 1e-6))

    @classmethod
    def load(cls, path: str | None, overrides: dict) -> "RunConfig":
        data = {}
        env_seed = os.environ.get("RZ_SEED")
        if env_seed is not None:
            try:
                data["seed"] = int(env_seed)
            except ValueError:
                raise UsageError("RZ_SEED must be an integer") from None
        if path:
            try:
                with open(path) as fh:
                    loaded = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read config: {exc}") from None
            known = {f.name for f in fields(cls)}
            unknown = set(loaded) - known
            if unknown:
                raise UsageError(f"unknown config keys: {sorted(unknown)}")
            data.update(loaded)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data).validate()


# -- helpers ---------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(x):
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return x


def _exact_vector(text: str, name: str) -> list:
    from fractions import Fraction
    try:
        return [Fraction(v.strip()) for v in text.split(",")]
    except ValueError:
        raise ParseError(f"{name} must be comma-separated numbers") from None


def _polynomial(text: str, cfg: RunConfig, n_vars=None) -> Polynomial:
    p = parse_polynomial(text, n_vars)
    if p.n_vars > cfg.max_vars:
        raise CapacityError(f"{p.n_vars} variables exceed max_vars {cfg.max_vars}")
    if not p.is_zero() and p.degree > cfg.max_degree:
        raise CapacityError(f"degree {p.degree} exceeds max_degree {cfg.max_degree}")
    return p


def _virtual_degree(p: Polynomial, args) -> int:
    return args.degree if args.degree is not None else max(p.degree, 1)


def _relaxation(p: Polynomial, args):
    """``(kind, object)`` for the requested outer relaxation of C(p)."""
    d = _virtual_degree(p, args)
    if args.relax == "halfspace":
        return "halfspace", pencil_mod.halfspace(moment_table(p, d, 1))
    if args.relax == "hierarchy":
        return "pencil", pencil_mod.build_hierarchy_pencil(p, args.level)
    return "pencil", pencil_mod.build_pencil(moment_table(p, d, 3))


def _relaxed_gauge(kind, obj, direction, cfg: RunConfig):
    if kind == "halfspace":
        g = obj.gauge(direction)
        return g, "UNBOUNDED" if math.isinf(g) else "EXACT_ROOT"
    res = geometry.ray_gauge_S(obj, direction, policy=cfg.policy)
    return res.gauge, res.status.value


def _ratio(gc: float, gs: float, t_max: float = 1e6) -> float:
    if gc >= t_max and gs >= t_max:
        return 1.0
    if math.isinf(gs) or gc == 0:
        return math.inf
    return gs / gc


def _header(command: str, cfg: RunConfig, **extra) -> dict:
    out = {"command": command, "seed": cfg.seed}
    out.update(extra)
    return out


def _emit(obj, stream):
    stream.write(json.dumps(obj, sort_keys=True, indent=2))
    stream.write("\n")


def _add_poly(sp, required=True):
    sp.add_argument("-p", "--poly", required=required, help="polynomial text")
    sp.add_argument("--n-vars", type=int, default=None,
                    help="number of variables (default: highest index used)")


def _add_relax(sp):
    sp.add_argument("-d", "--degree", type=int, default=None,
                    help="virtual degree (default: deg p)")
    sp.add_argument("--relax", choices=["pencil", "halfspace", "hierarchy"],
                    default="pencil")
    sp.add_argument("--level", type=int, default=1,
                    help="hierarchy level for --relax hierarchy")


# -- commands ---------------------------------------------------------------

def cmd_rzcheck(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    verdict = geometry.real_zero_probe(p, trials=args.trials, tol=cfg.root_tol,
                                       seed=cfg.seed)
    report = _header("rzcheck", cfg, polynomial=str(p), passed=verdict.passed,
                     directions_tested=verdict.directions_tested,
                     tol=verdict.tol, method=verdict.method)
    passed = verdict.passed
    if p.degree <= 2 and p.constant_term:
        cert = geometry.quadratic_rz_certificate(p, cfg.policy)
        report["quadratic_certificate"] = {
            "matrix": matrix_to_json(cert.matrix), "verdict": cert.verdict.value}
        if args.strict_quadratic:
            passed = cert.passed
            report.update(passed=passed, method="exact-quadratic")
    if verdict.counterexample is not None:
        direction, root = verdict.counterexample
        report["counterexample"] = {
            "direction": None if direction is None else [_num(v) for v in direction],
            "root": {"re": _num(root.real), "im": _num(root.imag)}}
    _emit(report, out)
    return 0 if passed else 1


def cmd_moments(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    if args.cutoff > cfg.max_cutoff:
        raise CapacityError(f"cutoff exceeds max_cutoff {cfg.max_cutoff}")
    d = _virtual_degree(p, args)
    table = moment_table(p, d, args.cutoff)
    _emit(_header("moments", cfg, polynomial=str(p),
                  virtual_degree=format_rational(table.virtual_degree),
                  cutoff=table.cutoff, moments=table.to_json_rows()), out)
    return 0


def cmd_pencil(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    d = _virtual_degree(p, args)
    if args.hierarchy is not None:
        if 2 * args.hierarchy + 1 > cfg.max_cutoff:
            raise CapacityError(f"hierarchy level needs cutoff above {cfg.max_cutoff}")
        pen = pencil_mod.build_hierarchy_pencil(p, args.hierarchy)
        kind = f"hierarchy-{args.hierarchy}"
    elif args.inf:
        pen = pencil_mod.build_pencil_inf(moment_table(p, d, 3))
        kind = "inf"
    else:
        pen = pencil_mod.build_pencil(moment_table(p, d, 3))
        kind = "affine"
    _emit(_header("pencil", cfg, polynomial=str(p), virtual_degree=d,
                  kind=kind, pencil=pen.to_json()), out)
    return 0


def cmd_halfspace(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    d = _virtual_degree(p, args)
    hs = pencil_mod.halfspace(moment_table(p, d, 1))
    _emit(_header("halfspace", cfg, polynomial=str(p), virtual_degree=d,
                  c0=format_rational(hs.c0),
                  c=[format_rational(v) for v in hs.c],
                  full_space=hs.is_full_space), out)
    return 0


def cmd_member(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    point = _exact_vector(args.point, "--point")
    kind, relax = _relaxation(p, args)
    in_c = geometry.member_C(p, point)
    if kind == "halfspace":
        in_s = relax.contains(point)
        verdict_s = "PSD" if in_s else "NOT_PSD"
    else:
        verdict = geometry.member_S(relax, point, cfg.policy)
        in_s = verdict.value != "NOT_PSD"
        verdict_s = verdict.value
    _emit(_header("member", cfg, polynomial=str(p), relax=args.relax,
                  point=[format_rational(v) for v in point],
                  in_C=in_c, in_S=in_s, verdict_S=verdict_s), out)
    return 0


def cmd_gauge(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    direction = _exact_vector(args.dir, "--dir")
    kind, relax = _relaxation(p, args)
    gc = geometry.ray_gauge_C(p, direction, tol=cfg.root_tol)
    gs, status = _relaxed_gauge(kind, relax, direction, cfg)
    _emit(_header("gauge", cfg, polynomial=str(p), relax=args.relax,
                  direction=[format_rational(v) for v in direction],
                  gauge_C=_num(gc.gauge), status_C=gc.status.value,
                  gauge_S=_num(gs), status_S=status,
                  ratio=_num(_ratio(gc.gauge, gs))), out)
    return 0


def _sweep_rows(p, args, cfg):
    kind, relax = _relaxation(p, args)
    rows = []
    for k, a in enumerate(geometry.sample_directions(p.n_vars, args.rays, cfg.seed)):
        gc = geometry.ray_gauge_C(p, a, tol=cfg.root_tol).gauge
        gs, _ = _relaxed_gauge(kind, relax, a, cfg)
        rows.append((k, [float(v) for v in a], gc, gs, _ratio(gc, gs)))
    return rows


def _sweep_csv(rows, n_vars) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS_HEAD + [f"dir_{i + 1}" for i in range(n_vars)]
                    + CSV_FIELDS_TAIL)
    for k, a, gc, gs, ratio in rows:
        writer.writerow([k] + [repr(v) for v in a]
                        + [repr(gc), repr(gs), repr(ratio)])
    return buf.getvalue()


def cmd_sweep(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    rows = _sweep_rows(p, args, cfg)
    fmt = args.format or cfg.output_format
    if fmt == "csv":
        text = _sweep_csv(rows, p.n_vars)
        header = f"# rz sweep seed={cfg.seed} relax={args.relax} p={p}\n"
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
            out.write(header)
        else:
            out.write(header + text)
        return 0
    _emit(_header("sweep", cfg, polynomial=str(p), relax=args.relax,
                  rays=[{"ray_index": k, "direction": [_num(v) for v in a],
                         "gauge_C": _num(gc), "gauge_S": _num(gs),
                         "ratio": _num(r)} for k, a, gc, gs, r in rows]), out)
    return 0


def cmd_hierarchy(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    dirs = geometry.sample_directions(p.n_vars, args.rays, cfg.seed)
    gauges_c = [geometry.ray_gauge_C(p, a, tol=cfg.root_tol).gauge for a in dirs]
    levels = []
    for level in range(args.max_level + 1):
        pen = pencil_mod.build_hierarchy_pencil(p, level)
        worst = 0.0
        for a, gc in zip(dirs, gauges_c):
            gs = geometry.ray_gauge_S(pen, a, policy=cfg.policy).gauge
            if not (gc >= 1e6 and gs >= 1e6):
                worst = max(worst, gs - gc)
        levels.append({"level": level, "size": pen.size,
                       "max_overshoot": _num(worst)})
    _emit(_header("hierarchy", cfg, polynomial=str(p), rays=args.rays,
                  levels=levels), out)
    return 0


def cmd_cone(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    e = _exact_vector(args.e, "-e")
    probe = geometry.hyperbolicity_probe(p, e, trials=args.trials,
                                         tol=cfg.root_tol, seed=cfg.seed)
    report = _header("cone", cfg, polynomial=str(p),
                     direction=[format_rational(v) for v in e],
                     hyperbolic=bool(probe.passed))
    if not probe.passed:
        _emit(report, out)
        return 1
    hp = pencil_mod.homogeneous_pencil(p, e, check=False)
    report["pencil"] = hp.to_json()
    if args.point:
        a = _exact_vector(args.point, "--point")
        eig = geometry.eigenvalues_dir(p, e, a, tol=cfg.root_tol)
        verdict = is_psd(np.asarray(hp.evaluate(a), dtype=float),
                                  cfg.policy)
        report.update(point=[format_rational(v) for v in a],
                      eigenvalues=[_num(v) for v in eig],
                      trace=_num(sum(eig)),
                      in_cone=bool(geometry.cone_member(p, e, a)),
                      in_S=verdict.value != "NOT_PSD", verdict_S=verdict.value)
    _emit(report, out)
    return 0


def cmd_detrep(args, cfg, out):
    if args.matrices:
        try:
            with open(args.matrices) as fh:
                mats = [matrix_from_json(m) for m in json.load(fh)]
        except (OSError, json.JSONDecodeError, TypeError) as exc:
            raise ParseError(f"cannot read matrices: {exc}") from None
        rep = DetRep(tuple(mats))
        p = detrep_expand(rep)
        _emit(_header("detrep", cfg, kind="expand", size=rep.size,
                      polynomial=str(p)), out)
        return 0
    if args.kind == "saunderson":
        if not 1 <= args.size <= 6:
            raise UsageError("--size must be between 1 and 6")
        sp = detrep.saunderson_pencil(args.size)
        _emit(_header("detrep", cfg, kind="saunderson", size=args.size,
                      M=[_float_matrix(C) for C in sp.M.coeffs],
                      N=[_float_matrix(C) for C in sp.N.coeffs]), out)
        return 0
    if not args.poly:
        raise UsageError("detrep needs -p or --matrices")
    p = _polynomial(args.poly, cfg, args.n_vars)
    if args.kind == "hv2":
        rep = detrep.hv2_quadratic(p)
        target = p / p.constant_term
    else:
        rep = detrep.lincofactor_rep(p)
        target = detrep.cofactor_target(p / p.constant_term)
    residual = detrep.coefficient_residual(detrep_expand(rep), target)
    _emit(_header("detrep", cfg, kind=args.kind, polynomial=str(p),
                  target=str(target), size=rep.size,
                  matrices=[matrix_to_json(A) for A in rep.coeffs],
                  residual=_num(residual)), out)
    return 0


def _float_matrix(C):
    return [[_num(float(v)) for v in row] for row in np.asarray(C, dtype=float)]


def cmd_amalgamate(args, cfg, out):
    p = _polynomial(args.poly, cfg)
    q = _polynomial(args.q, cfg)
    if args.mode == "disjoint":
        d = args.degree if args.degree is not None else max(p.degree, q.degree)
        r = amalgam.amalgamate_disjoint(p, q, d, seed=cfg.seed)
    elif args.mode == "quadratic":
        r = amalgam.amalgamate_quadratic(
            amalgam.AmalgamProblem(args.shared, p, q, 2))
    else:
        r = amalgam.amalgamate_deg2_onevar(p, q)
    verdict = geometry.real_zero_probe(r, trials=64, tol=cfg.root_tol,
                                       seed=cfg.seed)
    _emit(_header("amalgamate", cfg, mode=args.mode, p=str(p), q=str(q),
                  result=str(r), n_vars=r.n_vars, rz_probe=verdict.passed), out)
    return 0 if verdict.passed else 1


def _load_anchors(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read anchors: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [row for row in csv.reader(io.StringIO(text)) if row]
    from fractions import Fraction
    try:
        return [[Fraction(str(v).strip()) for v in row] for row in data]
    except (ValueError, TypeError):
        raise ParseError("anchors must be a list of numeric points") from None


def cmd_tighten(args, cfg, out):
    p = _polynomial(args.poly, cfg, args.n_vars)
    anchors = _load_anchors(args.anchors)
    plain = pencil_mod.build_pencil(moment_table(p, p.degree, 3))
    family = pencil_mod.shifted_pencil_family(p, anchors)
    rays = []
    for k, a in enumerate(geometry.sample_directions(p.n_vars, args.rays, cfg.seed)):
        gc = geometry.ray_gauge_C(p, a, tol=cfg.root_tol).gauge
        gs = geometry.ray_gauge_S(plain, a, policy=cfg.policy).gauge
        gf = geometry.family_ray_gauge(family, a, policy=cfg.policy)
        rays.append({"ray_index": k, "direction": [_num(v) for v in a],
                     "gauge_C": _num(gc), "gauge_S": _num(gs),
                     "gauge_family": _num(gf),
                     "overshoot_S": _num(_overshoot(gs, gc)),
                     "overshoot_family": _num(_overshoot(gf, gc))})
    _emit(_header("tighten", cfg, polynomial=str(p),
                  anchors=[[format_rational(v) for v in a] for a in anchors],
                  rays=rays), out)
    return 0


def _overshoot(g, gc, t_max: float = 1e6) -> float:
    if g >= t_max and gc >= t_max:
        return 0.0
    return g - gc


def _read_sweep_csv(path: str):
    try:
        with open(path) as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
    except OSError as exc:
        raise UsageError(f"cannot read CSV: {exc}") from None
    reader = csv.DictReader(lines)
    if not reader.fieldnames or "gauge_C" not in reader.fieldnames:
        raise ParseError("CSV lacks the sweep header")
    dir_cols = [c for c in reader.fieldnames if c.startswith("dir_")]
    rows = list(reader)
    if not rows:
        raise UsageError("CSV has no rays")
    if len(dir_cols) != 2:
        raise UsageError("plotting needs two-variable sweeps")
    try:
        return [([float(r[c]) for c in dir_cols], float(r["gauge_C"]),
                 float(r["gauge_S"])) for r in rows]
    except (ValueError, KeyError):
        raise ParseError("malformed CSV row") from None


def cmd_plot(args, cfg, out):
    rows = _read_sweep_csv(args.csv)
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    finite = [g for _, gc, gs in rows for g in (gc, gs) if math.isfinite(g)]
    cap = 2 * max(finite) if finite else 1.0
    fig, ax = plt.subplots(figsize=(5, 5))
    for idx, label in ((1, "gauge_C"), (2, "gauge_S")):
        pts = np.array([[min(r[idx], cap) * r[0][0], min(r[idx], cap) * r[0][1]]
                        for r in rows])
        pts = np.vstack([pts, pts[:1]])
        ax.plot(pts[:, 0], pts[:, 1], "-" if idx == 1 else "--", label=label)
    ax.set_aspect("equal")
    ax.legend()
    fig.savefig(args.output, metadata={"Date": None} if args.output.endswith(".svg")
                else None)
    plt.close(fig)
    _emit(_header("plot", cfg, csv=args.csv, output=args.output,
                  rays=len(rows)), out)
    return 0


COMMANDS = {
    "rzcheck": cmd_rzcheck, "moments": cmd_moments, "pencil": cmd_pencil,
    "halfspace": cmd_halfspace, "member": cmd_member, "gauge": cmd_gauge,
    "sweep": cmd_sweep, "hierarchy": cmd_hierarchy, "cone": cmd_cone,
    "detrep": cmd_detrep, "amalgamate": cmd_amalgamate,
    "tighten": cmd_tighten, "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    # --seed and --config are accepted before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--config", default=argparse.SUPPRESS,
                        help="JSON RunConfig file")
    parser = _Parser(prog="rz", description=__doc__.splitlines()[0],
                     parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    sp = sub.add_parser("rzcheck", help="probe the real zero property")
    _add_poly(sp)
    sp.add_argument("--trials", type=int, default=64)
    sp.add_argument("--strict-quadratic", action="store_true",
                    help="decide quadratics by the exact discriminant certificate")

    sp = sub.add_parser("moments", help="pseudo-moment table")
    _add_poly(sp)
    sp.add_argument("-d", "--degree", type=int, default=None)
    sp.add_argument("-D", "--cutoff", type=int, default=3)

    sp = sub.add_parser("pencil", help="relaxation pencil")
    _add_poly(sp)
    sp.add_argument("-d", "--degree", type=int, default=None)
    group = sp.add_mutually_exclusive_group()
    group.add_argument("--inf", action="store_true",
                       help="virtual degree infinity (first row/column deleted)")
    group.add_argument("--hierarchy", type=int, default=None, metavar="K",
                       help="level-K hierarchy pencil")

    sp = sub.add_parser("halfspace", help="linear relaxation")
    _add_poly(sp)
    sp.add_argument("-d", "--degree", type=int, default=None)

    sp = sub.add_parser("member", help="membership in C(p) and the relaxation")
    _add_poly(sp)
    _add_relax(sp)
    sp.add_argument("--point", required=True)

    sp = sub.add_parser("gauge", help="ray gauges of C(p) and the relaxation")
    _add_poly(sp)
    _add_relax(sp)
    sp.add_argument("--dir", required=True)

    sp = sub.add_parser("sweep", help="gauges over many rays")
    _add_poly(sp)
    _add_relax(sp)
    sp.add_argument("--rays", type=int, default=64)
    sp.add_argument("--format", choices=["json", "csv"], default=None)
    sp.add_argument("-o", "--output", default=None)

    sp = sub.add_parser("hierarchy", help="overshoot per hierarchy level")
    _add_poly(sp)
    sp.add_argument("--max-level", type=int, default=2)
    sp.add_argument("--rays", type=int, default=32)

    sp = sub.add_parser("cone", help="hyperbolicity cone pencil and membership")
    _add_poly(sp)
    sp.add_argument("-e", required=True, help="hyperbolicity direction")
    sp.add_argument("--point", default=None)
    sp.add_argument("--trials", type=int, default=64)

    sp = sub.add_parser("detrep", help="determinantal representations")
    _add_poly(sp, required=False)
    sp.add_argument("--kind", choices=["hv2", "lincofactor", "saunderson"],
                    default="hv2")
    sp.add_argument("--size", type=int, default=2,
                    help="matrix size for --kind saunderson")
    sp.add_argument("--matrices", default=None,
                    help="JSON list of matrices to expand instead")

    sp = sub.add_parser("amalgamate", help="real zero amalgamation")
    sp.add_argument("--mode", choices=["disjoint", "quadratic", "deg2"],
                    required=True)
    sp.add_argument("-p", "--poly", required=True)
    sp.add_argument("-q", required=True)
    sp.add_argument("--shared", type=int, default=0)
    sp.add_argument("-d", "--degree", type=int, default=None)

    sp = sub.add_parser("tighten", help="intersect shifted relaxations")
    _add_poly(sp)
    sp.add_argument("--anchors", required=True, help="JSON or CSV of points")
    sp.add_argument("--rays", type=int, default=32)

    sp = sub.add_parser("plot", help="plot a two-variable sweep CSV")
    sp.add_argument("csv")
    sp.add_argument("-o", "--output", default="sweep.svg")
    return parser


def _error(exc: Exception, code: str, stream) -> None:
    _emit({"error": {"code": code, "message": str(exc)}}, stream)


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise UsageError("missing subcommand")
        cfg = RunConfig.load(getattr(args, "config", None),
                             {"seed": getattr(args, "seed", None)})
        return COMMANDS[args.command](args, cfg, stdout)
    except RZError as exc:
        _error(exc, exc.code, stderr)
        return exc.exit_code
    except (ZeroDivisionError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _error(exc, "numerical", stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
