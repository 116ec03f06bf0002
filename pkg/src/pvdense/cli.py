"""Command-line front end: certification, verification, decomposition and
search runs driven by flat ``key = value`` config files.

Exit codes: 0 success or certified, 1 not certified, 2 usage error,
3 hypothesis violation.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .actions import Poly, poly_pullback
from .cubic import certify_theorem14, pulled_back_delta, sign_normalize
from .exact import FieldMismatchError, Matrix, format_scalar, parse_scalar
from .invariants import CASE_REPS, certify_theorem15, invariant_pair, representation, solve_invariants
from .lie import Sl2Triple, lemma13_report, sl2_triple_sym3
from .search import (
    HypothesisError,
    PolynomialValue,
    SearchReport,
    box_scan,
    check_oppenheim,
    form_matrix,
    oppenheim_baseline,
    quadratic_poly,
    walk_search,
)
from .trivector import (
    SEARCH_TRIPLES,
    NotSemistableError,
    Trivector,
    act,
    basis_search,
    certify_theorem11,
    decompose_trivector,
    pair_point,
    plucker,
)

EXIT_OK, EXIT_NOT_CERTIFIED, EXIT_USAGE, EXIT_HYPOTHESIS = 0, 1, 2, 3

CASES = ("CUBIC4", "SYM4", "ADJ_SL3", "TRIVECTOR", "BASELINE")
CASE_DIM = {"CUBIC4": 4, "SYM4": 5, "ADJ_SL3": 8, "TRIVECTOR": 6}
KEYS = {
    "case", "d", "g", "targets", "R", "budget", "eps", "seed", "mode", "method",
    "form", "form_matrix", "trivector", "y", "out", "workers", "x0", "restarts",
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    case: str = "CUBIC4"
    d: int | None = None
    g: Matrix | np.ndarray | None = None
    targets: list[float] = field(default_factory=list)
    radii: list[int] = field(default_factory=lambda: [10])
    budget: int = 10_000
    eps: float | None = None
    seed: int = 0
    mode: str = "exact"
    method: str = "box"
    form: Matrix | None = None
    trivector: Trivector | None = None
    y: list[float] | None = None
    out: Path | None = None
    workers: int = 1
    x0: tuple[int, ...] | None = None
    restarts: int = 2

    @property
    def radius(self) -> int:
        return max(self.radii)


# ---------------------------------------------------------------------------
# config parsing


def read_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {n}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def _scalar(text: str, d: int | None, mode: str):
    text = text.strip()
    if mode == "float":
        try:
            return float(text)
        except ValueError:
            return float(parse_scalar(text, d))
    return parse_scalar(text, d)


def _real(text: str) -> float:
    t = text.strip().lower()
    sign = -1.0 if t.startswith("-") else 1.0
    if t.lstrip("+-") == "pi":
        return sign * math.pi
    if t.lstrip("+-") == "e":
        return sign * math.e
    try:
        return float(t)
    except ValueError:
        return float(parse_scalar(text))


def parse_matrix(text: str, d: int | None = None, mode: str = "exact", n: int | None = None):
    """Rows separated by ';', entries by ','.  Also 'I' and 'diag(a, b, ...)'."""
    text = text.strip()
    if text.upper() in ("I", "IDENTITY"):
        if n is None:
            raise UsageError("the identity shorthand needs a known dimension")
        rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    elif m := re.fullmatch(r"diag\((.*)\)", text, flags=re.IGNORECASE):
        entries = [_scalar(t, d, mode) for t in m.group(1).split(",")]
        k = len(entries)
        rows = [[entries[i] if i == j else 0 for j in range(k)] for i in range(k)]
    else:
        rows = [[_scalar(t, d, mode) for t in row.split(",")] for row in text.split(";") if row.strip()]
    if len({len(r) for r in rows}) != 1 or len(rows) != len(rows[0]):
        raise UsageError("g must be a square matrix")
    if mode == "float":
        return np.array(rows, dtype=float)
    return Matrix(rows)


def build_config(values: dict[str, str]) -> RunConfig:
    unknown = set(values) - KEYS
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    cfg = RunConfig()
    try:
        cfg.case = values.get("case", cfg.case).strip().upper()
        if cfg.case not in CASES:
            raise UsageError(f"case must be one of {', '.join(CASES)}")
        cfg.mode = values.get("mode", cfg.mode).strip().lower()
        if cfg.mode not in ("exact", "float"):
            raise UsageError("mode must be 'exact' or 'float'")
        cfg.method = values.get("method", cfg.method).strip().lower()
        if cfg.method not in ("box", "walk"):
            raise UsageError("method must be 'box' or 'walk'")
        if "d" in values:
            cfg.d = int(values["d"])
        n = CASE_DIM.get(cfg.case)
        if "g" in values:
            cfg.g = parse_matrix(values["g"], cfg.d, cfg.mode, n)
            if n is not None and cfg.g.shape != (n, n):
                raise UsageError(f"{cfg.case} needs a {n}x{n} matrix g, got {cfg.g.shape[0]}x{cfg.g.shape[1]}")
        if "targets" in values:
            cfg.targets = [_real(t) for t in values["targets"].split(",") if t.strip()]
        if "R" in values:
            cfg.radii = sorted({int(r) for r in values["R"].split(",")})
            if cfg.radii[0] < 1:
                raise UsageError("R must be >= 1")
        for key in ("budget", "seed", "workers", "restarts"):
            if key in values:
                setattr(cfg, key, int(values[key]))
        if "eps" in values:
            cfg.eps = _real(values["eps"])
            if cfg.eps <= 0:
                raise UsageError("eps must be positive")
        if "form" in values:
            cfg.form = form_matrix([parse_scalar(t, cfg.d) for t in values["form"].split(",")])
        if "form_matrix" in values:
            cfg.form = parse_matrix(values["form_matrix"], cfg.d)
        if "trivector" in values:
            cfg.trivector = load_trivector(values["trivector"], cfg.d)
        if "y" in values:
            cfg.y = [_real(t) for t in values["y"].split(",")]
            if len(cfg.y) != len(SEARCH_TRIPLES):
                raise UsageError(f"y needs {len(SEARCH_TRIPLES)} values")
        if "x0" in values:
            cfg.x0 = tuple(int(t) for t in values["x0"].split(","))
        if "out" in values:
            cfg.out = Path(values["out"])
    except (FieldMismatchError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc)) from exc
    return cfg


def load_trivector(spec: str, d: int | None = None) -> Trivector:
    """A path to a file of 20 scalars, or the scalars inline."""
    path = Path(spec)
    text = path.read_text() if path.exists() else spec
    lines = [ln.split("#", 1)[0] for ln in text.splitlines()]
    return Trivector.parse(" ".join(lines), d)


def _config_from_args(args) -> RunConfig:
    values: dict[str, str] = {}
    if getattr(args, "config", None):
        try:
            values.update(read_config_text(Path(args.config).read_text()))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise UsageError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        values[k.strip()] = v.strip()
    return build_config(values)


# ---------------------------------------------------------------------------
# commands


def _require_g(cfg: RunConfig):
    if cfg.g is None:
        raise UsageError(f"{cfg.case} needs a matrix g")
    return cfg.g


def _trivector_of(cfg: RunConfig) -> Trivector:
    if cfg.trivector is not None:
        x = cfg.trivector
        return act(cfg.g, x) if isinstance(cfg.g, Matrix) else x
    if isinstance(cfg.g, Matrix):
        return act(cfg.g, Trivector.standard())
    raise UsageError("TRIVECTOR needs a trivector or a matrix g")


def cmd_certify(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.mode == "float":
        raise UsageError(
            "certification needs exact input; recover exact entries first "
            "(pvdense.exact.rational_reconstruct) and rerun in exact mode"
        )
    if cfg.case == "BASELINE":
        if cfg.form is None:
            raise UsageError("BASELINE needs form or form_matrix")
        check_oppenheim(cfg.form)
        return EXIT_OK, {"case": "BASELINE", "hypotheses": "irrational, indefinite, non-degenerate, n >= 3"}
    if cfg.case == "CUBIC4":
        g, flipped = sign_normalize(_require_g(cfg))
        doc = certify_theorem14(g).as_dict()
        doc["det_sign_normalized"] = flipped
        ok = doc["sufficiently_irrational"]
    elif cfg.case in ("SYM4", "ADJ_SL3"):
        cert = certify_theorem15(_require_g(cfg), cfg.case)
        doc, ok = cert.as_dict(), cert.sufficiently_irrational
    else:
        cert = certify_theorem11(_trivector_of(cfg))
        doc, ok = cert.as_dict(), cert.sufficiently_irrational
    return (EXIT_OK if ok else EXIT_NOT_CERTIFIED), doc


def value_function(cfg: RunConfig):
    """The polynomial searched over primitive points for the configured case."""
    if cfg.case == "BASELINE":
        if cfg.form is None:
            raise UsageError("BASELINE needs form or form_matrix")
        check_oppenheim(cfg.form)
        return PolynomialValue(quadratic_poly(cfg.form), name="Q")
    g = _require_g(cfg)
    if cfg.case == "CUBIC4":
        base = pulled_back_delta(Matrix.identity(4))
    elif cfg.case in ("SYM4", "ADJ_SL3"):
        base = invariant_pair(CASE_REPS[cfg.case]).F
    else:
        raise UsageError(f"no value function for {cfg.case}")
    if isinstance(g, np.ndarray):
        return FloatPullbackValue(base, g)
    if cfg.case == "CUBIC4":
        return PolynomialValue(pulled_back_delta(g), name="Delta(g^-1 x)")
    return PolynomialValue(poly_pullback(base, g), name="F(g^-1 x)")


class FloatPullbackValue:
    """x -> P(g^-1 x) in double precision for a float matrix g."""

    def __init__(self, poly: Poly, g: np.ndarray):
        self.n = poly.n
        self.name = "float pullback"
        self.ginv = np.linalg.inv(g)
        self.exps = np.array(list(poly.coeffs), dtype=np.int64)
        self.coef = np.array([float(c) for c in poly.coeffs.values()])

    def batch(self, pts: np.ndarray) -> np.ndarray:
        y = np.asarray(pts, dtype=float) @ self.ginv.T
        mono = np.prod(y[:, None, :] ** self.exps[None, :, :], axis=2)
        return mono @ self.coef

    def __call__(self, x) -> float:
        return float(self.batch(np.asarray([x]))[0])


def _report_stem(case: str, tag: str, k: int) -> str:
    return f"{case}_{tag}_t{k}"


def write_reports(reports: list[tuple[str, SearchReport]], out: Path) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for stem, rep in reports:
        p = out / f"{stem}.json"
        p.write_text(rep.to_json() + "\n")
        (out / f"{stem}.csv").write_text(rep.trace_csv())
        written.append(p)
    return written


def cmd_search(cfg: RunConfig) -> tuple[int, list[tuple[str, SearchReport]]]:
    if cfg.case == "TRIVECTOR":
        if cfg.y is None:
            raise UsageError("TRIVECTOR search needs y (10 targets)")
        x = _trivector_of(cfg)
        rep = basis_search(
            x, cfg.y, cfg.eps or 1e-6, cfg.budget, seed=cfg.seed, restarts=cfg.restarts, workers=cfg.workers
        )
        return EXIT_OK, [("TRIVECTOR_basis", rep)]
    if not cfg.targets:
        raise UsageError("search needs at least one target")
    f = value_function(cfg)
    named: list[tuple[str, SearchReport]] = []
    if cfg.method == "walk":
        x0 = cfg.x0 or ((1, 0, 1, 0) if cfg.case == "CUBIC4" else (1,) + (0,) * (f.n - 1))
        if len(x0) != f.n:
            raise UsageError(f"x0 needs {f.n} coordinates")
        reps = walk_search(f, x0, cfg.targets, cfg.budget, seed=cfg.seed, case=cfg.case)
        named = [(_report_stem(cfg.case, "walk", k), r) for k, r in enumerate(reps)]
    else:
        scan = box_scan(f, cfg.radii, cfg.targets, case=cfg.case, workers=cfg.workers)
        for r in cfg.radii:
            named += [(_report_stem(cfg.case, f"R{r}", k), rep) for k, rep in enumerate(scan[r])]
    return EXIT_OK, named


def cmd_baseline(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.form is None:
        raise UsageError("baseline needs form or form_matrix")
    if not cfg.targets:
        raise UsageError("baseline needs at least one target")
    res = oppenheim_baseline(cfg.form, cfg.targets, cfg.radius, workers=cfg.workers)
    doc = {
        "case": "BASELINE",
        "R": cfg.radius,
        "curve": {repr(t): [[r, e] for r, e in c] for t, c in res.curve.items()},
        "reports": [r.to_dict() for r in res.reports],
    }
    return EXIT_OK, doc


def cmd_lemma13(scale_e=None) -> tuple[int, dict]:
    t = sl2_triple_sym3()
    if scale_e is not None:
        t = Sl2Triple(t.E.scale(scale_e), t.H, t.F)
    doc = lemma13_report(t)
    return (EXIT_OK if doc["passed"] else EXIT_NOT_CERTIFIED), doc


def _vectors(vs) -> list[list[str]]:
    return [[format_scalar(c) for c in v] for v in vs]


def cmd_decompose(x: Trivector) -> tuple[int, dict]:
    dec = decompose_trivector(x)
    doc: dict = {"lambda": format_scalar(dec.lam), "reality": dec.reality}
    if dec.reality == "REAL_SPLIT":
        p1, p2 = plucker(dec.e1), plucker(dec.e2)
        doc.update(
            E1=_vectors(dec.e1),
            E2=_vectors(dec.e2),
            omega1=dec.omega1.to_text(),
            omega2=dec.omega2.to_text(),
            plucker_E1=[format_scalar(c) for c in p1.normalized()],
            plucker_E2=[format_scalar(c) for c in p2.normalized()],
            pair_point=[format_scalar(c) for c in pair_point(p1, p2).normalized()],
        )
    else:
        doc["stable_planes"] = [_vectors(p) for p in dec.planes]
    doc["certificate"] = certify_theorem11(x).as_dict()
    return EXIT_OK, doc


def cmd_invariants(reps: Sequence[str] = ("SYM3", "SYM4", "ADJOINT_SL3")) -> tuple[int, dict]:
    doc = {}
    for name in reps:
        rep = representation(name)
        entry = {"dim": rep.dim}
        for deg in (2, 3, 4):
            if name == "SYM3" and deg != 4:
                continue
            polys = solve_invariants(name, deg)
            entry[f"degree_{deg}"] = [p.to_text() for p in polys]
        doc[name] = entry
    return EXIT_OK, doc


def list_cases() -> str:
    data = json.loads(resources.files("pvdense").joinpath("data/cases.json").read_text())
    lines = ["Irreducible reduced regular prehomogeneous vector spaces (split forms)", ""]
    for e in data["classification"]:
        extra = f"  [{e['note']}]" if "note" in e else ""
        lines.append(f"({e['case']:>2})  G = {e['group']:<24} V = {e['space']}{extra}")
    lines += ["", "Auxiliary varieties X_F (cases (1) and (29) excluded)", ""]
    for e in data["x_f"]:
        lines.append(f"({e['case']})  " + ", ".join(e["varieties"]))
    lines += ["", "Implemented here", ""]
    for k, v in data["implemented"].items():
        lines.append(f"{k:<10} {v}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# entry point


def _table(named: list[tuple[str, SearchReport]]) -> str:
    rows = [("report", "R/budget", "target", "error", "best_value", "evaluations")]
    for stem, r in named:
        target = "vector" if isinstance(r.target, list) else f"{r.target:.6g}"
        value = "vector" if isinstance(r.best_value, list) else f"{r.best_value:.10g}"
        rows.append((stem, str(r.radius_or_budget), target, f"{r.error:.6g}", value, str(r.evaluations)))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows)


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pvdense", description=__doc__.split("\n\n")[0])
    p.add_argument("--list-cases", action="store_true", help="print the classification table and exit")
    sub = p.add_subparsers(dest="command")

    def with_config(sp):
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
        return sp

    with_config(sub.add_parser("certify", help="sufficient-irrationality certificate"))
    with_config(sub.add_parser("search", help="box or walk search, JSON reports"))
    with_config(sub.add_parser("baseline", help="quadratic-form baseline curve"))
    lem = sub.add_parser("lemma13", help="verify the sl(4) decomposition and bracket generation")
    lem.add_argument("--scale-e", help="multiply E by this scalar (tamper check)")
    dec = sub.add_parser("decompose", help="split a trivector into two decomposable parts")
    dec.add_argument("trivector_file")
    dec.add_argument("--d", type=int, default=None, help="field parameter for sqrt entries")
    inv = sub.add_parser("invariants", help="print derived invariant generators")
    inv.add_argument("--rep", action="append", choices=["SYM3", "SYM4", "ADJOINT_SL3"])
    return p


def _emit(doc) -> None:
    print(json.dumps(doc, indent=2))


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if args.list_cases:
        print(list_cases())
        return EXIT_OK
    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        if args.command == "lemma13":
            scale = parse_scalar(args.scale_e) if args.scale_e else None
            code, doc = cmd_lemma13(scale)
            _emit(doc)
            return code
        if args.command == "decompose":
            try:
                x = load_trivector(args.trivector_file, args.d)
            except OSError as exc:
                raise UsageError(str(exc)) from exc
            code, doc = cmd_decompose(x)
            _emit(doc)
            return code
        if args.command == "invariants":
            code, doc = cmd_invariants(args.rep or ("SYM3", "SYM4", "ADJOINT_SL3"))
            _emit(doc)
            return code
        cfg = _config_from_args(args)
        if args.command == "certify":
            code, doc = cmd_certify(cfg)
            _emit(doc)
            return code
        if args.command == "baseline":
            code, doc = cmd_baseline(cfg)
            _emit(doc)
            return code
        code, named = cmd_search(cfg)
        print(_table(named))
        if cfg.out is not None:
            paths = write_reports(named, cfg.out)
            print(f"wrote {len(paths)} reports to {cfg.out}")
        return code
    except HypothesisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NotSemistableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except (UsageError, FieldMismatchError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
