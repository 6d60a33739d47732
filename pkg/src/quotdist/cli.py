"""Command-line front end.

    quotdist verify    [--field F] [--max-q 9] [--max-n 4]
    quotdist count     --field F --dim d --set SRC [--r all|1,2]
    quotdist bounds    --field F --dim d [--trials N --sizes lo:hi | --set SRC]
    quotdist sharpness --field F --dim d [--set sharpness:even|odd-iii|odd-ii[:delta=x]]
    quotdist fourier   --field F --dim d --set SRC|sphere[:t=k]|H:a=..|V:r=k

Exit status: 0 when everything checked holds, 1 on a verification failure,
2 on usage, parameter or budget errors.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import sys
from pathlib import Path

from . import __version__
from .counting import distance_histogram, w_from_histogram
from .errors import InternalConsistencyError, ResourceError
from .field import FiniteField, parse_field
from .forms import as_standard, parse_form
from .fourier import (
    PointSet,
    RatioSpec,
    all_points,
    closed_H_table,
    closed_sphere0_table,
    closed_VQr_table,
    diagonal_variety,
    fourier_set_table,
    product_variety,
    read_point_set,
    sphere,
)
from .harness import (
    bounds_sweep,
    build_sharpness_even,
    build_sharpness_odd_ii,
    build_sharpness_odd_iii,
    evaluate_set,
    evaluation_report,
    minimum_size,
    random_subset,
    trial_rng,
)
from .verify import VerifyGrid, run_grid

COMMANDS = ("verify", "count", "bounds", "sharpness", "fourier")


class UsageError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class RunConfig:
    command: str
    field: str | None = None
    form: str = "euclidean"
    dim: int | None = None
    set: str | None = None
    seed: int = 0
    format: str = "json"
    budget: int | None = None
    r: str = "all"
    trials: int = 20
    sizes: str | None = None
    max_q: int = 9
    max_n: int = 4
    samples: int = 20
    out: str | None = None
    threads: int = 1
    inject_fault: bool = False

    # out and threads never change a report's content
    REPORT_EXCLUDE = ("out", "threads")

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise UsageError(f"format must be json or csv, got {self.format!r}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")
        if self.threads < 1:
            raise UsageError("threads must be positive")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def report_dict(self) -> dict:
        return {k: v for k, v in self.to_dict().items() if k not in self.REPORT_EXCLUDE}

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config or report file whose embedded config is re-run")
    common.add_argument("--field", help="p^ell, p^ell:modulus or q (e.g. 7, 3^2, 3^2:1,0,1)")
    common.add_argument("--form", help="euclidean | standard:eps=<k> | path to a form file")
    common.add_argument("--dim", type=int, help="dimension d of the form")
    common.add_argument("--set", help="point-set file | random:<size> | empty | full | sharpness:<kind>[:k=v]")
    common.add_argument("--seed", type=int, help="master seed (64-bit unsigned)")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--threads", type=int)
    common.add_argument("--budget", type=int, help="maximum character evaluations per transform table")

    parser = argparse.ArgumentParser(prog="quotdist", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the exact identity suites")
    p.add_argument("--max-q", type=int, dest="max_q")
    p.add_argument("--max-n", type=int, dest="max_n")
    p.add_argument("--samples", type=int, help="coefficient vectors per (q, n)")
    p.add_argument("--inject-fault", action="store_true", dest="inject_fault", help=argparse.SUPPRESS)

    p = sub.add_parser("count", parents=[common], help="W(r), M(r), w(0) for a point set")
    p.add_argument("--r", help="comma-separated canonical indices, or 'all'")

    p = sub.add_parser("bounds", parents=[common], help="check the lower bounds on random or given sets")
    p.add_argument("--trials", type=int)
    p.add_argument("--sizes", help="lo:hi set sizes (default: from the theorem's size threshold)")

    sub.add_parser("sharpness", parents=[common], help="build and check a sharpness construction")
    sub.add_parser("fourier", parents=[common], help="dump a scaled Fourier table")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    base: dict = {"command": args.command}
    if args.config:
        data = json.loads(Path(args.config).read_text())
        data = data.get("config", data)
        if data.get("command", args.command) != args.command:
            raise UsageError(f"config is for {data['command']!r}, not {args.command!r}")
        base.update(data)
    for name in (f.name for f in dataclasses.fields(RunConfig)):
        value = getattr(args, name, None)
        if name != "command" and value is not None and value is not False:
            base[name] = value
    return RunConfig.from_dict(base)


# -- shared helpers ------------------------------------------------------------------

def _field(cfg: RunConfig) -> FiniteField:
    if cfg.field is None:
        raise UsageError("--field is required")
    return parse_field(cfg.field)


def _dim(cfg: RunConfig) -> int | None:
    """--dim, or the dimension recorded in a point-set file's header."""
    if cfg.dim is not None:
        return cfg.dim
    if cfg.set and Path(cfg.set).is_file():
        first = Path(cfg.set).read_text().split("\n", 1)[0].split()
        if first:
            return int(first[0])
    return None


def _form(cfg: RunConfig, field: FiniteField, dim: int | None = None):
    return parse_form(cfg.form, field, dim if dim is not None else _dim(cfg))


def _options(parts: list[str]) -> dict:
    out = {}
    for part in parts:
        key, sep, val = part.partition("=")
        if not sep:
            raise UsageError(f"malformed option {part!r}; expected key=value")
        out[key] = val
    return out


def load_set(cfg: RunConfig, field: FiniteField, dim: int | None) -> PointSet:
    src = cfg.set
    if src is None:
        raise UsageError("--set is required")
    head, *rest = src.split(":")
    if head == "random":
        if dim is None or len(rest) != 1:
            raise UsageError("random:<size> needs --dim")
        return random_subset(field, dim, int(rest[0]), trial_rng(cfg.seed, 0))
    if head in ("empty", "full"):
        if dim is None:
            raise UsageError(f"{head} needs --dim")
        return PointSet.empty(field, dim) if head == "empty" else PointSet.full(field, dim)
    if head == "sharpness":
        return build_sharpness(cfg, field, dim).points
    path = Path(src)
    if not path.exists():
        raise UsageError(f"set source {src!r} is not a known keyword or an existing file")
    S = read_point_set(path, field)
    if dim is not None and S.n != dim:
        raise UsageError(f"point-set file has n={S.n}, --dim is {dim}")
    return S


def build_sharpness(cfg: RunConfig, field: FiniteField, dim: int | None):
    if dim is None:
        raise UsageError("sharpness constructions need --dim")
    src = cfg.set or ("sharpness:even" if dim % 2 == 0 else "sharpness:odd-iii")
    head, *rest = src.split(":")
    if head != "sharpness" or not rest:
        raise UsageError(f"expected sharpness:<kind>, got {src!r}")
    kind, opts = rest[0], _options(rest[1:])
    eps = as_standard(_form(cfg, field, dim)).epsilon
    if kind == "even":
        return build_sharpness_even(field, dim, eps)
    if kind == "odd-iii":
        return build_sharpness_odd_iii(field, dim, eps)
    if kind in ("odd-ii", "odd-ii-delta"):
        return build_sharpness_odd_ii(field, dim, float(opts.get("delta", "0.25")), eps)
    raise UsageError(f"unknown sharpness kind {kind!r}; use even, odd-iii or odd-ii")


def parse_ratios(text: str, field: FiniteField) -> list[int]:
    if text == "all":
        return list(range(1, field.q))
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            r = int(tok)
        except ValueError:
            raise UsageError(f"malformed r index {tok!r}") from None
        if not 0 <= r < field.q:
            raise UsageError(f"r index {r} outside [0, {field.q})")
        if r == 0:
            raise UsageError("r = 0 is not allowed: W(r) needs a nonzero ratio, "
                             "every quadruple is counted with nonzero denominator Q(z - w)")
        out.append(r)
    return out


def header(cfg: RunConfig, field: FiniteField | None) -> dict:
    out = {"config": cfg.report_dict(), "version": __version__}
    if field is not None:
        out["field"] = field.spec_string()
        out["modulus"] = list(field.modulus)
    return out


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def dump_csv(meta: dict, columns: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    for key in ("field", "modulus", "version"):
        if key in meta:
            buf.write(f"# {key}: {meta[key]}\n")
    buf.write(f"# config: {json.dumps(meta['config'], sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def emit(cfg: RunConfig, text: str, stdout) -> None:
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        stdout.write(text)


# -- commands ------------------------------------------------------------------------

def cmd_verify(cfg: RunConfig, stdout, stderr) -> int:
    grid = VerifyGrid(max_q=cfg.max_q, max_n=cfg.max_n, samples=cfg.samples, seed=cfg.seed)
    field = _field(cfg) if cfg.field is not None else None
    fields = [field] if field is not None else grid.fields()
    results = run_grid(grid, cfg.budget, cfg.inject_fault, fields=fields)
    failures = [f for r in results for f in r.failures]
    for f in failures:
        stderr.write(str(f) + "\n")
    summary = {"suites": [r.to_dict() for r in results], "passed": not failures,
               "checks": sum(r.checks for r in results)}
    meta = header(cfg, field)
    if cfg.format == "csv":
        rows = [[r.suite, r.q, r.n, r.checks, r.passed] for r in results]
        text = dump_csv(meta, ["suite", "q", "n", "checks", "passed"], rows)
    else:
        text = dump_json({**meta, **summary})
    emit(cfg, text, stdout)
    stderr.write(f"{'PASS' if not failures else 'FAIL'}: {summary['checks']} checks, "
                 f"{len(failures)} failures\n")
    return 0 if not failures else 1


def cmd_count(cfg: RunConfig, stdout, stderr) -> int:
    field = _field(cfg)
    form = _form(cfg, field)
    ratios = parse_ratios(cfg.r, field)
    E = load_set(cfg, field, form.dim)
    hist = distance_histogram(E, form)
    reports = [w_from_histogram(hist, r) for r in ratios]
    meta = header(cfg, field)
    if cfg.format == "csv":
        text = dump_csv(meta, ["r", "W", "M", "w0"], [[c.r, c.W, c.M, c.w0] for c in reports])
    else:
        text = dump_json({**meta, "size": len(E), "histogram": list(hist.counts),
                          "reports": [c.to_dict() for c in reports]})
    emit(cfg, text, stdout)
    return 0


def _default_sizes(field: FiniteField, dim: int) -> tuple[int, int]:
    total = field.q**dim
    part = "i" if dim % 2 == 0 else "ii"
    lo = min(minimum_size(part, field.q, dim), total)
    return lo, min(total, lo + max(5, lo // 4))


def _parse_sizes(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise UsageError(f"--sizes expects lo:hi, got {text!r}") from None
    return lo, hi


def _bound_rows(trials: list[dict]) -> list[list]:
    rows = []
    for t in trials:
        for b in t["bounds"]:
            rows.append([t.get("trial", 0), t["size"], b["part"], b["case"], b["r"], b["W"],
                         b["theorem_bound"], b["case_rhs"], b["reduced_rhs"],
                         b["size_condition_met"], b["hypothesis_met"], b["passed"]])
    return rows


BOUND_COLUMNS = ["trial", "size", "part", "case", "r", "W", "theorem_bound", "case_rhs", "reduced_rhs",
                 "size_condition_met", "hypothesis_met", "passed"]


def cmd_bounds(cfg: RunConfig, stdout, stderr) -> int:
    field = _field(cfg)
    form = _form(cfg, field)
    meta = header(cfg, field)
    if cfg.set is not None:
        E = load_set(cfg, field, form.dim)
        rep = {"trial": 0, "points": E.indices.tolist(), **evaluation_report(evaluate_set(E, form))}
        body = {"form": as_standard(form).describe(), "seed": cfg.seed, "trials": [rep],
                "aggregate_pass": rep["passed"]}
    else:
        sizes = _parse_sizes(cfg.sizes) if cfg.sizes else _default_sizes(field, form.dim)
        body = bounds_sweep(field, form, sizes, cfg.trials, cfg.seed, cfg.threads)
    body.update(meta)
    if cfg.format == "csv":
        text = dump_csv(meta, BOUND_COLUMNS, _bound_rows(body["trials"]))
    else:
        text = dump_json(body)
    emit(cfg, text, stdout)
    if not body["aggregate_pass"]:
        stderr.write("FAIL: a bound check did not hold\n")
        return 1
    return 0


def cmd_sharpness(cfg: RunConfig, stdout, stderr) -> int:
    field = _field(cfg)
    dim = _dim(cfg) if _dim(cfg) is not None else _form(cfg, field).dim
    spec = build_sharpness(cfg, field, dim)
    result = spec.verify()
    meta = header(cfg, field)
    hist = distance_histogram(spec.points, spec.form)
    rows = []
    for r in field.nonzero():
        W = w_from_histogram(hist, r).W
        rows.append([r.index, W, W > 0, field.eta(r) == 1])
    if cfg.format == "csv":
        text = dump_csv(meta, ["r", "W", "in_quotient", "is_square"], rows)
    else:
        text = dump_json({**meta, **result, "form": spec.form.describe(), "points": spec.points.indices.tolist()})
    emit(cfg, text, stdout)
    ok = result["quotient_within_squares"] and result["size"] == result["expected_size"]
    if spec.kind != "odd-ii":
        ok = ok and result["quotient_is_squares"]
    return 0 if ok else 1


def _variety(cfg: RunConfig, field: FiniteField):
    """(PointSet, closed-form integer table or None) for a variety source, else None."""
    head, *rest = (cfg.set or "").split(":")
    opts = _options(rest) if head in ("sphere", "H", "V") else {}
    if head == "sphere":
        form = as_standard(_form(cfg, field))
        t = int(opts.get("t", 0))
        closed = closed_sphere0_table(form) if t == 0 else None
        return sphere(form, t), closed
    if head == "H":
        if "a" not in opts:
            raise UsageError("H variety needs a=<c1>,<c2>,...")
        a = [int(v) for v in opts["a"].split(",")]
        return diagonal_variety(field, a), closed_H_table(field, a)
    if head == "V":
        form = as_standard(_form(cfg, field))
        spec = RatioSpec(field(int(opts.get("r", 1))), form)
        return product_variety(spec), closed_VQr_table(spec)
    return None


def cmd_fourier(cfg: RunConfig, stdout, stderr) -> int:
    field = _field(cfg)
    found = _variety(cfg, field)
    if found is None:
        S, closed = load_set(cfg, field, _dim(cfg)), None
    else:
        S, closed = found
    table = fourier_set_table(S, cfg.budget)
    canon = table.canonical()
    pts = all_points(field.q, S.n)
    rows = []
    for i in range(len(canon)):
        value = table.value(i).value
        z = value.to_complex()
        exact = closed is not None and int(canon[i, 0]) == int(closed[i]) and not canon[i, 1:].any()
        rows.append([i, " ".join(str(int(c)) for c in pts[i]), " ".join(str(int(c)) for c in canon[i]),
                     f"{z.real:.12g}", f"{z.imag:.12g}",
                     "" if closed is None else int(closed[i]), "" if closed is None else exact])
    meta = header(cfg, field)
    columns = ["m_index", "m", "coeffs", "re", "im", "closed_form", "closed_matches"]
    if cfg.format == "csv":
        text = dump_csv(meta, columns, rows)
    else:
        text = dump_json({**meta, "n": S.n, "size": len(S), "columns": columns, "rows": rows})
    emit(cfg, text, stdout)
    if closed is not None and not all(r[-1] for r in rows):
        stderr.write("FAIL: closed form differs from the brute-force transform\n")
        return 1
    return 0


HANDLERS = {"verify": cmd_verify, "count": cmd_count, "bounds": cmd_bounds,
            "sharpness": cmd_sharpness, "fourier": cmd_fourier}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        return HANDLERS[cfg.command](cfg, stdout, stderr)
    except InternalConsistencyError as exc:
        stderr.write(f"internal consistency failure: {exc}\n")
        return 1
    except (ValueError, ResourceError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return 2


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ValueError, TypeError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
