"""Command-line front end.

    treemono sweep      --model bounded3 --p 2 --kmax 5 --functional G,W,N
    treemono verify     --model needweight3 --kmax 10
    treemono oracle-diff --model double_half3 --p 3 --kmax 12
    treemono plot-data  --model linear2 --a 1 --b 2 --functional W --kmax 10

Exit codes: 0 pass, 1 configuration error, 2 verification failure,
3 runtime or depth error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from gmpy2 import mpq

from . import __version__
from .builtins import BUILTIN_NAMES, builtin_model
from .errors import ConfigError, SplitterSumError, TreeMonoError
from .functionals import (
    AGGREGATE_NAMES,
    SERIES_RANGES,
    FunctionalSeries,
    monotonicity_report,
    series,
    weiss,
)
from .identities import CheckResult, FAIL, PASS, SuiteReport, identity_suite
from .model import build_model, check_harmonic, model_spec_from_dict
from .oracles import FAMILIES, OracleFamily, oracle_diff, required_depth
from .scalar import NumberMode, decimal_string, exact_string, integral_exponent, to_rational
from .splitters import PerturbedSplit

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_RUNTIME = 0, 1, 2, 3

FUNCTIONAL_CHOICES = ("G", "W", "N", "F", "E", "aggregates")
CSV_COLUMNS = ("k", "functional", "value_exact", "value_decimal", "monotone_ok")


@dataclass
class RunConfig:
    command: str
    model: str | None = None
    model_file: str | None = None
    d: int | None = None
    p: object = 2
    k_max: int | None = None
    mode: NumberMode = field(default_factory=NumberMode)
    seed: int = 0
    functionals: tuple = ("G", "W", "N")
    out: str | None = None
    format: str = "csv"
    a: str = "1"
    b: str = "0"
    c: str = "0"
    tied: bool = False
    enumerated: bool = False
    samples: int = 1000
    perturb: bool = False

    def validate(self):
        if (self.model is None) == (self.model_file is None):
            raise ConfigError("give exactly one of --model or --model-file")
        if self.model is not None and self.model not in BUILTIN_NAMES:
            raise ConfigError(f"unknown model {self.model!r}; choose from {', '.join(BUILTIN_NAMES)}")
        self.p = self.mode.exponent(self.p)
        for name in self.functionals:
            if name not in FUNCTIONAL_CHOICES:
                raise ConfigError(f"unknown functional {name!r}; choose from {', '.join(FUNCTIONAL_CHOICES)}")
        if self.k_max is not None and self.k_max < 1:
            raise ConfigError("--kmax must be at least 1")
        if self.format not in ("csv", "json", "tsv"):
            raise ConfigError(f"unknown format {self.format!r}")
        return self


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("model")
    src.add_argument("--model", choices=BUILTIN_NAMES, help="built-in model")
    src.add_argument("--model-file", help="model-definition JSON file")
    src.add_argument("--d", type=int, help="degree (random/constant models; checked for fixed families)")
    src.add_argument("--seed", type=int, default=0)
    src.add_argument("--a", default="1", help="slope of the linear2 family")
    src.add_argument("--b", default="0", help="offset of the linear2 family")
    src.add_argument("--c", default="0", help="value of the constant model")
    src.add_argument("--tied", action="store_true", help="random splitter shares one sample among free children")
    src.add_argument("--enumerated", action="store_true", help="keep every vertex instead of class multiplicities")
    run = common.add_argument_group("evaluation")
    run.add_argument("--p", default="2", help="exponent (non-integer needs --mode float)")
    run.add_argument("--kmax", type=int, default=None, help="largest index / model depth (default 10)")
    run.add_argument("--mode", choices=("exact", "float"), default="exact")
    run.add_argument("--precision", type=int, default=128, help="float mode mantissa bits")
    run.add_argument("--functional", default=None, help="comma list of G,W,N,F,E,aggregates")
    run.add_argument("--samples", type=int, default=1000, help="random tuples for scalar identity checks")
    run.add_argument("--out", help="output file (default stdout)")
    run.add_argument("--format", choices=("csv", "json", "tsv"), default=None)
    run.add_argument("--perturb", action="store_true", help=argparse.SUPPRESS)

    ap = argparse.ArgumentParser(prog="treemono", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"treemono {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    sub.add_parser("sweep", parents=[common], help="tabulate functionals")
    sub.add_parser("verify", parents=[common], help="run identity and monotonicity checks")
    sub.add_parser("oracle-diff", parents=[common], help="compare engine with closed forms")
    sub.add_parser("plot-data", parents=[common], help="TSV (k, value) pairs for plotting")
    return ap


def _config(ns: argparse.Namespace) -> RunConfig:
    default_functionals = {"sweep": "G,W,N", "verify": "G,W,N,F", "oracle-diff": "", "plot-data": "G"}
    text = ns.functional if ns.functional is not None else default_functionals[ns.command]
    fmt = ns.format or ("tsv" if ns.command == "plot-data" else "json" if ns.command == "verify" else "csv")
    return RunConfig(
        command=ns.command,
        model=ns.model,
        model_file=ns.model_file,
        d=ns.d,
        p=ns.p,
        k_max=ns.kmax,
        mode=NumberMode(ns.mode, ns.precision),
        seed=ns.seed,
        functionals=tuple(f.strip() for f in text.split(",") if f.strip()),
        out=ns.out,
        format=fmt,
        a=ns.a,
        b=ns.b,
        c=ns.c,
        tied=ns.tied,
        enumerated=ns.enumerated,
        samples=ns.samples,
        perturb=ns.perturb,
    ).validate()


def _read_spec(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read model file {path}: {exc}") from exc


def make_model(cfg: RunConfig, depth: int):
    if cfg.model_file is not None:
        spec = _read_spec(cfg.model_file)
        tree, root, splitter, _ = model_spec_from_dict(spec)
        if cfg.d is not None and cfg.d != tree.d:
            raise ConfigError(f"--d {cfg.d} disagrees with the model file (d={tree.d})")
        name = spec.get("name", Path(cfg.model_file).stem)
    else:
        base = builtin_model(cfg.model, 0, d=cfg.d, a=to_rational(cfg.a), b=to_rational(cfg.b),
                             c=to_rational(cfg.c), seed=cfg.seed, tied=cfg.tied)
        tree, root, splitter, name = base.cfg, base.root, base.splitter, base.name
    compressed = splitter.homogeneous and not cfg.enumerated
    if cfg.perturb:
        splitter = PerturbedSplit(splitter, target=(0,))
        compressed = False
    return build_model(tree, root, splitter, depth, compressed, name=name)


def _k_max(cfg: RunConfig) -> int:
    if cfg.k_max is not None:
        return cfg.k_max
    if cfg.model_file is not None:
        return int(_read_spec(cfg.model_file).get("K", 10))
    return 10


def _expand(functionals) -> list:
    out = []
    for name in functionals:
        for n in (AGGREGATE_NAMES if name == "aggregates" else (name,)):
            if n not in out:
                out.append(n)
    return out


def _all_series(model, cfg: RunConfig, k_max: int) -> list[FunctionalSeries]:
    out = []
    for name in _expand(cfg.functionals):
        first, last = SERIES_RANGES[name]
        if last(k_max) < first:
            continue
        if name in ("W", "C", "R"):
            out.append(series(model, name, 2, k_max))
        else:
            out.append(series(model, name, cfg.p, k_max, cfg.mode))
    return out


def _running_flags(s: FunctionalSeries) -> list:
    flags, ok = [], True
    prev = None
    for _, v in s.items():
        if prev is not None and ok:
            drop = prev - v
            if s.mode.exact:
                ok = not drop > 0
            else:
                ok = not drop > s.mode.rtol * max(abs(prev), abs(v))
        flags.append(ok)
        prev = v
    return flags


def _as_rational(v):
    return v if type(v) is type(mpq()) else mpq(v)


def _rows(all_series) -> list[dict]:
    rows = []
    for s in all_series:
        for (k, v), ok in zip(s.items(), _running_flags(s)):
            rows.append({
                "k": k,
                "functional": s.name,
                "value_exact": exact_string(v),
                "value_decimal": decimal_string(_as_rational(v)),
                "monotone_ok": ok,
            })
    return rows


def _header(cfg: RunConfig, model) -> dict:
    return {
        "d": model.d,
        "p": str(cfg.p),
        "mode": cfg.mode.kind if cfg.mode.exact else f"float({cfg.mode.precision})",
        "seed": cfg.seed,
        "model": model.name,
    }


def render_table(rows, header: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"header": header, "rows": rows}, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, delimiter="," if fmt == "csv" else "\t",
                            lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({**row, "monotone_ok": "true" if row["monotone_ok"] else "false"})
    return buf.getvalue()


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def run_sweep(cfg: RunConfig) -> int:
    k_max = _k_max(cfg)
    model = make_model(cfg, k_max)
    rows = _rows(_all_series(model, cfg, k_max))
    _emit(render_table(rows, _header(cfg, model), cfg.format), cfg.out)
    return EXIT_OK


def emit_plot_data(cfg: RunConfig) -> int:
    k_max = _k_max(cfg)
    model = make_model(cfg, k_max)
    blocks = []
    for s in _all_series(model, cfg, k_max):
        lines = [f"# {s.name} p={s.p} model={model.name}"]
        lines += [f"{k}\t{decimal_string(_as_rational(v))}" for k, v in s.items()]
        blocks.append("\n".join(lines) + "\n")
    _emit("\n".join(blocks), cfg.out)
    return EXIT_OK


def _monotone_check(s: FunctionalSeries) -> CheckResult:
    name = f"monotone_{s.name}"
    if len(s.values) < 2:
        return CheckResult(name, "skip", note="fewer than two values")
    verdict = monotonicity_report(s)
    if verdict.ok:
        return CheckResult(name, PASS, len(s.values), note=verdict.label)
    return CheckResult(name, FAIL, len(s.values),
                       witness={"index": verdict.index, "deficit": exact_string(verdict.deficit)})


def run_verify(cfg: RunConfig) -> int:
    k_max = _k_max(cfg)
    results: list = []
    try:
        model = make_model(cfg, k_max)
    except SplitterSumError as exc:
        results.append(CheckResult("child_sum", FAIL, 1, witness={
            "level": exc.level, "u": exc.value, "u_parent": exc.parent_value,
            "children_sum": sum(exc.children, mpq(0)), "expected": exc.expected}))
        return _verify_out(cfg, None, SuiteReport(results))

    verdict = check_harmonic(model)
    if verdict.ok:
        results.append(CheckResult("child_sum", PASS, model.depth))
    else:
        results.append(CheckResult(verdict.check, FAIL, 1, witness={
            "level": verdict.level, "class": verdict.cls, "message": verdict.message}))

    p_values = [1, 2, 3]
    n = integral_exponent(cfg.p)
    if n is not None and n not in p_values:
        p_values.append(n)
    suite = identity_suite(model, k_max - 1, p_values=tuple(p_values), samples=cfg.samples, seed=cfg.seed)
    results.extend(suite.results)

    names = _expand(cfg.functionals)
    for name in ("G", "N", "W", "F"):
        if name not in names:
            continue
        ps = [2] if name == "W" else sorted({1, 2, 3} | ({n} if n is not None else set()))
        if not cfg.mode.exact and name != "W":
            ps = [cfg.p]
        for p in ps:
            mode = NumberMode() if name == "W" or n is not None else cfg.mode
            s = series(model, name, p, k_max, mode)
            if name == "N":
                # the step from k = 0 is not monotone in general; the root
                # step is checked by almgren_root_step instead
                s = FunctionalSeries(s.name, s.p, 1, s.values[1:], s.mode)
            check = _monotone_check(s)
            if name != "W":
                check.name += f"_p{p}"
            results.append(check)

    if model.d == 2 and model.name == "linear2":
        a, b = to_rational(cfg.a), to_rational(cfg.b)
        bad = None
        for k in range(1, k_max + 1):
            if weiss(model, k) - a * a != -(b * b) / (k * k):
                bad = k
                break
        results.append(CheckResult("w2_limit", FAIL if bad else PASS, k_max,
                                   witness={"k": bad} if bad else None,
                                   note="W(k) - (u(1)-u(0))^2 = -u(0)^2/k^2"))
    return _verify_out(cfg, model, SuiteReport(results))


def _verify_out(cfg: RunConfig, model, report: SuiteReport) -> int:
    doc = {"model": model.name if model is not None else (cfg.model or cfg.model_file), **report.to_dict()}
    if model is not None:
        doc["header"] = _header(cfg, model)
    text = json.dumps(doc, indent=2, default=str) + "\n"
    _emit(text, cfg.out)
    return EXIT_OK if report.ok else EXIT_VERIFY


def run_oracle_diff(cfg: RunConfig) -> int:
    if cfg.model not in FAMILIES:
        raise ConfigError(f"oracle-diff needs one of the built-in families {', '.join(FAMILIES)}")
    n = integral_exponent(cfg.p)
    if not cfg.mode.exact or n is None:
        raise ConfigError("oracle-diff runs in exact mode with an integer exponent")
    fam = OracleFamily(cfg.model, n, to_rational(cfg.a), to_rational(cfg.b))
    k_max = _k_max(cfg)
    model = make_model(cfg, required_depth(fam, k_max))
    report = oracle_diff(model, fam, k_max)
    rows = [{
        "k": r.k, "quantity": r.quantity, "engine": exact_string(r.engine),
        "oracle": exact_string(r.oracle), "diff": exact_string(r.diff),
    } for r in report.rows]
    if cfg.format == "json":
        text = json.dumps({"header": _header(cfg, model), "ok": report.ok, "rows": rows}, indent=2) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=("k", "quantity", "engine", "oracle", "diff"),
                                delimiter="," if cfg.format == "csv" else "\t", lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        text = buf.getvalue()
    _emit(text, cfg.out)
    for r in report.nonzero():
        print(f"k={r.k} {r.quantity}: engine - oracle = {exact_string(r.diff)}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_VERIFY


COMMANDS = {
    "sweep": run_sweep,
    "verify": run_verify,
    "oracle-diff": run_oracle_diff,
    "plot-data": emit_plot_data,
}


def main(argv=None) -> int:
    ap = _parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = _config(ns)
        return COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"treemono: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (TreeMonoError, ArithmeticError) as exc:
        print(f"treemono: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
