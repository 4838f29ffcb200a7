"""Command-line experiment harness.

Subcommands::

    progo run --config exp.ini --seed 0 --jobs 4 --out runs.csv
    progo summarize runs.csv
    progo validate --level fast
    progo plotdata runs.csv --out curves/

The config file is INI with an ``[experiment]`` section plus one section per
method (``[progo]``, ``[random_search]``).  Command-line flags override it.
Repeat ``i`` uses seed ``base + i``.  Exit codes: 0 ok, 1 check or run
failure, 2 usage, 3 I/O.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import logging
import math
import sys
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

import numpy as np

from progo.errors import InvalidDimensionError, OptimizationAborted
from progo.metrics import regret
from progo.objectives import REGISTRY, get_objective
from progo.optimizer import ProgoConfig, RunRecord, optimize, random_search_baseline
from progo.sampler import LssConfig

logger = logging.getLogger("progo.harness")

HEADER = ["method", "run_id", "iter", "k", "best_f", "r_f", "r_m", "cumulative_evals", "elapsed_ms"]
BASELINES = ("random_search",)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


class CsvFormatError(ValueError):
    def __init__(self, path, line, msg):
        super().__init__(f"{path}:{line}: {msg}")
        self.line = line


@dataclass
class ExperimentConfig:
    objective_name: str = "demo1d"
    dim: int = 1
    repeats: int = 10
    progo: ProgoConfig = field(default_factory=ProgoConfig)
    baselines: list = field(default_factory=list)
    output_path: str = "runs.csv"
    seed: int = 0
    backend: Optional[str] = None

    def validate(self):
        if self.repeats < 1:
            raise UsageError(f"repeats must be >= 1, got {self.repeats}")
        if self.objective_name not in REGISTRY:
            raise UsageError(f"unknown objective {self.objective_name!r}; "
                             f"choose from {', '.join(sorted(REGISTRY))}")
        try:
            get_objective(self.objective_name, self.dim)
        except InvalidDimensionError as exc:
            raise UsageError(str(exc)) from exc
        for name in self.baselines:
            if name not in BASELINES:
                raise UsageError(f"unknown baseline {name!r}; choose from {', '.join(BASELINES)}")


def load_config(path: Optional[str]) -> ExperimentConfig:
    """Read an INI experiment file; missing keys keep their defaults."""
    cfg = ExperimentConfig()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror}") from exc
    except configparser.Error as exc:
        raise UsageError(f"bad config {path}: {exc}") from exc

    try:
        if parser.has_section("experiment"):
            ex = parser["experiment"]
            cfg.objective_name = ex.get("objective", cfg.objective_name)
            cfg.dim = ex.getint("dim", cfg.dim)
            cfg.repeats = ex.getint("repeats", cfg.repeats)
            cfg.seed = ex.getint("seed", cfg.seed)
            cfg.output_path = ex.get("out", cfg.output_path)
            cfg.backend = ex.get("backend", cfg.backend)
            names = ex.get("baselines", "")
            cfg.baselines = [b.strip() for b in names.split(",") if b.strip()]
        if parser.has_section("random_search") and "random_search" not in cfg.baselines:
            if parser["random_search"].getboolean("enabled", True):
                cfg.baselines.append("random_search")
        if parser.has_section("progo"):
            pg = parser["progo"]
            lss = LssConfig(beta=pg.getfloat("beta", 20.0),
                            max_shrink_steps=pg.getint("max_shrink_steps", 1000),
                            burn_in=pg.getint("burn_in", 20),
                            sample_count=pg.getint("sample_count", 200))
            cfg.progo = ProgoConfig(k0=pg.getfloat("k0", 5.0),
                                    max_iters=pg.getint("max_iters", 200),
                                    lss=lss,
                                    warm_start=pg.getboolean("warm_start", True))
    except ValueError as exc:
        raise UsageError(f"bad config {path}: {exc}") from exc
    return cfg


# --- run -------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def record_rows(record: RunRecord, run_id: int, obj) -> list[list[str]]:
    rows = []
    for e in record.entries:
        r = regret(e.incumbent_f, e.incumbent_x, obj.known_min_value, obj.known_minimizer)
        rows.append([record.method, str(run_id), str(e.t), _fmt(e.k), _fmt(e.incumbent_f),
                     _fmt(r.r_f), _fmt(r.r_m), str(e.cumulative_evals),
                     str(int(round(e.elapsed * 1000)))])
    return rows


def run_repeat(cfg: ExperimentConfig, run_id: int) -> dict:
    """One seeded repeat of every method; returns buffered rows and status."""
    seed = cfg.seed + run_id
    obj = get_objective(cfg.objective_name, cfg.dim)
    pcfg = replace(cfg.progo, seed=seed)
    out = {"run_id": run_id, "seed": seed, "rows": {}, "status": {}}
    try:
        record = optimize(obj, cfg=pcfg, rng=np.random.default_rng(seed), backend=cfg.backend)
        out["status"]["progo"] = {"ok": True}
    except OptimizationAborted as exc:
        record = exc.record
        out["status"]["progo"] = {"ok": False, "error": str(exc)}
    out["rows"]["progo"] = record_rows(record, run_id, obj)

    checkpoints = [e.cumulative_evals for e in record.entries]
    for name in cfg.baselines:
        if not checkpoints:
            out["rows"][name] = []
            out["status"][name] = {"ok": False, "error": "no ProGO budget to match"}
            continue
        # Separate stream so the baseline never perturbs the ProGO draws.
        rng = np.random.default_rng([seed, 1])
        base = random_search_baseline(obj, checkpoints[-1], rng, checkpoints=checkpoints)
        out["rows"][name] = record_rows(base, run_id, obj)
        out["status"][name] = {"ok": True}
    return out


def _check_writable(path: Path):
    try:
        with open(path, "a"):
            pass
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc


def cli_run(cfg: ExperimentConfig, jobs: int = 1) -> int:
    cfg.validate()
    out_path = Path(cfg.output_path)
    _check_writable(out_path)

    if jobs > 1 and cfg.repeats > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, cfg.repeats)) as pool:
            results = list(pool.map(run_repeat, [cfg] * cfg.repeats, range(cfg.repeats)))
    else:
        results = [run_repeat(cfg, i) for i in range(cfg.repeats)]

    methods = ["progo"] + list(cfg.baselines)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for method in methods:
        for res in results:
            writer.writerows(res["rows"][method])

    runs = []
    for method in methods:
        for res in results:
            st = res["status"][method]
            runs.append({"method": method, "run_id": res["run_id"], "seed": res["seed"],
                         "status": "ok" if st["ok"] else "failed", "error": st.get("error"),
                         "rows": len(res["rows"][method])})
    failed = sum(r["status"] == "failed" for r in runs)
    status = {"objective": cfg.objective_name, "dim": cfg.dim, "repeats": cfg.repeats,
              "base_seed": cfg.seed, "failed_runs": failed, "runs": runs}
    try:
        out_path.write_text(buf.getvalue())
        Path(str(out_path) + ".status.json").write_text(json.dumps(status, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {out_path}: {exc.strerror}") from exc

    for r in runs:
        if r["status"] == "failed":
            logger.error("%s run %d (seed %d) failed: %s", r["method"], r["run_id"], r["seed"],
                         r["error"])
    print(f"wrote {out_path} ({len(runs)} runs, {failed} failed)")
    return EXIT_FAIL if failed else EXIT_OK


# --- reading trajectories --------------------------------------------------

def _parse_float(text, path, line, col):
    try:
        return float(text)
    except ValueError:
        raise CsvFormatError(path, line, f"column {col}: not a number: {text!r}") from None


def _parse_int(text, path, line, col):
    try:
        return int(text)
    except ValueError:
        raise CsvFormatError(path, line, f"column {col}: not an integer: {text!r}") from None


def read_trajectories(path) -> dict:
    """Parse a trajectory CSV into ``{(method, run_id): [row dict, ...]}`` sorted by iter."""
    runs = defaultdict(list)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != HEADER:
            raise CsvFormatError(path, 1, f"expected header {','.join(HEADER)}")
        for row in reader:
            line = reader.line_num
            if len(row) != len(HEADER):
                raise CsvFormatError(path, line, f"expected {len(HEADER)} fields, got {len(row)}")
            rec = {
                "method": row[0],
                "run_id": _parse_int(row[1], path, line, "run_id"),
                "iter": _parse_int(row[2], path, line, "iter"),
                "k": None if row[3] == "" else _parse_float(row[3], path, line, "k"),
                "best_f": _parse_float(row[4], path, line, "best_f"),
                "r_f": _parse_float(row[5], path, line, "r_f"),
                "r_m": _parse_float(row[6], path, line, "r_m"),
                "cumulative_evals": _parse_int(row[7], path, line, "cumulative_evals"),
                "elapsed_ms": _parse_int(row[8], path, line, "elapsed_ms"),
            }
            if not rec["method"]:
                raise CsvFormatError(path, line, "empty method")
            runs[(rec["method"], rec["run_id"])].append(rec)
    for rows in runs.values():
        rows.sort(key=lambda r: r["iter"])
    return dict(runs)


def _methods(runs) -> list[str]:
    seen = []
    for method, _ in runs:
        if method not in seen:
            seen.append(method)
    return seen


def _mean(values) -> float:
    with np.errstate(invalid="ignore"):
        return float(np.mean(values))


# --- summarize -------------------------------------------------------------

def summarize(runs: dict) -> list[dict]:
    out = []
    for method in _methods(runs):
        finals = [rows[-1] for (m, _), rows in runs.items() if m == method]
        out.append({
            "method": method,
            "runs": len(finals),
            "iter": max(r["iter"] for r in finals),
            "best_f": _mean([r["best_f"] for r in finals]),
            "r_f": _mean([r["r_f"] for r in finals]),
            "r_m": _mean([r["r_m"] for r in finals]),
            "cumulative_evals": int(round(_mean([r["cumulative_evals"] for r in finals]))),
            "elapsed_ms": int(round(_mean([r["elapsed_ms"] for r in finals]))),
        })
    return out


def cli_summarize(csv_path, out_path=None) -> int:
    runs = read_trajectories(csv_path)
    if not runs:
        raise CsvFormatError(csv_path, 2, "no data rows")
    summary = summarize(runs)

    print(f"{'method':<16}{'runs':>6}{'r_f':>14}{'r_m':>14}{'time_s':>12}{'evals':>12}")
    for s in summary:
        print(f"{s['method']:<16}{s['runs']:>6}{s['r_f']:>14.4f}{s['r_m']:>14.4f}"
              f"{s['elapsed_ms'] / 1000:>12.3f}{s['cumulative_evals']:>12d}")

    # Same header as the input so the summary can itself be summarized.
    out_path = Path(out_path) if out_path else Path(str(csv_path) + ".summary.csv")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HEADER)
    for s in summary:
        writer.writerow([s["method"], "0", str(s["iter"]), "", _fmt(s["best_f"]), _fmt(s["r_f"]),
                         _fmt(s["r_m"]), str(s["cumulative_evals"]), str(s["elapsed_ms"])])
    out_path.write_text(buf.getvalue())
    return EXIT_OK


# --- plotdata --------------------------------------------------------------

def curves(runs: dict, method: str, metric: str) -> np.ndarray:
    """``(iter, mean, stderr)`` rows; stderr is the sample std over sqrt(n), 0 for n = 1."""
    by_iter = defaultdict(list)
    for (m, _), rows in runs.items():
        if m == method:
            for r in rows:
                by_iter[r["iter"]].append(r[metric])
    table = []
    for it in sorted(by_iter):
        v = np.asarray(by_iter[it])
        with np.errstate(invalid="ignore"):
            se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
        table.append((it, _mean(v), se))
    return np.array(table, dtype=float).reshape(-1, 3)


def cli_plotdata(csv_path, out_dir) -> int:
    runs = read_trajectories(csv_path)
    if not runs:
        raise CsvFormatError(csv_path, 2, "no data rows")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for method in _methods(runs):
        for metric in ("r_f", "r_m"):
            path = out_dir / f"{method}_{metric}.txt"
            np.savetxt(path, curves(runs, method, metric), fmt=["%d", "%.17g", "%.17g"],
                       header="iter mean stderr")
            print(f"wrote {path}")
    return EXIT_OK


# --- validate --------------------------------------------------------------

def cli_validate(level: str, seed: int) -> int:
    from progo.validation import run_validation

    results = run_validation(level, seed)
    for r in results:
        print(r.line())
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return EXIT_FAIL if failed else EXIT_OK


# --- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="progo", description="ProGO experiment harness")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run seeded repeats and write a trajectory CSV")
    r.add_argument("--config", help="INI experiment file")
    r.add_argument("--seed", type=int, help="base seed; repeat i uses seed + i")
    r.add_argument("--jobs", type=int, default=1, help="parallel repeats (default 1)")
    r.add_argument("--out", help="output CSV path")
    r.add_argument("--objective", help="objective name (overrides config)")
    r.add_argument("--dim", type=int)
    r.add_argument("--repeats", type=int)
    r.add_argument("--iters", type=int, help="ProGO stages T")
    r.add_argument("--baselines", help="comma-separated baseline names, e.g. random_search")
    r.add_argument("--backend", choices=["auto", "compiled", "python"])

    s = sub.add_parser("summarize", help="per-method mean final regret and time")
    s.add_argument("csv")
    s.add_argument("--out", help="summary CSV path (default <csv>.summary.csv)")

    v = sub.add_parser("validate", help="run the oracle validation suite")
    v.add_argument("--level", choices=["fast", "full"], default="fast")
    v.add_argument("--seed", type=int, default=20240)

    pd = sub.add_parser("plotdata", help="mean and standard error curves per method")
    pd.add_argument("csv")
    pd.add_argument("--out", default="plotdata", help="output directory")
    return p


def _experiment_from_args(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.objective is not None:
        cfg.objective_name = args.objective
        if args.dim is None and args.objective == "demo1d":
            cfg.dim = 1
    if args.dim is not None:
        cfg.dim = args.dim
    if args.repeats is not None:
        cfg.repeats = args.repeats
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.output_path = args.out
    if args.backend is not None:
        cfg.backend = args.backend
    if args.baselines is not None:
        cfg.baselines = [b.strip() for b in args.baselines.split(",") if b.strip()]
    if args.iters is not None:
        try:
            cfg.progo = replace(cfg.progo, max_iters=args.iters)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            return cli_run(_experiment_from_args(args), args.jobs)
        if args.command == "summarize":
            return cli_summarize(args.csv, args.out)
        if args.command == "validate":
            return cli_validate(args.level, args.seed)
        return cli_plotdata(args.csv, args.out)
    except UsageError as exc:
        print(f"progo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CsvFormatError as exc:
        print(f"progo: parse error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"progo: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
