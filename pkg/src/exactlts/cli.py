"""Command-line front end.

    exactlts data.csv --h 0.75 --algorithm both --report json
    exactlts --gen 1,10,2,0.2 --h 7

Observation indices in every report are 1-based.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .bsa import bsa_solve
from .datasets import gen_instance
from .diagnostics import AssumptionId, AssumptionReport, check_all, landscape_1d
from .errors import (
    CapExceededError,
    DegenerateTieError,
    InvalidInputError,
    NoCandidateError,
    SingularFitError,
)
from .model import DEFAULT_RESIDUAL_EQ_TOL, Dataset, FitResult, Problem, TolerancePolicy
from .numerics import DEFAULT_PIVOT_TOL
from .oracle import DEFAULT_CAP, exact_enumerate

log = logging.getLogger("exactlts")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CAP = 3
EXIT_NO_CANDIDATE = 4
EXIT_DEGENERATE_TIE = 5
EXIT_SINGULAR = 6


@dataclass
class RunConfig:
    input_path: Optional[str] = None
    response_column: Union[str, int] = 1
    h: Union[int, float, str, None] = None
    intercept: bool = False
    algorithm: str = "bsa"
    residual_eq_tol: float = DEFAULT_RESIDUAL_EQ_TOL
    pivot_tol: float = DEFAULT_PIVOT_TOL
    cap: int = DEFAULT_CAP
    report_format: str = "json"
    threads: int = 1
    gen: Optional[Tuple[int, int, int, float]] = None
    landscape: bool = False
    diagnostics: bool = True
    budget: int = 4096
    save_gen: Optional[str] = None


def _parse_float(text: str) -> Optional[float]:
    try:
        return float(text)
    except ValueError:
        return None


def load_csv(path, response_column: Union[str, int] = 1, intercept: bool = False) -> Dataset:
    """Read a comma-separated numeric table.

    A first row containing any non-numeric cell is taken as a header.
    ``response_column`` is a header name or a 1-based column number; the
    remaining columns become regressors, preceded by a ones column when
    ``intercept`` is set.
    """
    path = Path(path)
    if not path.is_file():
        raise InvalidInputError(f"{path}: no such file")
    with path.open(newline="") as fh:
        rows = [(k + 1, r) for k, r in enumerate(csv.reader(fh)) if any(c.strip() for c in r)]
    if not rows:
        raise InvalidInputError(f"{path}: no rows")

    header = None
    first = rows[0][1]
    if any(_parse_float(c) is None for c in first):
        header = [c.strip() for c in first]
        rows = rows[1:]
    if not rows:
        raise InvalidInputError(f"{path}: no rows")

    width = len(rows[0][1])
    values = np.empty((len(rows), width))
    for r, (line, cells) in enumerate(rows):
        if len(cells) != width:
            raise InvalidInputError(f"{path}:{line}: expected {width} fields, found {len(cells)}")
        for c, cell in enumerate(cells):
            v = _parse_float(cell.strip())
            if v is None or not math.isfinite(v):
                raise InvalidInputError(f"{path}:{line}: column {c + 1}: not a finite number: {cell!r}")
            values[r, c] = v

    col = _resolve_column(response_column, header, width)
    Y = values[:, col]
    X = np.delete(values, col, axis=1)
    if intercept:
        X = np.hstack([np.ones((X.shape[0], 1)), X])
    if X.shape[1] == 0:
        raise InvalidInputError(f"{path}: no regressor columns")
    n, p = X.shape
    if n <= p:
        raise InvalidInputError(f"{path}: need more observations than regressors (n={n}, p={p})")
    return Dataset(X, Y, intercept)


def _resolve_column(spec, header, width) -> int:
    if isinstance(spec, str) and not spec.strip().lstrip("-").isdigit():
        if header is None or spec not in header:
            raise InvalidInputError(f"response column {spec!r} not found in header")
        return header.index(spec)
    k = int(spec)
    if not (1 <= k <= width):
        raise InvalidInputError(f"response column {k} out of range 1..{width}")
    return k - 1


def resolve_h(h, n: int, p: int) -> int:
    """Trimming parameter from a count (``"7"``) or a fraction of n (``"0.75"``).

    Fractions are rounded up.  Defaults to ``(n + p + 1) // 2``.
    """
    if h is None:
        return (n + p + 1) // 2
    if isinstance(h, str):
        text = h.strip()
        try:
            h = int(text) if text.isdigit() else float(text)
        except ValueError:
            raise InvalidInputError(f"cannot parse h={text!r}") from None
    if isinstance(h, float):
        if not (0.0 < h <= 1.0):
            raise InvalidInputError(f"fractional h must lie in (0, 1], got {h}")
        if h <= 0.5:
            log.warning("fraction h=%s is outside the usual range (0.5, 1]", h)
        value = math.ceil(h * n - 1e-9)
    else:
        value = int(h)
        if not (n / 2 <= value <= n):
            log.warning("h=%d is outside the usual range [n/2, n]", value)
    if not (p <= value <= n):
        raise InvalidInputError(f"h={value} must satisfy p <= h <= n (p={p}, n={n})")
    return value


def _witness_out(aid: AssumptionId, w):
    if aid is AssumptionId.A1:
        return [w[0]] + [i + 1 for i in w[1:]]
    if aid in (AssumptionId.A3, AssumptionId.A4):
        return w
    return [i + 1 for i in w]


def _assumption_out(rep: AssumptionReport) -> dict:
    return {
        "id": rep.assumption_id.value,
        "status": rep.status.value,
        "witnesses": [_witness_out(rep.assumption_id, w) for w in rep.witnesses[:50]],
        "n_witnesses": len(rep.witnesses),
        "detail": rep.detail,
    }


def _fit_out(res: FitResult) -> dict:
    return {
        "beta": [float(b) for b in res.beta],
        "objective": float(res.objective),
        "subset": list(res.mask.one_based),
        "counters": res.counters.as_dict(),
        "notes": list(res.notes),
    }


def _bound(v: float):
    return None if math.isinf(v) else float(v)


def _landscape_out(problem: Problem) -> dict:
    land = landscape_1d(problem)
    return {
        "boundary_points": list(land.boundary_points),
        "cells": [{"lower": _bound(c.lower), "upper": _bound(c.upper), "subset": list(c.mask.one_based)}
                  for c in land.cells],
        "local_minima": [{"beta": m.beta, "value": m.value, "subset": list(m.mask.one_based)}
                         for m in land.local_minima],
    }


def _agreement(a: FitResult, b: FitResult) -> dict:
    gap = abs(a.objective - b.objective) / max(abs(b.objective), 1e-300)
    return {
        "objective": bool(gap <= 1e-9),
        "subset": a.mask == b.mask,
        "relative_gap": float(gap),
    }


def build_report(config: RunConfig) -> dict:
    """Run the configured solvers and collect everything into a plain dict."""
    generated = None
    if config.gen is not None:
        seed, n, p, frac = config.gen
        dataset, true_beta = gen_instance(seed, n, p, frac, intercept=config.intercept)
        generated = {"seed": seed, "n": n, "p": p, "outlier_fraction": frac,
                     "true_beta": [float(b) for b in true_beta]}
        if config.save_gen:
            save_csv(config.save_gen, dataset)
    else:
        if config.input_path is None:
            raise InvalidInputError("an input CSV or --gen is required")
        dataset = load_csv(config.input_path, config.response_column, config.intercept)

    h = resolve_h(config.h, dataset.n, dataset.p)
    problem = Problem(dataset, h, TolerancePolicy(config.residual_eq_tol, config.pivot_tol))
    if config.algorithm not in ("bsa", "exact", "both"):
        raise InvalidInputError(f"unknown algorithm {config.algorithm!r}")

    t0 = time.perf_counter()
    results = {}
    if config.algorithm in ("bsa", "both"):
        results["bsa"] = bsa_solve(problem, threads=config.threads)
    if config.algorithm in ("exact", "both"):
        results["exact"] = exact_enumerate(problem, cap=config.cap, threads=config.threads)
    wall_ms = (time.perf_counter() - t0) * 1e3

    main = results["bsa"] if "bsa" in results else results["exact"]
    report = {"algorithm": config.algorithm}
    report.update(_fit_out(main))
    report.update({"n": dataset.n, "p": dataset.p, "h": h, "intercept": dataset.has_intercept})
    if config.diagnostics:
        report["assumptions"] = [_assumption_out(r) for r in check_all(problem, main, config.budget)]
    else:
        report["assumptions"] = []
    if config.algorithm == "both":
        report["solvers"] = {k: _fit_out(v) for k, v in results.items()}
        report["agreement"] = _agreement(results["bsa"], results["exact"])
    if config.landscape:
        if dataset.p != 1:
            raise InvalidInputError("--landscape needs exactly one regressor")
        report["landscape"] = _landscape_out(problem)
    if generated is not None:
        report["generated"] = generated
    report["wall_ms"] = wall_ms
    return report


def save_csv(path, dataset: Dataset):
    """Write ``y,x1..xp`` with a header; an intercept column is left out."""
    X = dataset.X[:, 1:] if dataset.has_intercept else dataset.X
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["y"] + [f"x{k + 1}" for k in range(X.shape[1])])
        for y, row in zip(dataset.Y, X):
            w.writerow([repr(float(y))] + [repr(float(v)) for v in row])


def format_json(report: dict) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(report, indent=2, sort_keys=True)


def format_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["key", "value"])
    w.writerow(["algorithm", report["algorithm"]])
    for k, b in enumerate(report["beta"]):
        w.writerow([f"beta_{k + 1}", repr(b)])
    w.writerow(["objective", repr(report["objective"])])
    w.writerow(["subset", " ".join(str(i) for i in report["subset"])])
    for k, v in report["counters"].items():
        w.writerow([f"counters.{k}", v])
    for a in report["assumptions"]:
        w.writerow([f"assumption.{a['id']}", a["status"]])
    if "agreement" in report:
        w.writerow(["agreement.objective", report["agreement"]["objective"]])
        w.writerow(["agreement.subset", report["agreement"]["subset"]])
    w.writerow(["wall_ms", f"{report['wall_ms']:.3f}"])
    return buf.getvalue()


def format_text(report: dict) -> str:
    lines = [
        f"algorithm : {report['algorithm']}",
        f"n, p, h   : {report['n']}, {report['p']}, {report['h']}",
        "beta      : " + ", ".join(f"{b:.10g}" for b in report["beta"]),
        f"objective : {report['objective']:.10g}",
        "subset    : " + " ".join(str(i) for i in report["subset"]),
        "counters  : " + ", ".join(f"{k}={v}" for k, v in report["counters"].items()),
    ]
    for note in report["notes"]:
        lines.append(f"note      : {note}")
    for a in report["assumptions"]:
        extra = f" ({a['n_witnesses']} witnesses)" if a["n_witnesses"] else ""
        lines.append(f"assump {a['id']:<9}: {a['status']}{extra}")
    if "agreement" in report:
        ag = report["agreement"]
        verdict = "agree" if ag["objective"] and ag["subset"] else "DISAGREE"
        lines.append(f"solvers   : {verdict} (relative gap {ag['relative_gap']:.3g})")
    if "landscape" in report:
        land = report["landscape"]
        lines.append("borders   : " + ", ".join(f"{b:.4f}" for b in land["boundary_points"]))
        for m in land["local_minima"]:
            lines.append(f"local min : beta={m['beta']:.4f} value={m['value']:.4f} subset={m['subset']}")
    lines.append(f"wall_ms   : {report['wall_ms']:.3f}")
    return "\n".join(lines) + "\n"


FORMATTERS = {"json": format_json, "csv": format_csv, "text": format_text}


def run(config: RunConfig) -> Tuple[int, str]:
    """Execute a configuration; returns ``(exit_code, output)``."""
    try:
        report = build_report(config)
    except InvalidInputError as e:
        return EXIT_INPUT, f"error: {e}\n"
    except CapExceededError as e:
        return EXIT_CAP, f"error: {e}\n"
    except NoCandidateError as e:
        return EXIT_NO_CANDIDATE, f"error: {e}\n"
    except DegenerateTieError as e:
        return EXIT_DEGENERATE_TIE, f"error: {e}\n"
    except SingularFitError as e:
        return EXIT_SINGULAR, f"error: {e}\n"
    return EXIT_OK, FORMATTERS[config.report_format](report)


def _parse_gen(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected seed,n,p,fraction")
    try:
        return int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3])
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="exactlts", description="Exact least trimmed squares regression.")
    ap.add_argument("input", nargs="?", help="CSV file (comma separated, optional header)")
    ap.add_argument("--h", dest="h", default=None, help="retained observations: integer count or fraction of n")
    ap.add_argument("--response", default="1", help="response column: header name or 1-based number (default 1)")
    ap.add_argument("--intercept", action="store_true", help="prepend a ones column")
    ap.add_argument("--algorithm", choices=("bsa", "exact", "both"), default="bsa")
    ap.add_argument("--report", choices=tuple(FORMATTERS), default="json")
    ap.add_argument("--landscape", action="store_true", help="add the 1-D landscape (one regressor only)")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--tol", type=float, default=DEFAULT_RESIDUAL_EQ_TOL, help="residual equality tolerance")
    ap.add_argument("--pivot-tol", type=float, default=DEFAULT_PIVOT_TOL)
    ap.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max subsets for --algorithm exact")
    ap.add_argument("--budget", type=int, default=4096, help="max subsets/sign vectors per assumption check")
    ap.add_argument("--no-diagnostics", action="store_true")
    ap.add_argument("--gen", type=_parse_gen, default=None, metavar="SEED,N,P,FRAC",
                    help="solve a generated instance instead of reading a file")
    ap.add_argument("--save-gen", default=None, metavar="PATH", help="write the generated instance as CSV")
    return ap


def config_from_args(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = make_parser().parse_args(argv)
    return RunConfig(
        input_path=args.input,
        response_column=args.response,
        h=args.h,
        intercept=args.intercept,
        algorithm=args.algorithm,
        residual_eq_tol=args.tol,
        pivot_tol=args.pivot_tol,
        cap=args.cap,
        report_format=args.report,
        threads=args.threads,
        gen=args.gen,
        landscape=args.landscape,
        diagnostics=not args.no_diagnostics,
        budget=args.budget,
        save_gen=args.save_gen,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    config = config_from_args(argv)
    code, out = run(config)
    (sys.stdout if code == EXIT_OK else sys.stderr).write(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
