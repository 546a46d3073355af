"""Command-line driver: generator export, sweeps, MC and SKA runs, fixture checks.

Exit codes: 0 ok, 1 usage or configuration error, 2 fixture failure,
3 numeric or model failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import Decimal, InvalidOperation
from importlib import resources
from pathlib import Path

from . import __version__
from .anyon_model import AnyonParams, ModelError, j4_defect, one_qubit_generators, two_qubit_generators
from .metrics import TARGETS, cnot_class_distance, computational_block, phase_distance, unitarity_measure
from .search import (
    CnotClass,
    InfeasibleError,
    OneQubitDistance,
    SearchConfig,
    best_of_runs,
    brute_force,
    evaluate,
    mc_search,
    substream_seed,
)
from .ska import CommutatorAngleOverflow, mc_enhanced_ska

EXIT_OK, EXIT_USAGE, EXIT_FIXTURE, EXIT_NUMERIC = 0, 1, 2, 3

ONE_QUBIT_BF_WARN = 13
TWO_QUBIT_BF_MAX = 7
SKA_MAX_LEVEL = 4

SWEEP_COLUMNS = ["alpha", "length", "target", "best_d", "best_word"]
MC_COLUMNS = ["alpha", "length", "target", "seed", "run", "sweeps_used", "best_d", "best_word"]
CNOT_COLUMNS = ["alpha", "length", "du_cap", "d_cnot", "d_u", "word", "status"]


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = __version__
    timestamp: str = field(default_factory=lambda: _timestamp())

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the stamp for reproducible artifacts.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    t = time.gmtime(int(epoch)) if epoch else time.gmtime()
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", t)


def fmt(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    if isinstance(x, float):
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


# ------------------------------------------------------------ arg parsing


def parse_alpha(text: str, grid: bool = False) -> float:
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise UsageError(f"malformed alpha {text!r}") from None
    if grid:
        value = value.quantize(Decimal("0.001"))
    a = float(value)
    if not 2.0 < a < 3.0:
        raise UsageError(f"alpha must lie strictly inside (2, 3), got {text}")
    return a


def alpha_values(args) -> list[float]:
    """Single --alpha or an inclusive --alpha-start/--alpha-end/--alpha-step range."""
    if args.alpha is not None:
        return [parse_alpha(args.alpha, args.grid)]
    if args.alpha_start is None or args.alpha_end is None:
        raise UsageError("give --alpha or --alpha-start and --alpha-end")
    try:
        start, end = Decimal(args.alpha_start), Decimal(args.alpha_end)
        step = Decimal(args.alpha_step)
    except InvalidOperation:
        raise UsageError("malformed alpha range") from None
    if step <= 0 or end < start:
        raise UsageError("malformed alpha range")
    out = []
    v = start
    while v <= end:
        out.append(parse_alpha(str(v), args.grid))
        v += step
    return out


def parse_lengths(text: str) -> list[int]:
    """'1,3,5' or '1-5' or a mix."""
    out: set[int] = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if "-" in part:
                lo, hi = (int(s) for s in part.split("-", 1))
                if hi < lo:
                    raise ValueError
                out.update(range(lo, hi + 1))
            elif part:
                out.add(int(part))
    except ValueError:
        raise UsageError(f"malformed lengths {text!r}") from None
    if not out or min(out) < 0:
        raise UsageError(f"malformed lengths {text!r}")
    return sorted(out)


def thread_count(args) -> int:
    env = os.environ.get("ANYON_THREADS")
    n = int(env) if env else args.threads
    return max(1, n)


def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _write_manifest(path, manifest: RunManifest) -> None:
    if path not in (None, "-"):
        Path(str(path) + ".manifest.json").write_text(manifest.to_json() + "\n")


def _csv_text(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def _load_checkpoint(path: Path, columns) -> dict[tuple, dict]:
    done = {}
    if path.exists():
        with path.open() as fh:
            for row in csv.DictReader(fh):
                if set(columns) <= set(row):
                    done[(float(row["alpha"]), int(row["length"]))] = row
    return done


def _run_grid(cells, work, args, columns):
    """Run grid cells on a thread pool with an optional checkpoint file.

    Completed rows are appended to ``<out>.partial`` as they finish; a
    rerun skips them. Final rows are sorted by (alpha, length).
    """
    ckpt = Path(str(args.out) + ".partial") if args.out not in (None, "-") else None
    done = _load_checkpoint(ckpt, columns) if ckpt else {}
    todo = [c for c in cells if (c[0], c[1]) not in done]
    rows = [{k: _coerce(v) for k, v in r.items()} for r in done.values()]
    fh = None
    if ckpt:
        fresh = not ckpt.exists()
        fh = ckpt.open("a", newline="")
        writer = csv.writer(fh, lineterminator="\n")
        if fresh:
            writer.writerow(columns)
    try:
        with ThreadPoolExecutor(max_workers=thread_count(args)) as pool:
            for row in pool.map(work, todo):
                rows.append(row)
                if fh:
                    writer.writerow([fmt(row[c]) for c in columns])
                    fh.flush()
    finally:
        if fh:
            fh.close()
    rows.sort(key=lambda r: (float(r["alpha"]), int(r["length"])))
    return rows, ckpt


def _coerce(v: str):
    # Checkpointed rows come back as strings; numbers keep their exact text.
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


# ---------------------------------------------------------------- commands


def cmd_ebm(args) -> int:
    alpha = parse_alpha(args.alpha, args.grid)
    p = AnyonParams(alpha)
    g = one_qubit_generators(p) if args.arity == 1 else two_qubit_generators(p)
    doc = {
        "alpha": alpha,
        "arity": args.arity,
        "letters": {k: [[[float(z.real), float(z.imag)] for z in row] for row in m] for k, m in g.letters.items()},
    }
    if args.arity == 2:
        doc["j4_defect"] = j4_defect(p)
    _write_text(args.out, json.dumps(doc, indent=1) + "\n")
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.target not in ("H", "T"):
        raise UsageError("sweep targets are H and T")
    alphas = alpha_values(args)
    lengths = parse_lengths(args.lengths)
    if max(lengths) > ONE_QUBIT_BF_WARN:
        print(f"warning: brute force above L={ONE_QUBIT_BF_WARN} is very slow", file=sys.stderr)
    target = TARGETS[args.target]
    cells = [(a, L) for a in alphas for L in lengths]
    gens = {a: one_qubit_generators(AnyonParams(a)) for a in alphas}

    def work(cell):
        a, L = cell
        res = brute_force(gens[a], SearchConfig(L, OneQubitDistance(target)))
        return {"alpha": a, "length": L, "target": args.target, "best_d": res.best_score, "best_word": res.best_word.letters}

    rows, ckpt = _run_grid(cells, work, args, SWEEP_COLUMNS)
    manifest = RunManifest("sweep", {"target": args.target, "alphas": alphas, "lengths": lengths, "method": "bf"})
    _write_text(args.out, _csv_text(SWEEP_COLUMNS, rows))
    _write_manifest(args.out, manifest)
    if ckpt and ckpt.exists():
        ckpt.unlink()
    return EXIT_OK


def cmd_mc(args) -> int:
    if args.target not in ("H", "T"):
        raise UsageError("mc targets are H and T")
    if args.length is None or args.runs < 1 or args.num < 1 or not args.tol > 0:
        raise UsageError("mc needs --length, --runs >= 1, --num >= 1 and --tol > 0")
    alpha = parse_alpha(args.alpha, args.grid)
    g = one_qubit_generators(AnyonParams(alpha))
    objective = OneQubitDistance(TARGETS[args.target])

    def run(i):
        cfg = SearchConfig(args.length, objective, args.tol, args.num, substream_seed(args.seed, i))
        return mc_search(g, cfg)

    with ThreadPoolExecutor(max_workers=thread_count(args)) as pool:
        results = list(pool.map(run, range(args.runs)))
    rows = [
        {"alpha": alpha, "length": args.length, "target": args.target, "seed": r.seed, "run": i,
         "sweeps_used": r.sweeps_used, "best_d": r.best_score, "best_word": r.best_word.letters}
        for i, r in enumerate(results)
    ]
    best = min(rows, key=lambda r: (r["best_d"], r["best_word"]))
    rows.append({**best, "run": "min"})
    manifest = RunManifest("mc", {"target": args.target, "alpha": alpha, "length": args.length, "num": args.num,
                                  "tol": args.tol, "seed": args.seed, "runs": args.runs})
    _write_text(args.out, _csv_text(MC_COLUMNS, rows))
    _write_manifest(args.out, manifest)
    return EXIT_OK


def cmd_ska(args) -> int:
    if args.target not in ("H", "T"):
        raise UsageError("ska targets are H and T")
    if not 0 <= args.level <= SKA_MAX_LEVEL:
        raise UsageError(f"level must be in [0, {SKA_MAX_LEVEL}]")
    if args.length is None or args.length < 1:
        raise UsageError("ska needs --length (base word length)")
    alpha = parse_alpha(args.alpha, args.grid)
    g = one_qubit_generators(AnyonParams(alpha))
    target = TARGETS[args.target]
    cfg = SearchConfig(args.length, OneQubitDistance(target), args.tol, args.num, args.seed)
    try:
        trace = mc_enhanced_ska(target, args.level, g, cfg, restarts=args.restarts)
    except CommutatorAngleOverflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    manifest = RunManifest("ska", {"target": args.target, "alpha": alpha, "level": args.level, "base_length": args.length,
                                   "num": args.num, "tol": args.tol, "seed": args.seed, "restarts": args.restarts})
    doc = {
        "manifest": {"command": manifest.command, "config": manifest.config, "version": manifest.version},
        "levels": [{"n": r.level, "d": r.distance, "word_length": r.word_length, "word": r.word} for r in trace.levels],
    }
    _write_text(args.out, json.dumps(doc, indent=1) + "\n")
    _write_manifest(args.out, manifest)
    return EXIT_OK


def cmd_cnot(args) -> int:
    alphas = alpha_values(args)
    lengths = parse_lengths(args.lengths)
    if args.method == "bf" and max(lengths) > TWO_QUBIT_BF_MAX:
        raise UsageError(f"two-qubit brute force is limited to L <= {TWO_QUBIT_BF_MAX}")
    objective = CnotClass(args.du_cap)
    cells = [(a, L) for a in alphas for L in lengths]
    gens = {a: two_qubit_generators(AnyonParams(a)) for a in alphas}

    def work(cell):
        a, L = cell
        row = {"alpha": a, "length": L, "du_cap": args.du_cap}
        cfg = SearchConfig(L, objective, args.tol, args.num, args.seed)
        try:
            res = brute_force(gens[a], cfg) if args.method == "bf" else best_of_runs(gens[a], cfg, args.runs)[0]
        except InfeasibleError:
            res = None
        if res is None or math.isinf(res.best_score):
            return {**row, "d_cnot": "", "d_u": "", "word": "", "status": "infeasible"}
        # The best word is reported even when it misses the [CNOT] class.
        status = "low_error" if res.low_error else "feasible" if res.feasible else "infeasible"
        return {**row, "d_cnot": res.best_score, "d_u": res.d_u, "word": res.best_word.letters, "status": status}

    rows, ckpt = _run_grid(cells, work, args, CNOT_COLUMNS)
    manifest = RunManifest("cnot", {"alphas": alphas, "lengths": lengths, "method": args.method, "du_cap": args.du_cap,
                                    "seed": args.seed, "runs": args.runs, "num": args.num})
    _write_text(args.out, _csv_text(CNOT_COLUMNS, rows))
    _write_manifest(args.out, manifest)
    if ckpt and ckpt.exists():
        ckpt.unlink()
    return EXIT_OK


def default_fixture_path():
    return resources.files("nsbraid") / "data" / "fixtures.json"


def check_fixture(fx: dict, reverse: bool) -> tuple[bool, dict]:
    """Evaluate one fixture record under one composition order."""
    p = AnyonParams(float(fx["alpha"]))
    if fx["kind"] == "gate":
        m = evaluate(fx["word"], one_qubit_generators(p), reverse=reverse)
        d = phase_distance(m, TARGETS[fx["target"]])
        return abs(d - fx["expected_d"]) <= fx["tolerance"], {"d": d}
    if fx["kind"] == "cnot":
        m = evaluate(fx["word"], two_qubit_generators(p), reverse=reverse)
        block, _ = computational_block(m)
        dc, du = cnot_class_distance(block), unitarity_measure(block)
        ok = abs(dc - fx["expected_d_cnot"]) <= fx["tolerance_d_cnot"] and abs(du - fx["expected_d_u"]) <= fx["tolerance_d_u"]
        return ok, {"d_cnot": dc, "d_u": du}
    raise UsageError(f"unknown fixture kind {fx['kind']!r}")


def verify_fixtures(fixtures: list[dict]) -> dict:
    """Check every fixture under both orders; see ``cmd_verify``."""
    records = []
    for fx in fixtures:
        fwd, vf = check_fixture(fx, reverse=False)
        rev, vr = check_fixture(fx, reverse=True)
        matched = {(True, True): "both", (True, False): "forward", (False, True): "reversed"}.get((fwd, rev), "none")
        records.append({"fixture": fx, "forward": fwd, "reversed": rev, "matched": matched, "values": vf, "values_reversed": vr})
    all_fwd = all(r["forward"] for r in records)
    all_rev = all(r["reversed"] for r in records)
    if all_fwd and all_rev:
        convention = "both"
    elif all_fwd:
        convention = "forward"
    elif all_rev:
        convention = "reversed"
    else:
        convention = None
    return {"records": records, "convention": convention, "ok": convention is not None}


def cmd_verify(args) -> int:
    path = args.fixtures or default_fixture_path()
    try:
        doc = json.loads(Path(path).read_text() if not hasattr(path, "read_text") else path.read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read fixtures: {exc}") from None
    fixtures = doc["fixtures"] if isinstance(doc, dict) else doc
    if not fixtures:
        print("warning: 0 fixtures")
        return EXIT_OK
    report = verify_fixtures(fixtures)
    for r in report["records"]:
        fx = r["fixture"]
        label = f"{fx['kind']} alpha={fx['alpha']} {fx.get('target', 'CNOT')} L={len(fx['word'])}"
        status = "PASS" if r["matched"] != "none" else "FAIL"
        vals = " ".join(f"{k}={fmt(v)}" for k, v in r["values"].items())
        print(f"{status} {label} matched={r['matched']} {vals}")
    conv = report["convention"]
    if conv == "both":
        print(f"{len(fixtures)} fixtures pass under both composition orders (order not discriminated)")
    elif conv:
        print(f"{len(fixtures)} fixtures pass under the {conv} composition order")
    else:
        print("fixture verification failed")
    return EXIT_OK if report["ok"] else EXIT_FIXTURE


def cmd_word_eval(args) -> int:
    word = args.word.strip().upper()
    arity = 2 if args.target == "CNOT" or set(word) & set("EFGH") else 1
    alpha = parse_alpha(args.alpha, args.grid)
    p = AnyonParams(alpha)
    if arity == 1:
        g = one_qubit_generators(p)
        print(fmt(phase_distance(evaluate(word, g), TARGETS[args.target if args.target != "CNOT" else "H"])))
    else:
        block, _ = computational_block(evaluate(word, two_qubit_generators(p)))
        print(f"{fmt(cnot_class_distance(block))},{fmt(unitarity_measure(block))}")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--alpha", help="single alpha value in (2, 3)")
    common.add_argument("--alpha-start")
    common.add_argument("--alpha-end")
    common.add_argument("--alpha-step", default="0.001")
    common.add_argument("--grid", action="store_true", help="snap alpha to the 0.001 grid")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--threads", type=int, default=1, help="worker threads (ANYON_THREADS overrides)")
    common.add_argument("--seed", type=int, default=0)

    mc_opts = argparse.ArgumentParser(add_help=False)
    mc_opts.add_argument("--num", type=int, default=2000, help="maximum sweeps per MC run")
    mc_opts.add_argument("--tol", type=float, default=1e-2, help="MC early-exit threshold D")
    mc_opts.add_argument("--runs", type=int, default=1)

    parser = argparse.ArgumentParser(prog="nsbraid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ebm", parents=[common], help="export generator matrices as JSON")
    p.add_argument("--arity", type=int, choices=(1, 2), default=1)
    p.set_defaults(func=cmd_ebm)

    p = sub.add_parser("sweep", parents=[common], help="brute-force alpha x length grid")
    p.add_argument("--target", choices=("H", "T"), default="H")
    p.add_argument("--lengths", default="1-5")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mc", parents=[common, mc_opts], help="seeded Monte Carlo runs")
    p.add_argument("--target", choices=("H", "T"), default="H")
    p.add_argument("--length", type=int)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("ska", parents=[common, mc_opts], help="MC-enhanced Solovay-Kitaev trace")
    p.add_argument("--target", choices=("H", "T"), default="H")
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--length", type=int, help="base word length L0")
    p.add_argument("--restarts", type=int, default=1, help="MC restarts per base approximation")
    p.set_defaults(func=cmd_ska)

    p = sub.add_parser("cnot", parents=[common, mc_opts], help="two-qubit [CNOT]-class search")
    p.add_argument("--lengths", default="1")
    p.add_argument("--method", choices=("bf", "mc"), default="bf")
    p.add_argument("--du-cap", type=float, default=0.1)
    p.set_defaults(func=cmd_cnot)

    p = sub.add_parser("verify", help="check reference braidwords")
    p.add_argument("--fixtures", help="fixture JSON (defaults to the packaged file)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("word-eval", parents=[common], help="distance of a single word")
    p.add_argument("--word", required=True)
    p.add_argument("--target", choices=("H", "T", "CNOT"), default="H")
    p.set_defaults(func=cmd_word_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ModelError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
