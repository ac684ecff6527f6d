"""Command-line interface.

Subcommands: capacity, symmetrize, check-windows, simulate, sweep, selftest.
Exit codes: 0 success, 1 usage error, 2 config error, 3 runtime/solver error.
The AVC_LOG environment variable sets log verbosity (DEBUG/INFO/WARNING).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from . import __version__
from .capacity import (
    bitflip_list_capacity,
    list_capacity,
    oblivious_capacity,
    windowed_capacity_verdict,
)
from .codec import CodeConstructionError, HashParams, poly_hash
from .core import Channel, ConstraintSet, Distribution
from .harness import (
    ConfigError,
    format_csv,
    load_config,
    run_trials,
    sweep,
)
from .jammers import JammerGenerationError
from .lp import SimplexError
from .symmetrize import bitflip_symmetrizable, ecn_symmetrizable, scan_nonsymmetrizable
from .windows import verify_windows

log = logging.getLogger("winavc")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _setup_logging() -> None:
    level = os.environ.get("AVC_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc


def _emit(payload, args, columns=None) -> None:
    if args.format == "json":
        text = json.dumps(payload, indent=2, default=_jsonify) + "\n"
    else:
        rows = payload if isinstance(payload, list) else [payload]
        if columns is None:
            columns = list(rows[0].keys())
        text = format_csv(rows, columns)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _jsonify(obj):
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Distribution):
        return obj.probs.tolist()
    return str(obj)


def _spec_from_doc(doc: dict):
    from .core import Alphabet, WindowedAvcSpec

    sizes = doc["alphabets"]
    nx, ns, ny = int(sizes["x"]), int(sizes["s"]), int(sizes["y"])
    channel = Channel(np.asarray(doc["channel"], dtype=float).reshape(nx, ns, ny))
    gamma = ConstraintSet(nx, [(e["coeffs"], e["bound"]) for e in doc["gamma"]])
    lam = ConstraintSet(ns, [(e["coeffs"], e["bound"]) for e in doc["lambda"]])
    wins = doc.get("windows", {"w_x": doc.get("n", 64), "w_s": doc.get("n", 64)})
    n = int(doc.get("n", max(int(wins["w_x"]), int(wins["w_s"]))))
    return WindowedAvcSpec(
        x_alphabet=Alphabet(nx), s_alphabet=Alphabet(ns), y_alphabet=Alphabet(ny),
        channel=channel, gamma=gamma, lam=lam,
        w_x=int(wins["w_x"]), w_s=int(wins["w_s"]), n=n,
    )


def _cmd_capacity(args) -> int:
    doc = _load_json(args.config)
    try:
        spec = _spec_from_doc(doc)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad channel description: {exc}") from exc
    res = list_capacity(spec.gamma, spec.lam, spec.channel)
    verdict = windowed_capacity_verdict(spec)
    row = {
        "c_list": res.value,
        "c_ran": res.value,  # equal by the hash-embedding equivalence
        "gap_estimate": res.duality_gap_estimate,
        "argmax_px": list(np.round(res.argmax_px.probs, 9)),
        "argmin_qs": list(np.round(res.argmin_qs.probs, 9)),
        "verdict": verdict.status,
        "status": "ok",
    }
    if args.with_oblivious:
        obl = oblivious_capacity(spec.gamma, spec.lam, spec.channel)
        row["c_obl"] = obl.value
        row["all_symmetrizable_evidence"] = obl.all_symmetrizable_evidence
    _emit(row, args, columns=[k for k in row if not isinstance(row[k], list)])
    return EXIT_OK


def _cmd_symmetrize(args) -> int:
    doc = _load_json(args.config)
    try:
        spec = _spec_from_doc(doc)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad channel description: {exc}") from exc
    if args.scan:
        found = scan_nonsymmetrizable(spec.gamma, spec.channel, spec.lam, args.resolution)
        payload = {
            "non_symmetrizable_points": [p.probs.tolist() for p in found],
            "count": len(found),
            "all_symmetrizable_evidence": not found,
        }
        _emit(payload if args.format == "json" else
              {"count": len(found), "all_symmetrizable_evidence": not found,
               "status": "ok"}, args)
        return EXIT_OK
    if args.px:
        p_x = Distribution([float(v) for v in args.px.split(",")])
    else:
        p_x = spec.gamma.feasible_point()
    res = ecn_symmetrizable(p_x, spec.channel, spec.lam)
    row = {
        "p_x": p_x.probs.tolist(),
        "feasible": res.feasible,
        "residual": res.residual if res.feasible else float("nan"),
        "marginal": res.marginal.probs.tolist() if res.feasible else None,
        "witness": res.witness_matrix().tolist() if res.feasible else None,
    }
    if args.format == "json":
        _emit(row, args)
    else:
        _emit({"feasible": res.feasible,
               "residual": row["residual"], "status": "ok"}, args)
    return EXIT_OK


def _cmd_check_windows(args) -> int:
    doc = _load_json(args.config)
    try:
        seq = doc["sequence"]
        w = int(doc["window"])
        dim = int(doc.get("dim", max(seq) + 1 if seq else 2))
        cset = ConstraintSet(dim, [(e["coeffs"], e["bound"]) for e in doc["constraints"]])
        mode = doc.get("mode", "inclusive-range")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad window-check config: {exc}") from exc
    report = verify_windows(seq, w, cset, mode)
    payload = {
        "valid": report.valid,
        "windows_checked": report.windows_checked,
        "violations": [
            {"start": s, "type": d.probs.tolist()} for s, d in report.violations
        ],
    }
    if args.format == "json":
        _emit(payload, args)
    else:
        _emit({"valid": report.valid, "windows_checked": report.windows_checked,
               "violations": len(report.violations), "status": "ok"}, args)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = type(config)(
            spec=config.spec, code=config.code, jammer=config.jammer,
            trials=config.trials, master_seed=args.seed,
            error_criterion=config.error_criterion,
        )
    stats = run_trials(config, keep_records=False, threads=args.threads)
    row = {
        "trials": stats.trials,
        "err_avg": stats.err_avg,
        "err_max_est": stats.err_max_est,
        "ci_lo": stats.wilson_lo,
        "ci_hi": stats.wilson_hi,
        "jam_forfeits": stats.jam_forfeits,
        "jam_rejections": stats.jam_rejections_total,
        "status": "ok",
    }
    for k, v in stats.outcome_counts.items():
        row[f"n_{k}"] = v
    _emit(row, args)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    grid = _load_json(args.config)
    if args.seed is not None:
        grid["seed"] = args.seed
    rows = sweep(grid)
    _emit(rows, args)
    return EXIT_OK


def _cmd_selftest(args) -> int:
    failures = []

    def check(name: str, ok: bool) -> None:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
        if not ok:
            failures.append(name)

    xor = Channel.xor()
    val = list_capacity(
        ConstraintSet.weight_cap(0.2), ConstraintSet.weight_cap(0.1), xor
    ).value
    check("capacity closed form (w=0.2, p=0.1)",
          abs(val - bitflip_list_capacity(0.2, 0.1)) < 1e-3)

    ok = True
    for w, p in ((0.1, 0.2), (0.3, 0.1), (0.2, 0.2)):
        lp_ans = ecn_symmetrizable(
            Distribution.bernoulli(w), xor, ConstraintSet.weight_cap(p)
        ).feasible
        ok &= lp_ans == bitflip_symmetrizable(w, p)
    check("symmetrizability oracle (3 points)", ok)

    rng = np.random.default_rng(0)
    ok = True
    for _ in range(200):
        n = int(rng.integers(4, 33))
        w = int(rng.integers(1, n + 1))
        seq = rng.integers(0, 2, size=n)
        cap = float(rng.uniform(0.2, 0.9))
        cset = ConstraintSet.weight_cap(cap)
        got = verify_windows(seq, w, cset).valid
        want = all(
            seq[i : i + w].mean() <= cap + 1e-9 for i in range(n - w + 1)
        )
        ok &= got == want
    check("window verifier vs brute force (200 random cases)", ok)

    hp = HashParams(field_bits=4, chunk_count=2)
    f = hp.field()
    ok = True
    for d1 in range(1, 16):
        roots = sum(
            1 for r2 in range(16)
            if poly_hash([d1, 3], 0, r2, hp) == poly_hash([0, 3], 0, r2, hp)
        )
        ok &= roots <= hp.chunk_count
    check("hash degree bound (GF(16), K=2)", ok)

    if failures:
        print(f"{len(failures)} self-test(s) failed", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="winavc",
        description="Windowed adversarial-channel toolkit: capacities, "
        "symmetrizability, window checks, and jamming simulations.",
    )
    parser.add_argument("--version", action="version", version=f"winavc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("capacity", help="list-decoding capacity and equality verdict")
    common(p)
    p.add_argument("--with-oblivious", action="store_true",
                   help="also compute the unique-decoding (restricted) capacity")
    p.set_defaults(func=_cmd_capacity)

    p = sub.add_parser("symmetrize", help="symmetrizability feasibility check")
    common(p)
    p.add_argument("--px", help="input law as comma-separated probabilities")
    p.add_argument("--scan", action="store_true", help="grid-scan the input set")
    p.add_argument("--resolution", type=int, default=21)
    p.set_defaults(func=_cmd_symmetrize)

    p = sub.add_parser("check-windows", help="verify sliding-window constraints")
    common(p)
    p.set_defaults(func=_cmd_check_windows)

    p = sub.add_parser("simulate", help="Monte Carlo decoding-error simulation")
    common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sweep", help="parameter sweep with CSV output")
    common(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("selftest", help="run the built-in invariant battery")
    common(p, needs_config=False)
    p.set_defaults(func=_cmd_selftest)

    return parser


def cli_main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; --help/--version exit 0
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SimplexError, CodeConstructionError, JammerGenerationError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - last-resort diagnostics
        log.exception("unexpected failure")
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
