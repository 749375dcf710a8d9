"""Command-line interface: code validation, codebook design, and sweeps."""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .arrays import ArrayGeometry, make_angle_grid
from .blockcode import (
    BlockCode,
    build_plain_code,
    build_reduced_code,
    decode,
    encode,
    int_to_bits,
    min_distance,
)
from .codebook import GsConfig, build_codebooks
from .experiments import (
    PRESETS,
    export_results,
    export_trial_log,
    load_config,
    run_sweep,
)
from .training import ceil_log2, training_overhead


def _parse_ris(text: str) -> tuple[int, int]:
    try:
        rows, cols = text.lower().split("x")
        return int(rows), int(cols)
    except Exception as exc:
        raise ValueError(f"--ris expects ROWSxCOLS, got {text!r}") from exc


def _matrix_lines(mat: np.ndarray) -> list[str]:
    return [" ".join(str(int(v)) for v in row) for row in mat]


def _correction_coverage(code: BlockCode) -> list[str]:
    """Brute-force correction counts for the printable report."""
    lines = []
    single_total = single_ok = 0
    words = [encode(code, int_to_bits(v, code.k)) for v in range(2**code.k)]
    for word, value in zip(words, range(2**code.k)):
        for pos in range(code.n):
            corrupted = word.copy()
            corrupted[pos] ^= 1
            decoded, _ = decode(code, corrupted, "one_bit")
            single_total += 1
            single_ok += int(np.array_equal(decoded, int_to_bits(value, code.k)))
    lines.append(f"single-bit errors corrected (one_bit): {single_ok}/{single_total}")
    if code.split is not None:
        k1, m1, k2, m2 = code.split
        side1 = list(range(k1)) + list(range(code.k, code.k + m1))
        side2 = list(range(k1, k1 + k2)) + list(range(code.k + m1, code.n))
        double_total = double_ok = 0
        for word, value in zip(words, range(2**code.k)):
            for p1, p2 in itertools.product(side1, side2):
                corrupted = word.copy()
                corrupted[p1] ^= 1
                corrupted[p2] ^= 1
                decoded, _ = decode(code, corrupted, "decoupled_two_bit")
                double_total += 1
                double_ok += int(np.array_equal(decoded, int_to_bits(value, code.k)))
        lines.append(
            "cross-dimension double errors corrected (decoupled_two_bit): "
            f"{double_ok}/{double_total}"
        )
    return lines


def _print_code(title: str, code: BlockCode) -> None:
    print(f"== {title} ==")
    split = ""
    if code.split is not None:
        k1, m1, k2, m2 = code.split
        split = f" split=(k1={k1}, m1={m1}, k2={k2}, m2={m2})"
    print(f"k={code.k} n={code.n}{split}")
    print("generator:")
    for line in _matrix_lines(code.generator):
        print(f"  {line}")
    print("check:")
    for line in _matrix_lines(code.check):
        print(f"  {line}")
    print(f"d_min: {min_distance(code)}")
    for line in _correction_coverage(code):
        print(line)


def cmd_overhead(args) -> int:
    ris = _parse_ris(args.ris)
    print(f"exhaustive: {training_overhead('exhaustive', args.nt, ris)}")
    print(f"hierarchical: {training_overhead('hierarchical', args.nt, ris)}")
    print(f"coded: {training_overhead('coded', args.nt, ris)}")
    return 0


def cmd_validate_code(args) -> int:
    if args.ris is None and args.nt is None:
        raise ValueError("give --ris ROWSxCOLS and/or --nt N")
    if args.nt is not None:
        _print_code(f"bs {args.nt} plain code", build_plain_code(ceil_log2(args.nt)))
    if args.ris is not None:
        rows, cols = _parse_ris(args.ris)
        code = build_reduced_code(ceil_log2(rows), ceil_log2(cols))
        _print_code(f"ris {rows}x{cols} dimension-split code", code)
    return 0


def _codeword_entry(vec: np.ndarray, report) -> dict:
    traces = [np.asarray(t) for t in report.traces]
    return {
        "codeword": [[float(c.real), float(c.imag)] for c in vec],
        "min_in": report.min_in,
        "max_out": report.max_out,
        "final_trace": float(traces[-1][-1]) if traces else None,
        "traces": [[float(x) for x in t] for t in traces],
    }


def cmd_design_codebook(args) -> int:
    ris = _parse_ris(args.ris)
    geometry = ArrayGeometry(args.nt, ris[0], ris[1])
    grid = make_angle_grid(geometry)
    cfg = GsConfig(delta=args.delta, k_iter=args.iters, seed=args.seed)
    code_t = build_plain_code(ceil_log2(args.nt))
    code_r = build_reduced_code(ceil_log2(ris[0]), ceil_log2(ris[1]))
    books = build_codebooks(code_t, code_r, grid, geometry, cfg,
                            direct_2d=args.direct_2d)
    payload = {
        "geometry": {"n_bs": args.nt, "n_ris_rows": ris[0], "n_ris_cols": ris[1]},
        "gs": {"delta": cfg.delta, "k_iter": cfg.k_iter, "seed": cfg.seed},
    }
    for book in books:
        payload[book.side] = {
            "layers": [
                {
                    "index": i + 1,
                    "one": _codeword_entry(pair.one, reports[0]),
                    "zero": _codeword_entry(pair.zero, reports[1]),
                }
                for i, (pair, reports) in enumerate(zip(book.layers, book.reports))
            ]
        }
    out = Path(args.out)
    out.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {out}")
    return 0


def _sweep_config(args, sweep_over: str):
    if args.config is not None:
        cfg = load_config(args.config)
        if cfg.sweep_over != sweep_over:
            cfg = replace(cfg, sweep_over=sweep_over)
    else:
        cfg = PRESETS[args.scale][sweep_over]()
    overrides = {}
    if args.trials is not None:
        overrides["trials"] = args.trials
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.noiseless:
        overrides["noiseless"] = True
    if args.ideal_beams:
        overrides["ideal_beams"] = True
    return replace(cfg, **overrides) if overrides else cfg


def _run_and_export(args, sweep_over: str) -> int:
    cfg = _sweep_config(args, sweep_over)
    results = run_sweep(cfg, log_trials=args.log_trials is not None)
    out = Path(args.out) if args.out else Path(f"results.{args.format}")
    export_results(results, out, args.format)
    if args.log_trials is not None:
        export_trial_log(results, args.log_trials)
    print(f"wrote {out}")
    return 0


def cmd_sweep_snr(args) -> int:
    return _run_and_export(args, "snr")


def cmd_sweep_pilots(args) -> int:
    return _run_and_export(args, "pilots")


def _add_sweep_flags(sub) -> None:
    sub.add_argument("--config", help="JSON experiment config file")
    sub.add_argument("--scale", choices=("desk", "full"), default="desk")
    sub.add_argument("--trials", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", help="output file (default results.<format>)")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--noiseless", action="store_true")
    sub.add_argument("--ideal-beams", action="store_true")
    sub.add_argument("--log-trials", metavar="PATH",
                     help="also write a per-trial CSV log")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="risbeam",
        description="Coded beam training for RIS-assisted links",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    over = subs.add_parser("overhead", help="print pilot overheads per framework")
    over.add_argument("--nt", type=int, required=True)
    over.add_argument("--ris", required=True, help="ROWSxCOLS, e.g. 16x16")
    over.set_defaults(func=cmd_overhead)

    val = subs.add_parser("validate-code", help="print code matrices and coverage")
    val.add_argument("--nt", type=int)
    val.add_argument("--ris", help="ROWSxCOLS, e.g. 8x8")
    val.set_defaults(func=cmd_validate_code)

    des = subs.add_parser("design-codebook", help="design and save the codebooks")
    des.add_argument("--nt", type=int, required=True)
    des.add_argument("--ris", required=True)
    des.add_argument("--delta", type=float, default=0.3)
    des.add_argument("--iters", type=int, default=100)
    des.add_argument("--seed", type=int, default=0)
    des.add_argument("--direct-2d", action="store_true",
                     help="design RIS codewords with the direct 2-D iteration")
    des.add_argument("--out", default="codebook.json")
    des.set_defaults(func=cmd_design_codebook)

    ssnr = subs.add_parser("sweep-snr", help="success rate and rate vs SNR")
    _add_sweep_flags(ssnr)
    ssnr.set_defaults(func=cmd_sweep_snr)

    spil = subs.add_parser("sweep-pilots", help="success rate and rate vs budget")
    _add_sweep_flags(spil)
    spil.set_defaults(func=cmd_sweep_pilots)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
