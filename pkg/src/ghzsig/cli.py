"""Command-line front end.

Exit codes: 0 when the scenario succeeds, 1 when something is rejected or
detected (the expected outcome of most attack demos), 2 for usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import fields, replace
from typing import Sequence

import numpy as np

from . import bits as B
from .errors import GhzSigError, InvalidArgumentError
from .fingerprint import (
    accept_probability,
    codeword_length,
    encode,
    make_code,
    make_fingerprint,
    min_distance,
    overlap,
    repetition_code,
    swap_test,
)
from .harness import (
    REFERENCE_ROWS,
    Attack,
    ScenarioConfig,
    ScenarioReport,
    run_scenario,
    table1_row,
)
from .qkd_otp import DEFAULT_QBER_THRESHOLD, DEFAULT_SAMPLE_FRACTION, bb84_exchange
from .signature_protocol import Verdict

EXIT_OK, EXIT_REJECTED, EXIT_USAGE = 0, 1, 2
STATS_MODES = ("random", "equal", "orthogonal")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positions(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def fingerprint_stats(
    n: int,
    c: float,
    code_seed: int,
    trials: int,
    rng: np.random.Generator,
    pairs: int = 3,
    mode: str = "random",
    exact: bool = True,
) -> dict:
    """Compare empirical swap-test accept rates with ``(1 + s^2) / 2``.

    ``mode="orthogonal"`` uses a repetition code where the all-zeros and
    all-ones inputs have disjoint codewords; ``mode="equal"`` tests each
    random input against itself.
    """
    if mode not in STATS_MODES:
        raise InvalidArgumentError(f"mode must be one of {STATS_MODES}, got {mode!r}")
    if trials < 1 or pairs < 1:
        raise InvalidArgumentError("trials and pairs must be >= 1")
    if mode == "orthogonal":
        code = repetition_code(n, codeword_length(n, c))
        inputs = [("0" * n, "1" * n)] * pairs
    else:
        code = make_code(n, c, code_seed)
        inputs = []
        for _ in range(pairs):
            x = B.random_bits(n, rng)
            y = x
            while mode == "random" and y == x and n > 0:
                y = B.random_bits(n, rng)
            inputs.append((x, y))
    d_min = min_distance(code) if exact else None

    rows = []
    for x, y in inputs:
        s = overlap(make_fingerprint(code, x), make_fingerprint(code, y))
        p = accept_probability(s)
        accepts = sum(swap_test(make_fingerprint(code, x), make_fingerprint(code, y), rng) for _ in range(trials))
        rate = accepts / trials
        se = math.sqrt(p * (1 - p) / trials)
        if se > 0:
            dev = (rate - p) / se
            ok = abs(dev) < 3
        else:
            dev = 0.0 if rate == p else None
            ok = rate == p
        rows.append(
            {
                "x": x,
                "y": y,
                "hamming_distance": B.hamming(encode(code, x), encode(code, y)),
                "overlap": s,
                "analytic_accept": p,
                "empirical_accept": rate,
                "std_error": se,
                "deviation_se": dev,
                "within_3se": ok,
            }
        )
    return {
        "mode": mode,
        "n": code.n,
        "m": code.m,
        "c": code.c,
        "code_seed": code.seed,
        "d_min": d_min,
        "trials": trials,
        "pairs": rows,
        "all_within_3se": all(r["within_3se"] for r in rows),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ghzsig", description="GHZ-triplet signature protocol simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def scenario_flags(p):
        p.add_argument("--n", type=int, help="message length N")
        p.add_argument("--message", help="N-bit message, or 'random'")
        p.add_argument("--c", type=float, help="fingerprint expansion ratio (> 1)")
        p.add_argument("--code-seed", type=int, help="seed for Alice's code")
        p.add_argument("--r", type=int, help="fingerprint copies deposited with Trent")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--bb84-raw", type=int, help="raw BB84 qubit count (default max(64, 8N))")
        p.add_argument("--sample-fraction", type=float)
        p.add_argument("--threshold", type=float, help="QBER abort threshold")
        p.add_argument("--config", help="JSON file with ScenarioConfig defaults")
        p.add_argument("--runs", type=int, default=1, help="consecutive seeds to run (JSON lines)")
        p.add_argument("--parallel", type=int, default=1, help="worker processes for --runs")
        p.add_argument("--timing", action="store_true", help="include wall_time in reports")
        p.add_argument("--output", help="write to this file instead of stdout")

    scenario_flags(sub.add_parser("honest", help="honest signing and verification"))
    eve = sub.add_parser("eve", help="Eve tampers with the returning signature particles")
    scenario_flags(eve)
    which = eve.add_mutually_exclusive_group(required=True)
    which.add_argument("--flip", type=_positions, help="positions Eve sigma-x flips")
    which.add_argument("--phase", type=_positions, help="positions Eve sigma-z flips")
    eve.add_argument("--flip-ciphertext", action="store_true", help="also flip those E_K{M} bits")
    forge = sub.add_parser("forge", help="Bob forges a message and Trent arbitrates")
    scenario_flags(forge)
    forge.add_argument("--forge", type=_positions, help="bits Bob flips (default: one random bit)")
    scenario_flags(sub.add_parser("disavow", help="Alice disavows and Trent arbitrates"))

    bb = sub.add_parser("bb84", help="one BB84 exchange")
    bb.add_argument("--raw", type=int, default=10_000)
    bb.add_argument("--eve", action="store_true", help="full intercept-resend")
    bb.add_argument("--sample-fraction", type=float, default=DEFAULT_SAMPLE_FRACTION)
    bb.add_argument("--threshold", type=float, default=DEFAULT_QBER_THRESHOLD)
    bb.add_argument("--seed", type=int, default=0)
    bb.add_argument("--output")

    t1 = sub.add_parser("table1", help="transmitted-qubit counts per channel")
    t1.add_argument("--n", type=int, default=64)
    t1.add_argument("--c", type=float, default=2.0)
    t1.add_argument("--r", type=int, default=1)
    t1.add_argument("--reference", action="store_true", help="also print the comparison schemes")
    t1.add_argument("--output")

    fs = sub.add_parser("fingerprint-stats", help="swap-test statistics against theory")
    fs.add_argument("--n", type=int, default=4)
    fs.add_argument("--c", type=float, default=2.0)
    fs.add_argument("--code-seed", type=int, default=7)
    fs.add_argument("--seed", type=int, default=0)
    fs.add_argument("--trials", type=int, default=2_000)
    fs.add_argument("--pairs", type=int, default=3)
    fs.add_argument("--mode", choices=STATS_MODES, default="random")
    fs.add_argument("--no-exact", action="store_true", help="skip exhaustive d_min (needed for n > 16)")
    fs.add_argument("--output")
    return parser


_FLAG_TO_FIELD = {
    "n": "n_bits",
    "message": "message",
    "c": "c_requested",
    "code_seed": "code_seed",
    "r": "r_copies",
    "seed": "master_seed",
    "bb84_raw": "bb84_raw_count",
    "sample_fraction": "sample_fraction",
    "threshold": "qber_threshold",
}
_ATTACK_FOR_COMMAND = {
    "honest": Attack.NONE,
    "forge": Attack.BOB_FORGE,
    "disavow": Attack.ALICE_DISAVOW,
}


def config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    values: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        known = {f.name for f in fields(ScenarioConfig)}
        unknown = set(loaded) - known
        if unknown:
            raise InvalidArgumentError(f"unknown config keys: {sorted(unknown)}")
        if "attack" in loaded:
            loaded["attack"] = Attack(loaded["attack"])
        values.update(loaded)
    for flag, name in _FLAG_TO_FIELD.items():
        v = getattr(args, flag)
        if v is not None:
            values[name] = v
    config = ScenarioConfig(**values)

    if args.command == "eve":
        n = config.n_bits
        if args.flip is not None:
            config = replace(config, attack=Attack.EVE_FLIP, mask=B.mask_from_positions(n, args.flip))
        else:
            config = replace(config, attack=Attack.EVE_PHASE, mask=B.mask_from_positions(n, args.phase))
        config = replace(config, eve_flips_ciphertext=args.flip_ciphertext)
    else:
        config = replace(config, attack=_ATTACK_FOR_COMMAND[args.command], mask=None)
        if args.command == "forge" and args.forge is not None:
            config = replace(config, forge_mask=B.mask_from_positions(config.n_bits, args.forge))
    return config.validate()


def _succeeded(report: ScenarioReport) -> bool:
    return report.accepted and report.arbitration_verdict is not Verdict.INVALID


def _emit(lines: list[str], output: str | None) -> None:
    text = "".join(line + "\n" for line in lines)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_scenarios(args) -> int:
    config = config_from_args(args)
    if args.runs < 1 or args.parallel < 1:
        raise InvalidArgumentError("--runs and --parallel must be >= 1")
    configs = [replace(config, master_seed=config.master_seed + i) for i in range(args.runs)]
    if args.parallel > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            reports = list(pool.map(run_scenario, configs))
    else:
        reports = [run_scenario(c) for c in configs]
    _emit([r.to_json(include_timing=args.timing) for r in reports], args.output)
    return EXIT_OK if all(_succeeded(r) for r in reports) else EXIT_REJECTED


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("honest", "eve", "forge", "disavow"):
            return _run_scenarios(args)
        if args.command == "bb84":
            report = bb84_exchange(
                args.raw, args.eve, args.sample_fraction, args.threshold, np.random.default_rng(args.seed)
            )
            _emit([json.dumps(report.to_dict())], args.output)
            return EXIT_REJECTED if report.aborted else EXIT_OK
        if args.command == "table1":
            row = table1_row(args.n, args.c, args.r)
            out = {"ours": row, "reference": REFERENCE_ROWS} if args.reference else row
            _emit([json.dumps(out)], args.output)
            return EXIT_OK
        if args.command == "fingerprint-stats":
            stats = fingerprint_stats(
                args.n,
                args.c,
                args.code_seed,
                args.trials,
                np.random.default_rng(args.seed),
                pairs=args.pairs,
                mode=args.mode,
                exact=not args.no_exact,
            )
            _emit([json.dumps(stats)], args.output)
            return EXIT_OK if stats["all_within_3se"] else EXIT_REJECTED
    except (GhzSigError, OSError, json.JSONDecodeError, TypeError) as exc:
        sys.stderr.write(f"ghzsig: error: {exc}\n")
        return EXIT_USAGE
    parser.error(f"unknown command {args.command!r}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
