"""Command-line driver: run, verify, tamper, bench, storage.

Exit codes: 0 success/accept, 1 verification reject, 2 usage or input errors.
"""

import argparse
import csv
import random
import sys

from . import bench, bulletin, faults, numtheory, ope
from .auction import run_auction, verify_ordering, verify_payment, verify_winner
from .config import load_config
from .errors import AuctionError, BoardError, ConfigurationError

CSV_COLUMNS = [
    "kind", "phase", "l", "w", "z", "t", "rep",
    "tiered_ms", "benchmark_ms", "wall_ms", "elapsed_ms", "bytes",
]


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except BoardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AuctionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="veribid",
        description="verifiable privacy-preserving second-price ad auction simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one full auction and write its artifacts")
    p_run.add_argument("--config", required=True, help="flat key=value config file")
    p_run.add_argument("--out", default="auction", help="output path prefix")
    p_run.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key")
    p_run.set_defaults(handler=cmd_run)

    p_verify = sub.add_parser("verify", help="replay verification steps 1-2 from files")
    p_verify.add_argument("--board", required=True)
    p_verify.add_argument("--outcome", required=True)
    p_verify.set_defaults(handler=cmd_verify)

    p_tamper = sub.add_parser("tamper", help="inject a fault into a completed board")
    p_tamper.add_argument("--board", required=True)
    p_tamper.add_argument("--config", required=True,
                          help="the config the board was produced from")
    p_tamper.add_argument("--fault", required=True, choices=faults.FAULT_KINDS)
    p_tamper.add_argument("--out", default="tampered", help="output path prefix")
    p_tamper.add_argument("--set", action="append", default=[], metavar="KEY=VALUE")
    p_tamper.set_defaults(handler=cmd_tamper)

    p_bench = sub.add_parser("bench", help="latency and phase-cost sweeps as CSV")
    p_bench.add_argument("--bidders", default="20000,40000,60000,80000,100000",
                         help="comma list of l values for the latency sweep")
    p_bench.add_argument("--networks", default="60,80,100",
                         help="comma list of w values for the latency sweep")
    p_bench.add_argument("--z-values", default="",
                         help="comma list of bid-space sizes for the mapped-bid cost sweep")
    p_bench.add_argument("--phase-bidders", default="",
                         help="comma list of l values for the verification phase sweep")
    p_bench.add_argument("--reps", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--t", type=int, default=32)
    p_bench.add_argument("--out", default=None, help="CSV path (default stdout)")
    p_bench.set_defaults(handler=cmd_bench)

    p_storage = sub.add_parser("storage", help="per-party storage accounting")
    p_storage.add_argument("--board", required=True)
    p_storage.add_argument("--table", default=None, help="agent table path")
    p_storage.set_defaults(handler=cmd_storage)

    return parser


def _artifact_paths(prefix: str) -> tuple[str, str, str]:
    return f"{prefix}.board", f"{prefix}.table", f"{prefix}.outcome"


def write_outcome_file(path: str, outcome) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"winner_identity={outcome.winner_identity}\n")
        fh.write(f"winner_network={outcome.winner_network}\n")
        fh.write(f"payment_cents={outcome.payment_cents}\n")
        fh.write(f"mapped_payment={numtheory.to_hex(outcome.mapped_sec)}\n")


def read_outcome_file(path: str) -> dict[str, str]:
    claim = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            key, sep, value = text.partition("=")
            if not sep:
                raise ConfigurationError(f"{path}:{lineno}: not a key=value line")
            claim[key] = value
    for key in ("winner_identity", "winner_network", "payment_cents", "mapped_payment"):
        if key not in claim:
            raise ConfigurationError(f"{path}: missing {key}")
    return claim


def cmd_run(args) -> int:
    config = load_config(args.config, args.set)
    world, results, outcome = run_auction(config)
    board_path, table_path, outcome_path = _artifact_paths(args.out)
    world.board.save(board_path)
    ope.save_table(world.agent.table, table_path)
    write_outcome_file(outcome_path, outcome)
    print(
        f"winner={outcome.winner_identity} network={outcome.winner_network} "
        f"payment_cents={outcome.payment_cents}"
    )
    print(f"board={board_path} table={table_path} outcome={outcome_path}")
    return 0


def cmd_verify(args) -> int:
    board = bulletin.BulletinBoard.load(args.board)
    claim = read_outcome_file(args.outcome)

    outcome_posts = board.read(kind=bulletin.OUTCOME)
    if not outcome_posts:
        print("step1-winner: reject (no outcome on the board)")
        return 1
    posted = outcome_posts[0]
    network = claim["winner_network"]

    ok_winner = (
        posted.fields[0] == claim["winner_identity"]
        and posted.fields[1] == network
        and posted.fields[2] == claim["mapped_payment"]
    )
    reveal_r2 = _find_reveal(board, bulletin.REVEAL_WINNER_R, author=network)
    if ok_winner and reveal_r2 is not None:
        ok_winner = verify_winner(
            board, network, numtheory.from_hex(reveal_r2.fields[3]), int(claim["winner_identity"])
        )
    else:
        ok_winner = False
    print(f"step1-winner: {'accept' if ok_winner else 'reject'}")

    single_bid = claim["mapped_payment"] == "0"
    if single_bid:
        ok_payment = True
        print("step1-payment: skipped (no second price)")
    else:
        reveal_r1 = _find_reveal(board, bulletin.REVEAL_PAYMENT_R, author=board.header.auctioneer_id)
        attested = {int(claim["payment_cents"]): numtheory.from_hex(claim["mapped_payment"])}
        ok_payment = reveal_r1 is not None and verify_payment(
            board,
            int(claim["payment_cents"]),
            lambda cents: attested[cents],
            numtheory.from_hex(reveal_r1.fields[3]),
        )
        print(f"step1-payment: {'accept' if ok_payment else 'reject'}")

    if not (ok_winner and ok_payment):
        print("step2-ordering: not run (step 1 failed)")
        return 1

    if single_bid:
        print("step2-ordering: skipped (no second price)")
        return 0
    ordering = verify_ordering(board)
    if ordering.ok:
        print("step2-ordering: accept")
        return 0
    print(f"step2-ordering: reject at bidder {ordering.failed_index} ({ordering.detail})")
    return 1


def _find_reveal(board, name: str, author: str | None = None):
    for post in board.read(kind=bulletin.REVEAL, author=author):
        if post.fields[0] == name:
            return post
    return None


def cmd_tamper(args) -> int:
    config = load_config(args.config, args.set)
    with open(args.board, encoding="utf-8") as fh:
        original = fh.read()
    world, results, outcome = run_auction(config)
    if world.board.serialize() != original:
        print("error: board was not produced by this config (bytes differ)", file=sys.stderr)
        return 2
    rng = random.Random(numtheory.hash_to_int(b"veribid/tamper/v1", config.seed, args.fault))
    result = faults.tamper(world, results, outcome, args.fault, rng)
    board_path, _, outcome_path = _artifact_paths(args.out)
    result.board.save(board_path)
    write_outcome_file(outcome_path, result.outcome)
    culprits = ",".join(result.culprits) if result.culprits else "-"
    print(f"fault={args.fault} culprits={culprits}")
    print(f"board={board_path} outcome={outcome_path}")
    return 0


def _int_list(text: str) -> list[int]:
    return [int(item) for item in text.split(",") if item]


def cmd_bench(args) -> int:
    rows = []
    for l in _int_list(args.bidders):
        for w in _int_list(args.networks):
            for s in bench.measure_latency(l, w, args.reps, args.seed, t=args.t):
                rows.append(
                    {
                        "kind": "latency", "phase": "", "l": s.l, "w": s.w, "z": "",
                        "t": args.t, "rep": s.rep,
                        "tiered_ms": f"{s.tiered_ms:.6f}",
                        "benchmark_ms": f"{s.benchmark_ms:.6f}",
                        "wall_ms": f"{s.wall_ms:.6f}",
                        "elapsed_ms": "", "bytes": "",
                    }
                )
    for z in _int_list(args.z_values):
        for c in bench.measure_mapped_bid_cost(z, args.reps, args.seed, t=args.t):
            rows.append(_cost_row(c, args.t))
    for l in _int_list(args.phase_bidders):
        for c in bench.measure_verification_costs(l, args.reps, args.seed):
            rows.append(_cost_row(c, args.t))

    out = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        writer = csv.DictWriter(out, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    return 0


def _cost_row(cost: bench.PhaseCost, t: int) -> dict:
    return {
        "kind": "cost", "phase": cost.phase,
        "l": cost.l if cost.l is not None else "",
        "w": "", "z": cost.z if cost.z is not None else "",
        "t": t, "rep": cost.rep,
        "tiered_ms": "", "benchmark_ms": "", "wall_ms": "",
        "elapsed_ms": f"{cost.elapsed_ms:.6f}", "bytes": cost.bytes,
    }


def cmd_storage(args) -> int:
    report = bench.storage_report(args.board, args.table)
    for key, value in report.items():
        print(f"{key}={value}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
