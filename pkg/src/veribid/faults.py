"""Fault injection against completed honest runs.

Each fault models an authorized insider lying: the corrupted posts are
re-signed with the culpable party's key, so signature checks pass and the
deeper verification machinery (re-encryption binding, ordering proofs,
patching) has to catch the lie.  Every fault returns a fresh board; the
honest world's board is never mutated.
"""

import random
from dataclasses import dataclass, replace

from . import bulletin, numtheory, paillier
from .auction import (
    AuctionOutcome,
    InternalResult,
    World,
    global_auction,
    make_internal_result,
    resolve_outcome,
)
from .errors import HarnessError, ProtocolError

FAULT_KINDS = (
    "wrong_winner",
    "inflated_payment",
    "swapped_marks",
    "forged_internal_result",
    "commitment_substitution",
)


@dataclass(frozen=True)
class TamperResult:
    board: bulletin.BulletinBoard
    outcome: AuctionOutcome           # the published (possibly lying) claim
    results: tuple[InternalResult, ...]  # what the networks submitted post-fault
    culprits: tuple[str, ...]         # networks injected as misbehaving


def tamper(
    world: World,
    results: list[InternalResult],
    outcome: AuctionOutcome,
    fault: str,
    rng: random.Random,
) -> TamperResult:
    if fault not in FAULT_KINDS:
        raise HarnessError(f"unknown fault kind {fault!r}; expected one of {FAULT_KINDS}")
    handler = {
        "wrong_winner": _wrong_winner,
        "inflated_payment": _inflated_payment,
        "swapped_marks": _swapped_marks,
        "forged_internal_result": _forged_internal_result,
        "commitment_substitution": _commitment_substitution,
    }[fault]
    return handler(world, results, outcome, rng)


def _copy_board(world: World) -> bulletin.BulletinBoard:
    return bulletin.BulletinBoard(world.board.header, list(world.board.posts))


def _replace_post(
    board: bulletin.BulletinBoard,
    seq: int,
    new_fields: tuple[str, ...],
    signer,
) -> None:
    old = board.get(seq)
    board.posts[seq - 1] = bulletin.make_post(seq, old.author, old.kind, new_fields, signer)


def _single_outcome_post(board: bulletin.BulletinBoard) -> bulletin.Post:
    posts = board.read(kind=bulletin.OUTCOME)
    if len(posts) != 1:
        raise HarnessError("tamper requires a completed run with one outcome post")
    return posts[0]


def _wrong_winner(world, results, outcome, rng) -> TamperResult:
    """Publish a different bidder as winner; the identity re-encryption check
    against the marked commitment must reject it."""
    board = _copy_board(world)
    post = _single_outcome_post(board)
    fake = next(
        (b.identity for b in world.bidders if b.identity != outcome.winner_identity), None
    )
    if fake is None:
        raise HarnessError("wrong_winner needs at least two bidders")
    fields = (str(fake),) + post.fields[1:]
    _replace_post(board, post.seq, fields, world.auctioneer.signer)
    return TamperResult(
        board=board,
        outcome=replace(outcome, winner_identity=fake),
        results=tuple(results),
        culprits=(),
    )


def _inflated_payment(world, results, outcome, rng) -> TamperResult:
    """Shift the claimed payment by one bid step (with a consistent mapped
    value, as a lying auctioneer would); re-encryption against the marked
    payment commitment must reject it."""
    if outcome.mapped_sec == 0:
        raise HarnessError("inflated_payment needs a real second price")
    space = world.agent.space
    new_cents = outcome.payment_cents + space.step_cents
    if new_cents > space.max_cents:
        new_cents = outcome.payment_cents - space.step_cents
    new_mapped = world.agent.table.map(new_cents)
    board = _copy_board(world)
    post = _single_outcome_post(board)
    fields = post.fields[:2] + (numtheory.to_hex(new_mapped),) + post.fields[3:]
    _replace_post(board, post.seq, fields, world.auctioneer.signer)
    return TamperResult(
        board=board,
        outcome=replace(outcome, payment_cents=new_cents, mapped_sec=new_mapped),
        results=tuple(results),
        culprits=(),
    )


def _swapped_marks(world, results, outcome, rng) -> TamperResult:
    """Swap which commitments the max and sec marks point at."""
    board = _copy_board(world)
    marks = board.read(kind=bulletin.MARK)
    if len(marks) != 2:
        raise HarnessError("swapped_marks needs both marks on the board")
    first, second = marks
    signer_for = {net.net_id: net.signer for net in world.networks.values()}
    _replace_post(board, first.seq, (first.fields[0], second.fields[1]), signer_for[first.author])
    _replace_post(board, second.seq, (second.fields[0], first.fields[1]), signer_for[second.author])
    return TamperResult(board=board, outcome=outcome, results=tuple(results), culprits=())


def _forged_internal_result(world, results, outcome, rng) -> TamperResult:
    """One network suppresses its true top bid and signs the lie; the global
    stage is re-run downstream so marks and outcome are consistent with the
    forgery, leaving the ordering proofs to expose the suppressed bid."""
    signer_keys = world.board.header.signer_keys
    for candidate in results:
        if candidate.top_value == 0:
            continue
        net = world.networks[candidate.net_id]
        if candidate.sec_value > 0:
            members = sorted(net.members, key=lambda m: (-m.mapped_bid, m.index))
            third = members[2] if len(members) > 2 else None
            forged = make_internal_result(
                net,
                candidate.sec_value,
                candidate.sec_index,
                third.mapped_bid if third else 0,
                third.index if third else 0,
            )
        else:
            forged = make_internal_result(net, 0, 0, 0, 0)
        forged_results = [forged if r.net_id == candidate.net_id else r for r in results]
        try:
            globals_ = global_auction(world.group, signer_keys, forged_results)
        except ProtocolError:
            continue
        # the suppressed bid must strictly exceed the forged second price,
        # otherwise every ordering proof still verifies
        if candidate.top_value > globals_.sec_value:
            cut = (world.config.l - 1) + world.config.l  # test sets + commitments
            board = bulletin.BulletinBoard(world.board.header, list(world.board.posts[:cut]))
            new_outcome = resolve_outcome(world, forged_results, board)
            return TamperResult(
                board=board,
                outcome=new_outcome,
                results=tuple(forged_results),
                culprits=(candidate.net_id,),
            )
    raise HarnessError("no network admits an outcome-changing forgery on this run")


def _commitment_substitution(world, results, outcome, rng) -> TamperResult:
    """A network swaps one member's posted bid commitment for an encryption of
    a larger mapped value after resolution; the stale ordering proof for that
    bidder must fail."""
    victim = next(
        (
            b
            for b in sorted(world.bidders, key=lambda b: b.index)
            if b.index not in (outcome.max_index, outcome.sec_index)
        ),
        None,
    )
    if victim is None:
        raise HarnessError("commitment_substitution needs a bidder outside the marks")
    if outcome.mapped_max > outcome.mapped_sec:
        new_value = outcome.mapped_max
    else:
        new_value = outcome.mapped_sec + 1
        if new_value >= (1 << world.config.t):
            raise HarnessError("no mapped value above the second price is representable")
    net = world.networks[victim.network_id]
    key = world.auctioneer.keys.public
    new_ct = paillier.encrypt(key, new_value, paillier.sample_randomness(key, rng))

    board = _copy_board(world)
    for post in board.read(kind=bulletin.COMMITMENT):
        if int(post.fields[0]) == victim.index:
            fields = (post.fields[0], numtheory.to_hex(new_ct.value), post.fields[2])
            _replace_post(board, post.seq, fields, net.signer)
            return TamperResult(
                board=board,
                outcome=outcome,
                results=tuple(results),
                culprits=(net.net_id,),
            )
    raise HarnessError("victim commitment not found on the board")
