"""Protocol orchestration: parties, the two-stage auction, and verification.

Parties and their private state:

* bidders hold an original bid and fetch its order-preserving image from the
  agent over oblivious transfer, so the agent never learns which bid;
* the agent owns the bid space and the mapping table, and resolves the
  payment from the winning mapped value at the end;
* ad networks hold their members' identities, mapped bids, and the per-member
  randomness used to commit both onto the bulletin board;
* the auctioneer holds the Paillier private key all bid commitments are made
  under, runs the global stage, and later acts as prover for the ordering
  verification.

An auction runs as: init (mapping, key material, commitments, test sets on
the board) -> internal top-two per network -> global top-two -> outcome
resolution (marks, outcome, reveals, ordering proofs).  Verification then
replays Steps 1-2 from the board alone; patching attributes a failure to
misbehaving networks by decrypting the posted commitments.
"""

import random
from dataclasses import dataclass

from . import bulletin, groupot, numtheory, ope, paillier, rangeproof, schnorr
from .config import WorldConfig
from .errors import ConfigurationError, DomainError, ProtocolError, RandomnessError
from .groupot import GroupParams
from .paillier import PaillierCiphertext, PaillierKeyPair

AUCTIONEER_ID = "auctioneer"
SENTINEL = 0  # stands in for "no second bid"; real mapped bids are >= 1


@dataclass
class Bidder:
    index: int          # global registration index, 1-based
    identity: int       # secret identity, a permutation of [1, l]
    bid_cents: int
    network_id: str
    ad_tag: bytes
    mapped_bid: int | None = None


@dataclass
class AdNetwork:
    net_id: str
    keys: PaillierKeyPair
    signer: schnorr.SigningKey
    members: list[Bidder]
    bid_randomness: dict[int, int]  # bidder index -> r used for the bid commitment
    id_randomness: dict[int, int]   # bidder index -> r used for the identity commitment

    def member_by_index(self, index: int) -> Bidder:
        for m in self.members:
            if m.index == index:
                return m
        raise ProtocolError(f"{self.net_id} cannot resolve member index {index}")


@dataclass
class Agent:
    space: ope.BidSpace
    table: ope.OpeTable

    def serve(self, y: int, params: GroupParams, rng: random.Random) -> groupot.OTBatch:
        return ope.serve_mapped_bids(self.table, y, params, rng)

    def mapped_for(self, bid_cents: int) -> int:
        return self.table.map(bid_cents)

    def payment_for(self, mapped_bid: int) -> int:
        return self.table.unmap(mapped_bid)


@dataclass
class Auctioneer:
    keys: PaillierKeyPair
    signer: schnorr.SigningKey
    test_sets: list[rangeproof.TestSet]


@dataclass
class World:
    config: WorldConfig
    group: GroupParams
    agent: Agent
    auctioneer: Auctioneer
    networks: dict[str, AdNetwork]
    bidders: list[Bidder]
    board: bulletin.BulletinBoard


@dataclass(frozen=True)
class InternalResult:
    """A network's signed top-two submission (values and member indexes)."""

    net_id: str
    top_value: int
    top_index: int
    sec_value: int
    sec_index: int
    signature: schnorr.Signature


@dataclass(frozen=True)
class GlobalOutcome:
    max_value: int
    max_index: int
    max_network: str
    sec_value: int
    sec_index: int
    sec_network: str
    flagged: tuple[str, ...]  # networks whose submissions failed signature checks


@dataclass(frozen=True)
class AuctionOutcome:
    winner_identity: int
    winner_network: str
    payment_cents: int
    mapped_max: int
    mapped_sec: int
    max_index: int
    sec_index: int  # SENTINEL when no second bid exists


@dataclass(frozen=True)
class OrderingResult:
    ok: bool
    failed_index: int | None = None
    detail: str = ""


def _stream(seed: int, name: str) -> random.Random:
    return random.Random(numtheory.hash_to_int(b"veribid/stream/v1", seed, name))


def init_auction(config: WorldConfig, bids: list[int] | None = None) -> World:
    """Build the world and run the initialization stage onto a fresh board.

    Bids are sampled uniformly from the bid space unless an explicit list of
    l cent amounts is supplied.
    """
    config.validate()
    if bids is not None and len(bids) != config.l:
        raise ConfigurationError(f"expected {config.l} bids, got {len(bids)}")
    space = ope.build_bid_space(config.z_min_cents, config.z_max_cents, config.z_step_cents)
    table = ope.generate_mapping(space, config.t, _stream(config.seed, "ope").randrange(2**63))
    group = groupot.group_setup(config.group_bits, _stream(config.seed, "group").randrange(2**63))
    if group.p <= (1 << config.t):
        raise ConfigurationError(
            f"group modulus of {group.p.bit_length()} bits cannot carry {config.t}-bit mapped bids"
        )

    auct_keys = paillier.keygen(config.key_bits, rng=_stream(config.seed, "auct-key"))
    if (1 << (config.t + 1)) >= auct_keys.n:
        raise ConfigurationError(f"key_bits={config.key_bits} too small for t={config.t}")
    auct_signer = schnorr.keygen(group, _stream(config.seed, "auct-sig"))

    networks: dict[str, AdNetwork] = {}
    for j in range(1, config.w + 1):
        net_id = f"net{j}"
        keys = paillier.keygen(config.key_bits, rng=_stream(config.seed, f"key-{net_id}"))
        if keys.n <= config.l:
            raise ConfigurationError("network key too small to encrypt identities")
        signer = schnorr.keygen(group, _stream(config.seed, f"sig-{net_id}"))
        networks[net_id] = AdNetwork(
            net_id=net_id,
            keys=keys,
            signer=signer,
            members=[],
            bid_randomness={},
            id_randomness={},
        )
    net_ids = list(networks)

    identities = list(range(1, config.l + 1))
    _stream(config.seed, "identities").shuffle(identities)
    bid_rng = _stream(config.seed, "bids")
    assign_rng = _stream(config.seed, "assignment")
    allowed = set(space.values) if bids is not None else None
    bidders = []
    for i in range(1, config.l + 1):
        if config.assignment == "round_robin":
            net_id = net_ids[(i - 1) % config.w]
        else:
            net_id = net_ids[assign_rng.randrange(config.w)]
        if bids is not None:
            cents = bids[i - 1]
            if cents not in allowed:
                raise ConfigurationError(f"bid {cents} is not in the bid space")
        else:
            cents = space.values[bid_rng.randrange(space.z)]
        bidder = Bidder(
            index=i,
            identity=identities[i - 1],
            bid_cents=cents,
            network_id=net_id,
            ad_tag=b"creative-%d" % identities[i - 1],
        )
        bidders.append(bidder)
        networks[net_id].members.append(bidder)

    agent = Agent(space=space, table=table)
    _fetch_mapped_bids(config, space, agent, group, bidders)

    signer_keys = {AUCTIONEER_ID: auct_signer.public}
    for net in networks.values():
        signer_keys[net.net_id] = net.signer.public
    header = bulletin.BoardHeader(
        auctioneer_id=AUCTIONEER_ID,
        bit_bound=config.t,
        group=group,
        auctioneer_n=auct_keys.n,
        network_keys={net_id: networks[net_id].keys.n for net_id in net_ids},
        signer_keys=signer_keys,
    )
    board = bulletin.BulletinBoard(header)

    ts_rng = _stream(config.seed, "test-sets")
    test_sets = []
    for tsid in range(1, config.l):
        ts = rangeproof.gen_test_set(auct_keys.public, config.t, ts_rng, tsid=tsid)
        test_sets.append(ts)
        board.post(AUCTIONEER_ID, bulletin.TESTSET, bulletin.testset_fields(ts.public()), auct_signer)

    com_rng = _stream(config.seed, "commitments")
    for bidder in bidders:
        net = networks[bidder.network_id]
        r1 = paillier.sample_randomness(auct_keys.public, com_rng)
        r2 = paillier.sample_randomness(net.keys.public, com_rng)
        net.bid_randomness[bidder.index] = r1
        net.id_randomness[bidder.index] = r2
        bid_ct = paillier.encrypt(auct_keys.public, bidder.mapped_bid, r1)
        id_ct = paillier.encrypt(net.keys.public, bidder.identity, r2)
        board.post(
            net.net_id,
            bulletin.COMMITMENT,
            bulletin.commitment_fields(bidder.index, bid_ct, id_ct),
            net.signer,
        )

    return World(
        config=config,
        group=group,
        agent=agent,
        auctioneer=Auctioneer(keys=auct_keys, signer=auct_signer, test_sets=test_sets),
        networks=networks,
        bidders=bidders,
        board=board,
    )


def _fetch_mapped_bids(config, space, agent, group, bidders) -> None:
    """Every bidder obtains her mapped bid; over OT or by direct table read.

    The direct mode models the registration-time pre-store (the transfer
    already happened before the auction) and exists for large sweeps where
    z transfers per bidder would dominate the run.
    """
    if config.fetch_mode == "direct":
        for bidder in bidders:
            bidder.mapped_bid = agent.table.map(bidder.bid_cents)
        return
    query_rng = _stream(config.seed, "ot-query")
    serve_rng = _stream(config.seed, "ot-serve")
    for bidder in bidders:
        alpha = ope.choice_index(space, bidder.bid_cents)
        query = groupot.ot_query(alpha, space.z, group, query_rng)
        batch = agent.serve(query.y, group, serve_rng)
        bidder.mapped_bid = groupot.ot_recover(batch.pairs[alpha - 1], query.r, group)


def _internal_message(net_id: str, top_value: int, top_index: int, sec_value: int, sec_index: int) -> bytes:
    return f"internal\t{net_id}\t{top_value}\t{top_index}\t{sec_value}\t{sec_index}".encode()


def make_internal_result(
    net: AdNetwork,
    top_value: int,
    top_index: int,
    sec_value: int,
    sec_index: int,
) -> InternalResult:
    sig = schnorr.sign(net.signer, _internal_message(net.net_id, top_value, top_index, sec_value, sec_index))
    return InternalResult(
        net_id=net.net_id,
        top_value=top_value,
        top_index=top_index,
        sec_value=sec_value,
        sec_index=sec_index,
        signature=sig,
    )


def internal_auction(net: AdNetwork) -> InternalResult:
    """Select the network's two highest mapped bids; ties go to the lower index.

    Empty networks and single-member networks fill the missing slots with the
    sentinel 0, which can never win against a real mapped bid.
    """
    ranked = sorted(net.members, key=lambda m: (-m.mapped_bid, m.index))[:2]
    top_value, top_index = (ranked[0].mapped_bid, ranked[0].index) if ranked else (SENTINEL, SENTINEL)
    sec_value, sec_index = (ranked[1].mapped_bid, ranked[1].index) if len(ranked) > 1 else (SENTINEL, SENTINEL)
    return make_internal_result(net, top_value, top_index, sec_value, sec_index)


def verify_internal_signature(group: GroupParams, public: int, result: InternalResult) -> bool:
    message = _internal_message(
        result.net_id, result.top_value, result.top_index, result.sec_value, result.sec_index
    )
    return schnorr.verify(group, public, message, result.signature)


def global_auction(
    group: GroupParams,
    signer_keys: dict[str, int],
    results: list[InternalResult],
) -> GlobalOutcome:
    """Pick the global top-two over the union of submitted pairs.

    Submissions with bad signatures are dropped and their networks flagged.
    """
    flagged = []
    candidates = []  # (value, index, network)
    for result in results:
        public = signer_keys.get(result.net_id)
        if public is None or not verify_internal_signature(group, public, result):
            flagged.append(result.net_id)
            continue
        if result.top_value > SENTINEL:
            candidates.append((result.top_value, result.top_index, result.net_id))
        if result.sec_value > SENTINEL:
            candidates.append((result.sec_value, result.sec_index, result.net_id))
    if not candidates:
        raise ProtocolError("no bids reached the global stage")
    candidates.sort(key=lambda c: (-c[0], c[1]))
    max_value, max_index, max_network = candidates[0]
    if len(candidates) > 1:
        sec_value, sec_index, sec_network = candidates[1]
    else:
        sec_value, sec_index, sec_network = SENTINEL, SENTINEL, ""
    return GlobalOutcome(
        max_value=max_value,
        max_index=max_index,
        max_network=max_network,
        sec_value=sec_value,
        sec_index=sec_index,
        sec_network=sec_network,
        flagged=tuple(flagged),
    )


def commitment_posts_by_index(board: bulletin.BulletinBoard) -> dict[int, bulletin.Post]:
    posts = {}
    for post in board.read(kind=bulletin.COMMITMENT):
        index = int(post.fields[0])
        posts[index] = post
    return posts


def resolve_outcome(
    world: World,
    results: list[InternalResult],
    board: bulletin.BulletinBoard | None = None,
) -> AuctionOutcome:
    """Run the global stage and publish marks, outcome, reveals, and proofs."""
    board = board if board is not None else world.board
    signer_keys = board.header.signer_keys
    globals_ = global_auction(world.group, signer_keys, results)

    winner_net = world.networks[globals_.max_network]
    winner = winner_net.member_by_index(globals_.max_index)
    if globals_.sec_value > SENTINEL:
        payment_cents = world.agent.payment_for(globals_.sec_value)
    else:
        payment_cents = 0  # degenerate single-bid auction: reserve sentinel

    commitments = commitment_posts_by_index(board)
    max_mark = board.post(
        winner_net.net_id,
        bulletin.MARK,
        bulletin.mark_fields("max", commitments[globals_.max_index].seq),
        winner_net.signer,
    )
    sec_mark = None
    if globals_.sec_value > SENTINEL:
        sec_net = world.networks[globals_.sec_network]
        sec_mark = board.post(
            sec_net.net_id,
            bulletin.MARK,
            bulletin.mark_fields("sec", commitments[globals_.sec_index].seq),
            sec_net.signer,
        )

    auct = world.auctioneer
    board.post(
        AUCTIONEER_ID,
        bulletin.OUTCOME,
        bulletin.outcome_fields(
            winner.identity,
            winner_net.net_id,
            globals_.sec_value,
            max_mark.seq,
            sec_mark.seq if sec_mark else None,
        ),
        auct.signer,
    )

    if globals_.sec_value > SENTINEL:
        _, sec_ct, _ = bulletin.parse_commitment(board.header, commitments[globals_.sec_index])
        r1_sec = paillier.recover_random(auct.keys, sec_ct)
        board.post(
            AUCTIONEER_ID,
            bulletin.REVEAL,
            (bulletin.REVEAL_PAYMENT_R, bulletin.ABSENT, bulletin.ABSENT, numtheory.to_hex(r1_sec)),
            auct.signer,
        )
    r2_max = winner_net.id_randomness[globals_.max_index]
    board.post(
        winner_net.net_id,
        bulletin.REVEAL,
        (bulletin.REVEAL_WINNER_R, winner_net.net_id, bulletin.ABSENT, numtheory.to_hex(r2_max)),
        winner_net.signer,
    )

    if globals_.sec_value > SENTINEL:
        post_ordering_proofs(world, board, globals_.max_index, globals_.sec_index)

    return AuctionOutcome(
        winner_identity=winner.identity,
        winner_network=winner_net.net_id,
        payment_cents=payment_cents,
        mapped_max=globals_.max_value,
        mapped_sec=globals_.sec_value,
        max_index=globals_.max_index,
        sec_index=globals_.sec_index,
    )


def comparison_order(indexes: list[int], max_index: int, sec_index: int) -> list[tuple[str, int, int]]:
    """Canonical (ref, minuend index, subtrahend index) list for the l-1 proofs."""
    comparisons = [("max", max_index, sec_index)]
    for i in indexes:
        if i not in (max_index, sec_index):
            comparisons.append((str(i), sec_index, i))
    return comparisons


def post_ordering_proofs(
    world: World,
    board: bulletin.BulletinBoard,
    max_index: int,
    sec_index: int,
    ts_order: list[int] | None = None,
) -> None:
    """Prover role: one difference range proof per pairwise comparison.

    The auctioneer decrypts every posted bid commitment with phi and recovers
    its randomness, so proofs are built from the board state, not from what
    networks reported.  A comparison whose difference is negative (possible
    only after tampering) gets the zero-claim proof: resolution completes and
    verification rejects at that index.
    """
    auct = world.auctioneer
    key = auct.keys
    commitments = commitment_posts_by_index(board)
    values = {}
    randoms = {}
    for index, post in commitments.items():
        _, ct, _ = bulletin.parse_commitment(board.header, post)
        values[index] = paillier.decrypt_with_phi(key, ct)
        randoms[index] = paillier.recover_random(key, ct)

    test_sets = {ts.tsid: ts for ts in auct.test_sets}
    comparisons = comparison_order(sorted(commitments), max_index, sec_index)
    order = ts_order if ts_order is not None else [ts.tsid for ts in auct.test_sets]
    if len(order) < len(comparisons):
        raise ProtocolError("not enough test sets for the pairwise comparisons")
    for (ref, hi, lo), tsid in zip(comparisons, order):
        diff = values[hi] - values[lo]
        r_diff = randoms[hi] * numtheory.invmod(randoms[lo], key.n) % key.n
        proof = rangeproof.prove_range(key.public, test_sets[tsid], max(diff, 0), r_diff)
        board.post(AUCTIONEER_ID, bulletin.REVEAL, bulletin.proof_fields(ref, proof), auct.signer)


def run_auction(config: WorldConfig) -> tuple[World, list[InternalResult], AuctionOutcome]:
    """Full honest pipeline: init, internal stage, global stage, resolution."""
    world = init_auction(config)
    results = [internal_auction(net) for net in world.networks.values()]
    outcome = resolve_outcome(world, results)
    return world, results, outcome


# ---------------------------------------------------------------------------
# verification


def _marked_commitment(board: bulletin.BulletinBoard, role: str) -> bulletin.Post | None:
    for post in board.read(kind=bulletin.MARK):
        if post.fields[0] == role:
            return board.get(int(post.fields[1]))
    return None


def verify_winner(
    board: bulletin.BulletinBoard,
    network_id: str,
    r2_max: int,
    claimed_identity: int,
) -> bool:
    """Re-encrypt the claimed identity and compare against the marked one."""
    marked = _marked_commitment(board, "max")
    if marked is None:
        return False
    n_j = board.header.network_keys.get(network_id)
    if n_j is None or marked.author != network_id:
        return False
    _, _, id_value = bulletin.parse_commitment(board.header, marked)
    try:
        re_encrypted = paillier.encrypt(
            paillier.PaillierPublicKey(n_j, n_j * n_j), claimed_identity, r2_max
        )
    except (DomainError, RandomnessError):
        return False
    return re_encrypted.value == id_value


def verify_payment(
    board: bulletin.BulletinBoard,
    claimed_cents: int,
    mapped_lookup,
    r1_sec: int,
) -> bool:
    """Ask the agent for the mapped payment, re-encrypt, compare to the mark."""
    marked = _marked_commitment(board, "sec")
    if marked is None:
        return False
    outcomes = board.read(kind=bulletin.OUTCOME)
    if not outcomes:
        return False
    try:
        mapped = mapped_lookup(claimed_cents)
    except (DomainError, KeyError):
        return False
    if numtheory.to_hex(mapped) != outcomes[0].fields[2]:
        return False
    _, bid_ct, _ = bulletin.parse_commitment(board.header, marked)
    n = board.header.auctioneer_n
    try:
        re_encrypted = paillier.encrypt(paillier.PaillierPublicKey(n, n * n), mapped, r1_sec)
    except (DomainError, RandomnessError):
        return False
    return re_encrypted.value == bid_ct.value


def verify_ordering(board: bulletin.BulletinBoard) -> OrderingResult:
    """Check every posted difference proof against the board commitments.

    Establishes mapped_max >= mapped_sec and mapped_sec >= every other
    mapped bid; returns the bidder index of the first violated comparison.
    Test sets may not be reused across comparisons.
    """
    header = board.header
    n = header.auctioneer_n
    key = paillier.PaillierPublicKey(n, n * n)
    max_post = _marked_commitment(board, "max")
    sec_post = _marked_commitment(board, "sec")
    if max_post is None or sec_post is None:
        return OrderingResult(ok=False, detail="marks are missing")
    max_index, max_ct, _ = bulletin.parse_commitment(header, max_post)
    sec_index, sec_ct, _ = bulletin.parse_commitment(header, sec_post)

    commitments = {}
    for post in board.read(kind=bulletin.COMMITMENT):
        index, ct, _ = bulletin.parse_commitment(header, post)
        commitments[index] = ct
    test_sets = {}
    for post in board.read(kind=bulletin.TESTSET):
        ts = bulletin.parse_testset(header, post)
        test_sets[ts.tsid] = ts
    proofs = {}
    for post in board.read(kind=bulletin.REVEAL):
        if post.fields[0] == bulletin.REVEAL_PROOF:
            proofs[post.fields[1]] = post

    consumed = set()
    for ref, hi, lo in comparison_order(sorted(commitments), max_index, sec_index):
        failed_index = max_index if ref == "max" else lo
        post = proofs.get(ref)
        if post is None:
            return OrderingResult(ok=False, failed_index=failed_index, detail=f"no proof for {ref}")
        subject = rangeproof.diff_ciphertext(key, commitments[hi], commitments[lo])
        ref_back, proof = bulletin.parse_proof(header, post, subject)
        ts = test_sets.get(proof.tsid)
        if ts is None or proof.tsid in consumed:
            return OrderingResult(
                ok=False, failed_index=failed_index, detail=f"bad test set for {ref}"
            )
        consumed.add(proof.tsid)
        if not rangeproof.verify_range(key, ts, subject, proof):
            return OrderingResult(
                ok=False, failed_index=failed_index, detail=f"comparison {ref} fails"
            )
    return OrderingResult(ok=True)


def patch_verify(
    keys: PaillierKeyPair,
    board: bulletin.BulletinBoard,
    results: list[InternalResult],
) -> list[str]:
    """Decrypt all commitments, recompute each network's true top-two, and
    return every network whose submission disagrees.  An empty list means the
    submissions were honest (so a failed verification falls on the auctioneer).
    """
    by_network: dict[str, list[tuple[int, int]]] = {}
    for post in board.read(kind=bulletin.COMMITMENT):
        index, ct, _ = bulletin.parse_commitment(board.header, post)
        by_network.setdefault(post.author, []).append(
            (paillier.decrypt_with_phi(keys, ct), index)
        )
    blamed = []
    for result in results:
        entries = sorted(by_network.get(result.net_id, []), key=lambda e: (-e[0], e[1]))
        top = entries[0] if entries else (SENTINEL, SENTINEL)
        sec = entries[1] if len(entries) > 1 else (SENTINEL, SENTINEL)
        if (result.top_value, result.top_index) != top or (result.sec_value, result.sec_index) != sec:
            blamed.append(result.net_id)
    return sorted(blamed)


# ---------------------------------------------------------------------------
# privacy audit


def scan_board(board: bulletin.BulletinBoard, secret_values) -> list[tuple[int, str]]:
    """Find plaintext occurrences of secret values in the board's value fields.

    Compares every value-bearing payload token against the decimal and the
    canonical hex encoding of each secret; returns (seq, token) pairs.
    """
    needles = set()
    for value in secret_values:
        needles.add(str(value))
        needles.add(numtheory.to_hex(value))
    hits = []
    for post in board.posts:
        for token in bulletin.value_tokens(post):
            if token in needles:
                hits.append((post.seq, token))
    return hits


def privacy_violations(world: World, outcome: AuctionOutcome) -> list[tuple[int, str]]:
    """Privacy audit: no original bid, and no identity other than the
    published winner's, may appear on the board in plaintext form."""
    secrets = {b.bid_cents for b in world.bidders}
    secrets |= {b.identity for b in world.bidders if b.identity != outcome.winner_identity}
    return scan_board(world.board, secrets)
