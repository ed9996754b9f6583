"""Certificated bulletin board: a signed, append-only, replayable log.

One auction per file.  The header line carries everything a third party
needs to check signatures and re-run the verification steps: the group
parameters, the auctioneer's Paillier modulus, each ad network's modulus,
the bit bound t, and the registered signer keys.  Every post is one line of
tab-separated fields; the signature input is the exact serialized line minus
the trailing signature field, so any reader can re-verify byte-for-byte.

Post kinds and their payload fields:

    testset     tsid, t, entries (comma-joined ciphertext hex)
    commitment  bidder_index, bid ciphertext hex, identity ciphertext hex
    mark        role (max|sec), commitment seq
    outcome     winner identity, winner network, mapped payment hex,
                max mark seq, sec mark seq ("-" when absent)
    reveal      name, ref, aux, data (comma-joined hex values)

Reveal names: "payment_randomness" (auctioneer-recovered r for the marked
payment ciphertext), "winner_randomness" (network-published r for the marked
identity ciphertext), and "ordering_proof" (one per pairwise comparison:
ref is "max" or the compared bidder index, aux is the consumed test-set id,
data is the selected ciphertexts followed by the combined randomness).
"""

from dataclasses import dataclass, field

from . import numtheory, schnorr
from .errors import AuthorizationError, BoardError, SignatureError
from .groupot import GroupParams
from .paillier import PaillierCiphertext
from .rangeproof import RangeProof, TestSetPublic

MAGIC = "veribid-board/1"

TESTSET = "testset"
COMMITMENT = "commitment"
MARK = "mark"
OUTCOME = "outcome"
REVEAL = "reveal"

_FIELD_COUNTS = {TESTSET: 3, COMMITMENT: 3, MARK: 2, OUTCOME: 5, REVEAL: 4}

REVEAL_PAYMENT_R = "payment_randomness"
REVEAL_WINNER_R = "winner_randomness"
REVEAL_PROOF = "ordering_proof"

ABSENT = "-"


@dataclass(frozen=True)
class BoardHeader:
    auctioneer_id: str
    bit_bound: int
    group: GroupParams
    auctioneer_n: int
    network_keys: dict[str, int]  # network id -> n_j
    signer_keys: dict[str, int]   # author id -> Schnorr public key


@dataclass(frozen=True)
class Post:
    seq: int
    author: str
    kind: str
    fields: tuple[str, ...]
    signature: schnorr.Signature


def signing_bytes(seq: int, author: str, kind: str, fields: tuple[str, ...]) -> bytes:
    return "\t".join([str(seq), author, kind, *fields]).encode()


def make_post(
    seq: int,
    author: str,
    kind: str,
    fields: tuple[str, ...],
    key: schnorr.SigningKey,
) -> Post:
    for f in fields:
        if "\t" in f or "\n" in f or not f:
            raise BoardError(f"illegal payload field: {f!r}")
    if kind not in _FIELD_COUNTS:
        raise BoardError(f"unknown post kind: {kind}")
    if len(fields) != _FIELD_COUNTS[kind]:
        raise BoardError(f"{kind} posts carry {_FIELD_COUNTS[kind]} fields, got {len(fields)}")
    sig = schnorr.sign(key, signing_bytes(seq, author, kind, fields))
    return Post(seq=seq, author=author, kind=kind, fields=fields, signature=sig)


class BulletinBoard:
    """Single-writer append-only log; reads never mutate state."""

    def __init__(self, header: BoardHeader, posts: list[Post] | None = None):
        self.header = header
        self.posts: list[Post] = list(posts) if posts else []

    def post(
        self,
        author: str,
        kind: str,
        fields: tuple[str, ...],
        key: schnorr.SigningKey,
    ) -> Post:
        registered = self.header.signer_keys.get(author)
        if registered is None:
            raise AuthorizationError(f"{author!r} is not an authorized board writer")
        if key.public != registered:
            raise SignatureError(f"signing key does not match the registration for {author!r}")
        entry = make_post(len(self.posts) + 1, author, kind, fields, key)
        self.posts.append(entry)
        return entry

    def get(self, seq: int) -> Post:
        if not 1 <= seq <= len(self.posts):
            raise BoardError(f"no post with seq {seq}")
        return self.posts[seq - 1]

    def verify_post(self, seq: int) -> bool:
        entry = self.get(seq)
        public = self.header.signer_keys.get(entry.author)
        if public is None:
            return False
        message = signing_bytes(entry.seq, entry.author, entry.kind, entry.fields)
        return schnorr.verify(self.header.group, public, message, entry.signature)

    def read(self, kind: str | None = None, author: str | None = None) -> list[Post]:
        return [
            p
            for p in self.posts
            if (kind is None or p.kind == kind) and (author is None or p.author == author)
        ]

    def serialize(self) -> str:
        lines = [_header_line(self.header)]
        for p in self.posts:
            e, s = p.signature
            lines.append(
                "\t".join(
                    [
                        str(p.seq),
                        p.author,
                        p.kind,
                        *p.fields,
                        f"{numtheory.to_hex(e)}:{numtheory.to_hex(s)}",
                    ]
                )
            )
        return "\n".join(lines) + "\n"

    def byte_size(self) -> int:
        return len(self.serialize().encode())

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.serialize())

    @classmethod
    def load(cls, path: str) -> "BulletinBoard":
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines:
            raise BoardError("line 1: empty board file")
        header = _parse_header_line(lines[0])
        posts = []
        for lineno, line in enumerate(lines[1:], start=2):
            posts.append(_parse_post_line(header, line, lineno, expected_seq=lineno - 1))
        return cls(header, posts)


def _join_keymap(keymap: dict[str, int]) -> str:
    if not keymap:
        return ABSENT
    return ",".join(f"{name}:{numtheory.to_hex(value)}" for name, value in keymap.items())


def _split_keymap(text: str, lineno: int) -> dict[str, int]:
    if text == ABSENT:
        return {}
    out = {}
    for item in text.split(","):
        name, _, value = item.partition(":")
        if not name or not value:
            raise BoardError(f"line {lineno}: malformed key map entry {item!r}")
        out[name] = numtheory.from_hex(value)
    return out


def _header_line(header: BoardHeader) -> str:
    g = header.group
    return "\t".join(
        [
            MAGIC,
            header.auctioneer_id,
            str(header.bit_bound),
            numtheory.to_hex(g.p),
            numtheory.to_hex(g.rho),
            numtheory.to_hex(g.g),
            numtheory.to_hex(g.h),
            numtheory.to_hex(header.auctioneer_n),
            _join_keymap(header.network_keys),
            _join_keymap(header.signer_keys),
        ]
    )


def _parse_header_line(line: str) -> BoardHeader:
    parts = line.split("\t")
    if len(parts) != 10 or parts[0] != MAGIC:
        raise BoardError("line 1: not a board header")
    try:
        group = GroupParams(
            p=numtheory.from_hex(parts[3]),
            rho=numtheory.from_hex(parts[4]),
            g=numtheory.from_hex(parts[5]),
            h=numtheory.from_hex(parts[6]),
        )
        return BoardHeader(
            auctioneer_id=parts[1],
            bit_bound=int(parts[2]),
            group=group,
            auctioneer_n=numtheory.from_hex(parts[7]),
            network_keys=_split_keymap(parts[8], 1),
            signer_keys=_split_keymap(parts[9], 1),
        )
    except ValueError as exc:
        raise BoardError(f"line 1: {exc}")


def _parse_post_line(header: BoardHeader, line: str, lineno: int, expected_seq: int) -> Post:
    parts = line.split("\t")
    if len(parts) < 5:
        raise BoardError(f"line {lineno}: truncated post")
    try:
        seq = int(parts[0])
    except ValueError:
        raise BoardError(f"line {lineno}: bad seq {parts[0]!r}")
    if seq != expected_seq:
        raise BoardError(f"line {lineno}: seq gap (expected {expected_seq}, found {seq})")
    author, kind = parts[1], parts[2]
    fields = tuple(parts[3:-1])
    if kind not in _FIELD_COUNTS or len(fields) != _FIELD_COUNTS[kind]:
        raise BoardError(f"line {lineno}: malformed {kind!r} post")
    e_text, _, s_text = parts[-1].partition(":")
    try:
        signature = (numtheory.from_hex(e_text), numtheory.from_hex(s_text))
        _validate_payload_hex(kind, fields)
    except ValueError as exc:
        raise BoardError(f"line {lineno}: bad hex ({exc})")
    public = header.signer_keys.get(author)
    if public is None:
        raise BoardError(f"line {lineno}: unregistered author {author!r}")
    if not schnorr.verify(header.group, public, signing_bytes(seq, author, kind, fields), signature):
        raise BoardError(f"line {lineno}: signature does not verify")
    return Post(seq=seq, author=author, kind=kind, fields=fields, signature=signature)


def _validate_payload_hex(kind: str, fields: tuple[str, ...]) -> None:
    if kind == TESTSET:
        for item in fields[2].split(","):
            numtheory.from_hex(item)
    elif kind == COMMITMENT:
        numtheory.from_hex(fields[1])
        numtheory.from_hex(fields[2])
    elif kind == OUTCOME:
        numtheory.from_hex(fields[2])
    elif kind == REVEAL and fields[3] != ABSENT:
        for item in fields[3].split(","):
            numtheory.from_hex(item)


# ---------------------------------------------------------------------------
# payload codecs


def testset_fields(ts: TestSetPublic) -> tuple[str, ...]:
    entries = ",".join(numtheory.to_hex(ct.value) for ct in ts.entries)
    return (str(ts.tsid), str(ts.bit_bound), entries)


def parse_testset(header: BoardHeader, post: Post) -> TestSetPublic:
    tsid, bound, entries = post.fields
    cts = tuple(
        PaillierCiphertext(value=numtheory.from_hex(item), n=header.auctioneer_n)
        for item in entries.split(",")
    )
    if len(cts) != int(bound):
        raise BoardError(f"test set {tsid} advertises {bound} entries, carries {len(cts)}")
    return TestSetPublic(tsid=int(tsid), entries=cts)


def commitment_fields(bidder_index: int, bid_ct: PaillierCiphertext, id_ct: PaillierCiphertext) -> tuple[str, ...]:
    return (str(bidder_index), numtheory.to_hex(bid_ct.value), numtheory.to_hex(id_ct.value))


def parse_commitment(header: BoardHeader, post: Post) -> tuple[int, PaillierCiphertext, int]:
    """Returns (bidder_index, bid ciphertext under n, raw identity ciphertext value)."""
    index, c_hex, id_hex = post.fields
    bid_ct = PaillierCiphertext(value=numtheory.from_hex(c_hex), n=header.auctioneer_n)
    return int(index), bid_ct, numtheory.from_hex(id_hex)


def mark_fields(role: str, commitment_seq: int) -> tuple[str, ...]:
    return (role, str(commitment_seq))


def outcome_fields(
    winner_identity: int,
    winner_network: str,
    mapped_payment: int,
    max_mark_seq: int,
    sec_mark_seq: int | None,
) -> tuple[str, ...]:
    return (
        str(winner_identity),
        winner_network,
        numtheory.to_hex(mapped_payment),
        str(max_mark_seq),
        str(sec_mark_seq) if sec_mark_seq is not None else ABSENT,
    )


def proof_fields(ref: str, proof: RangeProof) -> tuple[str, ...]:
    data = [numtheory.to_hex(ct.value) for ct in proof.selected]
    data.append(numtheory.to_hex(proof.r_star))
    return (REVEAL_PROOF, ref, str(proof.tsid), ",".join(data))


def parse_proof(header: BoardHeader, post: Post, subject: PaillierCiphertext) -> tuple[str, RangeProof]:
    name, ref, aux, data = post.fields
    if name != REVEAL_PROOF:
        raise BoardError(f"post {post.seq} is not an ordering proof")
    items = [numtheory.from_hex(item) for item in data.split(",")]
    selected = tuple(PaillierCiphertext(value=v, n=header.auctioneer_n) for v in items[:-1])
    return ref, RangeProof(tsid=int(aux), selected=selected, r_star=items[-1], subject=subject)


def value_tokens(post: Post) -> list[str]:
    """Payload tokens that carry values (for the privacy log scan).

    Structural fields -- seqs, bidder indexes, test-set ids, mark refs --
    are public protocol metadata and are not value carriers.  The outcome
    post's winner identity is also skipped: it is the published outcome
    itself, and a small published integer coinciding numerically with some
    bid amount is not an occurrence of that bid.
    """
    if post.kind == TESTSET:
        return post.fields[2].split(",")
    if post.kind == COMMITMENT:
        return [post.fields[1], post.fields[2]]
    if post.kind == OUTCOME:
        return [post.fields[2]]
    if post.kind == REVEAL and post.fields[3] != ABSENT:
        return post.fields[3].split(",")
    return []
