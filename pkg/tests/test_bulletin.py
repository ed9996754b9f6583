import random

import pytest

from veribid import bulletin, numtheory, paillier, rangeproof, schnorr
from veribid.bulletin import BoardHeader, BulletinBoard, Post
from veribid.errors import AuthorizationError, BoardError, SignatureError

from helpers import TINY_GROUP


@pytest.fixture()
def setup(group24, key64):
    rng = random.Random(70)
    auct = schnorr.keygen(group24, rng)
    net = schnorr.keygen(group24, rng)
    header = BoardHeader(
        auctioneer_id="auctioneer",
        bit_bound=8,
        group=group24,
        auctioneer_n=key64.n,
        network_keys={"net1": 143},
        signer_keys={"auctioneer": auct.public, "net1": net.public},
    )
    return BulletinBoard(header), auct, net


def _post_testsets(board, auct, key, count):
    rng = random.Random(71)
    for tsid in range(1, count + 1):
        ts = rangeproof.gen_test_set(key.public, 8, rng, tsid=tsid)
        board.post("auctioneer", bulletin.TESTSET, bulletin.testset_fields(ts.public()), auct)


def test_posts_are_sequenced(setup, key64):
    board, auct, _ = setup
    _post_testsets(board, auct, key64, 3)
    assert [p.seq for p in board.posts] == [1, 2, 3]


def test_unregistered_author_cannot_post(setup, group24):
    board, auct, _ = setup
    agent_key = schnorr.keygen(group24, random.Random(72))
    with pytest.raises(AuthorizationError):
        board.post("agent", bulletin.MARK, bulletin.mark_fields("max", 1), agent_key)


def test_key_must_match_registration(setup):
    board, auct, net = setup
    with pytest.raises(SignatureError):
        board.post("net1", bulletin.MARK, bulletin.mark_fields("max", 1), auct)


def test_verify_post_detects_tampering(setup, key64):
    board, auct, _ = setup
    _post_testsets(board, auct, key64, 1)
    assert board.verify_post(1)
    original = board.posts[0]
    board.posts[0] = Post(
        seq=original.seq,
        author=original.author,
        kind=original.kind,
        fields=(original.fields[0], original.fields[1], "ff"),
        signature=original.signature,
    )
    assert not board.verify_post(1)
    with pytest.raises(BoardError):
        board.verify_post(9)


def test_verify_post_fails_under_substituted_key(setup, group24, key64):
    board, auct, _ = setup
    _post_testsets(board, auct, key64, 1)
    other = schnorr.keygen(group24, random.Random(73))
    swapped_header = BoardHeader(
        auctioneer_id="auctioneer",
        bit_bound=8,
        group=group24,
        auctioneer_n=board.header.auctioneer_n,
        network_keys=board.header.network_keys,
        signer_keys={"auctioneer": other.public, "net1": board.header.signer_keys["net1"]},
    )
    assert not BulletinBoard(swapped_header, board.posts).verify_post(1)


def test_read_filters(setup, key64):
    board, auct, net = setup
    _post_testsets(board, auct, key64, 2)
    board.post("net1", bulletin.MARK, bulletin.mark_fields("max", 1), net)
    assert len(board.read(kind=bulletin.TESTSET)) == 2
    assert len(board.read(author="net1")) == 1
    assert board.read(kind=bulletin.OUTCOME) == []
    marks = board.read(kind=bulletin.MARK)
    assert len(marks) == 1 and marks[0].fields == ("max", "1")


def test_round_trip_large_board(tmp_path, group24):
    rng = random.Random(74)
    auct = schnorr.keygen(group24, rng)
    header = BoardHeader(
        auctioneer_id="auctioneer",
        bit_bound=8,
        group=group24,
        auctioneer_n=143,
        network_keys={},
        signer_keys={"auctioneer": auct.public},
    )
    board = BulletinBoard(header)
    for i in range(10_000):
        board.post("auctioneer", bulletin.MARK, bulletin.mark_fields("max", i + 1), auct)
    path = tmp_path / "big.board"
    board.save(str(path))
    loaded = BulletinBoard.load(str(path))
    assert loaded.serialize() == board.serialize()
    assert loaded.verify_post(10_000)


def _small_saved_board(tmp_path, setup, key64):
    board, auct, _ = setup
    _post_testsets(board, auct, key64, 3)
    path = tmp_path / "board.log"
    board.save(str(path))
    return board, path


def test_load_rejects_seq_gap(tmp_path, setup, key64):
    _, path = _small_saved_board(tmp_path, setup, key64)
    lines = path.read_text().splitlines(keepends=True)
    path.write_text("".join(lines[:2] + lines[3:]))  # drop post 2
    with pytest.raises(BoardError, match="line 3"):
        BulletinBoard.load(str(path))


def test_load_rejects_edited_payload(tmp_path, setup, key64):
    _, path = _small_saved_board(tmp_path, setup, key64)
    text = path.read_text()
    lines = text.splitlines(keepends=True)
    lines[2] = lines[2].replace("\t2\t", "\t3\t", 1)  # bump the advertised bound
    path.write_text("".join(lines))
    with pytest.raises(BoardError, match="line 3"):
        BulletinBoard.load(str(path))


def test_load_rejects_bad_hex(tmp_path, setup, key64):
    _, path = _small_saved_board(tmp_path, setup, key64)
    lines = path.read_text().splitlines(keepends=True)
    parts = lines[1].rstrip("\n").split("\t")
    parts[5] = "0XYZ," + parts[5].split(",", 1)[1]
    lines[1] = "\t".join(parts) + "\n"
    path.write_text("".join(lines))
    with pytest.raises(BoardError, match="line 2"):
        BulletinBoard.load(str(path))


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "junk.board"
    path.write_text("not a board\n")
    with pytest.raises(BoardError, match="line 1"):
        BulletinBoard.load(str(path))


def test_value_tokens_by_kind(setup, key64):
    board, auct, net = setup
    _post_testsets(board, auct, key64, 1)
    board.post("net1", bulletin.COMMITMENT, ("4", "ab12", "cd34"), net)
    board.post("net1", bulletin.MARK, bulletin.mark_fields("max", 2), net)
    board.post(
        "auctioneer", bulletin.OUTCOME, bulletin.outcome_fields(9, "net1", 255, 3, None), auct
    )
    board.post(
        "auctioneer", bulletin.REVEAL,
        (bulletin.REVEAL_PAYMENT_R, bulletin.ABSENT, bulletin.ABSENT, "beef"),
        auct,
    )
    assert bulletin.value_tokens(board.get(2)) == ["ab12", "cd34"]
    assert bulletin.value_tokens(board.get(3)) == []
    assert bulletin.value_tokens(board.get(4)) == ["ff"]  # winner id is the published outcome
    assert bulletin.value_tokens(board.get(5)) == ["beef"]
    assert len(bulletin.value_tokens(board.get(1))) == 8


def test_parse_round_trips_for_codecs(setup, key64):
    board, auct, net = setup
    rng = random.Random(75)
    ts = rangeproof.gen_test_set(key64.public, 8, rng, tsid=5)
    board.post("auctioneer", bulletin.TESTSET, bulletin.testset_fields(ts.public()), auct)
    parsed = bulletin.parse_testset(board.header, board.get(1))
    assert parsed.tsid == 5
    assert [c.value for c in parsed.entries] == [c.value for c in ts.entries]

    r = paillier.sample_randomness(key64, rng)
    ct = paillier.encrypt(key64, 77, r)
    proof = rangeproof.prove_range(key64.public, ts, 77, r)
    board.post("auctioneer", bulletin.REVEAL, bulletin.proof_fields("3", proof), auct)
    ref, back = bulletin.parse_proof(board.header, board.get(2), ct)
    assert ref == "3"
    assert back.tsid == proof.tsid
    assert back.r_star == proof.r_star
    assert [c.value for c in back.selected] == [c.value for c in proof.selected]
    assert rangeproof.verify_range(key64.public, ts.public(), ct, back)
