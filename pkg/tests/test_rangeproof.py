import random

import pytest

from veribid import numtheory, paillier, rangeproof
from veribid.errors import DomainError, ParameterError, UnprovableError
from veribid.paillier import PaillierCiphertext
from veribid.rangeproof import RangeProof


@pytest.fixture(scope="module")
def ts8(key64):
    return rangeproof.gen_test_set(key64.public, 8, random.Random(40), tsid=1)


def committed(key, x, rng):
    r = paillier.sample_randomness(key, rng)
    return x, r, paillier.encrypt(key, x, r)


def test_test_set_contents(key64):
    ts = rangeproof.gen_test_set(key64.public, 4, random.Random(41), tsid=9)
    plaintexts = sorted(
        paillier.decrypt_with_phi(key64, ct) for ct in ts.entries
    )
    assert plaintexts == [1, 2, 4, 8]
    assert ts.tsid == 9
    for i in range(1, 5):
        ct, r = ts.secrets[i]
        assert paillier.decrypt_with_r(key64, ct, r) == 1 << (i - 1)


def test_test_set_production_width():
    key = paillier.keygen(1024, rng=random.Random(42))
    ts = rangeproof.gen_test_set(key.public, 32, random.Random(43))
    assert len(ts.entries) == 32


def test_test_set_shuffles_power_order(key64):
    ts = rangeproof.gen_test_set(key64.public, 8, random.Random(44))
    in_power_order = [ts.secrets[i][0].value for i in range(1, 9)]
    assert [ct.value for ct in ts.entries] != in_power_order


def test_test_set_bound_must_fit_key(tiny_key):
    with pytest.raises(ParameterError):
        rangeproof.gen_test_set(tiny_key, 5, random.Random(45))


def test_decompose():
    assert rangeproof.decompose(5) == [0, 2]
    assert rangeproof.decompose(0) == []
    assert rangeproof.decompose(1 << 31) == [31]
    rng = random.Random(46)
    for _ in range(100):
        x = rng.randrange(1 << 24)
        assert sum(1 << e for e in rangeproof.decompose(x)) == x
    with pytest.raises(DomainError):
        rangeproof.decompose(-1)


def test_prove_range_zero_is_empty_proof(key64, ts8):
    rng = random.Random(47)
    _, r, _ = committed(key64, 0, rng)
    proof = rangeproof.prove_range(key64.public, ts8, 0, r)
    assert proof.selected == ()
    assert proof.r_star == numtheory.invmod(r, key64.n)


def test_prove_range_selects_matching_powers(key64, ts8):
    rng = random.Random(48)
    x, r, ct = committed(key64, 5, rng)
    proof = rangeproof.prove_range(key64.public, ts8, x, r)
    chosen = sorted(paillier.decrypt_with_phi(key64, c) for c in proof.selected)
    assert chosen == [1, 4]
    assert rangeproof.verify_range(key64.public, ts8.public(), ct, proof)


def test_prove_range_bound_is_strict(key64, ts8):
    rng = random.Random(49)
    _, r, _ = committed(key64, 1 << 8, rng)
    with pytest.raises(UnprovableError):
        rangeproof.prove_range(key64.public, ts8, 1 << 8, r)


def test_verify_rejects_proof_for_other_value(key64, ts8):
    rng = random.Random(50)
    x, r, _ = committed(key64, 5, rng)
    proof = rangeproof.prove_range(key64.public, ts8, x, r)
    other = paillier.encrypt(key64, 6, r)
    assert not rangeproof.verify_range(key64.public, ts8.public(), other, proof)


def test_verify_rejects_duplicate_selection(key64, ts8):
    rng = random.Random(51)
    x, r, ct = committed(key64, 5, rng)
    honest = rangeproof.prove_range(key64.public, ts8, x, r)
    doubled = RangeProof(
        tsid=honest.tsid,
        selected=(honest.selected[0], honest.selected[0]),
        r_star=honest.r_star,
        subject=honest.subject,
    )
    assert not rangeproof.verify_range(key64.public, ts8.public(), ct, doubled)


def test_verify_rejects_foreign_ciphertexts(key64, ts8):
    rng = random.Random(52)
    x, r, ct = committed(key64, 1, rng)
    foreign = paillier.encrypt(key64, 1, paillier.sample_randomness(key64, rng))
    forged = RangeProof(tsid=ts8.tsid, selected=(foreign,), r_star=r, subject=ct)
    assert not rangeproof.verify_range(key64.public, ts8.public(), ct, forged)


def test_verify_rejects_oversized_selection(key64):
    rng = random.Random(53)
    ts = rangeproof.gen_test_set(key64.public, 4, rng, tsid=2)
    x, r, ct = committed(key64, 3, rng)
    proof = rangeproof.prove_range(key64.public, ts, x, r)
    padded = RangeProof(
        tsid=proof.tsid,
        selected=tuple(ts.entries) + (ts.entries[0],),
        r_star=proof.r_star,
        subject=proof.subject,
    )
    assert not rangeproof.verify_range(key64.public, ts.public(), ct, padded)


def test_empty_proof_accepts_exactly_zero(key64):
    """The empty selection with r* = r^-1 is a proof of 'this encrypts 0'."""
    rng = random.Random(54)
    ts = rangeproof.gen_test_set(key64.public, 4, rng, tsid=3)
    for m in range(4):
        r = paillier.sample_randomness(key64, rng)
        ct = paillier.encrypt(key64, m, r)
        proof = RangeProof(
            tsid=ts.tsid, selected=(), r_star=numtheory.invmod(r, key64.n), subject=ct
        )
        assert rangeproof.verify_range(key64.public, ts.public(), ct, proof) == (m == 0)


def test_transcripts_depend_only_on_the_difference(key64):
    """(9,4) and (7,2) have the same difference, so their difference proofs
    select the same power indexes: nothing else about the pair leaks."""
    rng = random.Random(55)
    index_sets = []
    for x1, x2 in ((9, 4), (7, 2)):
        ts = rangeproof.gen_test_set(key64.public, 8, rng, tsid=x1)
        power_of = {ts.secrets[i][0].value: i for i in range(1, 9)}
        _, r1, _ = committed(key64, x1, rng)
        _, r2, _ = committed(key64, x2, rng)
        r_diff = r1 * numtheory.invmod(r2, key64.n) % key64.n
        proof = rangeproof.prove_range(key64.public, ts, x1 - x2, r_diff)
        index_sets.append({power_of[ct.value] for ct in proof.selected})
    assert index_sets[0] == index_sets[1] == {1, 3}  # 5 = 2^0 + 2^2


def _triple(key, rng, base=100):
    return tuple(
        rangeproof.gen_test_set(key.public, 8, rng, tsid=base + i) for i in range(3)
    )


def test_prove_and_verify_geq(key64):
    rng = random.Random(56)
    x1, r1, c1 = committed(key64, 7, rng)
    x2, r2, c2 = committed(key64, 3, rng)
    triple = _triple(key64, rng)
    proof = rangeproof.prove_geq(key64.public, triple, x1, r1, x2, r2)
    publics = tuple(ts.public() for ts in triple)
    assert rangeproof.verify_geq(key64.public, publics, c1, c2, proof).ok
    diff_plain = sorted(paillier.decrypt_with_phi(key64, c) for c in proof.proof_diff.selected)
    assert diff_plain == [4]


def test_geq_equal_values_uses_empty_difference_proof(key64):
    rng = random.Random(57)
    x, r1, c1 = committed(key64, 42, rng)
    _, r2, _ = committed(key64, 42, rng)
    c2 = paillier.encrypt(key64, 42, r2)
    triple = _triple(key64, rng, base=200)
    proof = rangeproof.prove_geq(key64.public, triple, x, r1, x, r2)
    assert proof.proof_diff.selected == ()
    publics = tuple(ts.public() for ts in triple)
    assert rangeproof.verify_geq(key64.public, publics, c1, c2, proof).ok


def test_geq_unprovable_when_smaller(key64):
    rng = random.Random(58)
    x1, r1, _ = committed(key64, 3, rng)
    x2, r2, _ = committed(key64, 7, rng)
    with pytest.raises(UnprovableError):
        rangeproof.prove_geq(key64.public, _triple(key64, rng, base=300), x1, r1, x2, r2)


def test_geq_requires_distinct_test_sets(key64):
    rng = random.Random(59)
    ts = rangeproof.gen_test_set(key64.public, 8, rng, tsid=400)
    with pytest.raises(ParameterError):
        rangeproof.prove_geq(key64.public, (ts, ts, ts), 7, 3, 3, 5)


def test_verify_geq_reports_failing_component(key64):
    rng = random.Random(60)
    x1, r1, c1 = committed(key64, 7, rng)
    x2, r2, c2 = committed(key64, 3, rng)
    triple = _triple(key64, rng, base=500)
    proof = rangeproof.prove_geq(key64.public, triple, x1, r1, x2, r2)
    publics = tuple(ts.public() for ts in triple)
    # presenting the proof against swapped subjects breaks x1, the first check
    swapped = rangeproof.verify_geq(key64.public, publics, c2, c1, proof)
    assert not swapped.ok and swapped.failed == "x1"
    reused = rangeproof.verify_geq(
        key64.public, (publics[0], publics[0], publics[2]), c1, c2, proof
    )
    assert not reused.ok and reused.failed == "testsets"


def test_soundness_no_subset_proves_a_smaller_claim(key64):
    """Exhaustive at t=4: for x1 < x2, no subset of the test set satisfies the
    verification identity for the derived difference ciphertext.  An r*
    satisfying the identity exists iff the combined value decrypts to zero,
    which happens iff the subset's powers sum to the wrapped difference."""
    rng = random.Random(61)
    ts = rangeproof.gen_test_set(key64.public, 4, rng, tsid=600)
    power = {i: paillier.decrypt_with_phi(key64, ts.entries[i]) for i in range(4)}
    n, n_sq = key64.n, key64.n_sq
    for x1 in range(4):
        for x2 in range(x1 + 1, 16):
            _, r1, c1 = committed(key64, x1, rng)
            _, r2, c2 = committed(key64, x2, rng)
            diff_ct = rangeproof.diff_ciphertext(key64.public, c1, c2)
            base = paillier.ct_inverse(key64.public, diff_ct).value
            wrapped = (x1 - x2) % n
            for mask in range(16):
                combined = base
                subset_sum = 0
                for i in range(4):
                    if mask >> i & 1:
                        combined = combined * ts.entries[i].value % n_sq
                        subset_sum += power[i]
                plain = paillier.decrypt_with_phi(
                    key64, PaillierCiphertext(combined, n)
                )
                assert (plain == 0) == (subset_sum == wrapped)
                assert plain != 0  # wrapped difference is astronomically large
