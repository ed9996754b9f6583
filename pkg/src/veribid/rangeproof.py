"""Privacy-preserving integer comparison via binary-decomposition range proofs.

To show x1 >= x2 for committed values below n/2, it is enough to show that
x1, x2, and (x1 - x2) mod n all lie below a preset power-of-two bound 2^t
(a wrapped negative difference necessarily exceeds the bound).

A *test set* is t Paillier ciphertexts of the powers 2^0 .. 2^(t-1), posted
in a shuffled order so outsiders cannot tell which entry hides which power.
To prove x < 2^t for C = E(x, r_x), the prover writes x as a sum of distinct
powers of two, selects the matching test-set ciphertexts C_t1 .. C_tk, and
combines the randomness into

    r* = r_x^-1 * r_t1 * ... * r_tk  (mod n).

The verifier accepts iff the selected entries are distinct members of the
test set and

    C^-1 * C_t1 * ... * C_tk = E(0, r*)  (mod n^2),

which by the homomorphism holds exactly when the selected powers sum to x.
At most t distinct powers can be selected, so acceptance bounds x below
2^0 + ... + 2^(t-1) < 2^t.
"""

import random
from dataclasses import dataclass

from . import numtheory, paillier
from .errors import DomainError, ParameterError, UnprovableError
from .paillier import PaillierCiphertext, PaillierKeyPair, PaillierPublicKey


@dataclass(frozen=True)
class TestSetPublic:
    """What the bulletin board carries: the id and the shuffled ciphertexts."""

    tsid: int
    entries: tuple[PaillierCiphertext, ...]

    @property
    def bit_bound(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class TestSet:
    """Prover-side test set: public entries plus the power/randomness secrets."""

    tsid: int
    entries: tuple[PaillierCiphertext, ...]
    # power index i in [1, t] -> (ciphertext of 2^(i-1), its randomness)
    secrets: dict[int, tuple[PaillierCiphertext, int]]

    @property
    def bit_bound(self) -> int:
        return len(self.entries)

    def public(self) -> TestSetPublic:
        return TestSetPublic(tsid=self.tsid, entries=self.entries)


@dataclass(frozen=True)
class RangeProof:
    tsid: int
    selected: tuple[PaillierCiphertext, ...]
    r_star: int
    subject: PaillierCiphertext


@dataclass(frozen=True)
class ComparisonProof:
    proof_x1: RangeProof
    proof_x2: RangeProof
    proof_diff: RangeProof


@dataclass(frozen=True)
class GeqResult:
    ok: bool
    failed: str | None = None  # "x1" | "x2" | "diff" | "testsets"


def gen_test_set(
    key: PaillierPublicKey | PaillierKeyPair,
    bit_bound: int,
    rng: random.Random,
    tsid: int = 0,
) -> TestSet:
    """Encrypt 2^0 .. 2^(t-1) under fresh randomness and shuffle the order."""
    if (1 << bit_bound) >= key.n // 2:
        raise ParameterError(f"2^{bit_bound} must be below n/2 for n of {key.n.bit_length()} bits")
    secrets = {}
    entries = []
    for i in range(1, bit_bound + 1):
        r = paillier.sample_randomness(key, rng)
        ct = paillier.encrypt(key, 1 << (i - 1), r)
        secrets[i] = (ct, r)
        entries.append(ct)
    rng.shuffle(entries)
    return TestSet(tsid=tsid, entries=tuple(entries), secrets=secrets)


def decompose(x: int) -> list[int]:
    """Exponents of the binary decomposition, ascending; empty iff x = 0."""
    if x < 0:
        raise DomainError(f"cannot decompose negative value {x}")
    return [i for i in range(x.bit_length()) if (x >> i) & 1]


def prove_range(
    key: PaillierPublicKey | PaillierKeyPair,
    ts: TestSet,
    x: int,
    r_x: int,
) -> RangeProof:
    """Prove that E(x, r_x) hides a value below 2^t, consuming one test set."""
    t = ts.bit_bound
    if not 0 <= x < (1 << t):
        raise UnprovableError(f"{x} is outside [0, 2^{t}); no valid proof exists")
    selected = []
    r_star = numtheory.invmod(r_x, key.n)
    for exponent in decompose(x):
        ct, r_i = ts.secrets[exponent + 1]
        selected.append(ct)
        r_star = r_star * r_i % key.n
    return RangeProof(
        tsid=ts.tsid,
        selected=tuple(selected),
        r_star=r_star,
        subject=paillier.encrypt(key, x, r_x),
    )


def verify_range(
    key: PaillierPublicKey | PaillierKeyPair,
    ts_public: TestSetPublic,
    subject: PaillierCiphertext,
    proof: RangeProof,
) -> bool:
    """Check a range proof against the public test set; False on any violation."""
    t = ts_public.bit_bound
    if proof.tsid != ts_public.tsid:
        return False
    if len(proof.selected) > t:
        return False
    entry_values = {ct.value for ct in ts_public.entries}
    seen = set()
    for ct in proof.selected:
        if ct.value not in entry_values or ct.value in seen:
            return False
        seen.add(ct.value)
    if not 1 <= proof.r_star < key.n:
        return False
    lhs = paillier.ct_inverse(key, subject).value
    for ct in proof.selected:
        lhs = lhs * ct.value % key.n_sq
    rhs = numtheory.powmod(proof.r_star, key.n, key.n_sq)
    return lhs == rhs


def diff_ciphertext(
    key: PaillierPublicKey | PaillierKeyPair,
    c1: PaillierCiphertext,
    c2: PaillierCiphertext,
) -> PaillierCiphertext:
    """Encryption of (x1 - x2) mod n derived from the two posted ciphertexts."""
    return paillier.ct_mul(key, c1, paillier.ct_inverse(key, c2))


def prove_geq(
    key: PaillierPublicKey | PaillierKeyPair,
    test_sets: tuple[TestSet, TestSet, TestSet],
    x1: int,
    r1: int,
    x2: int,
    r2: int,
) -> ComparisonProof:
    """Prove x1 >= x2 via three range proofs, one per dedicated test set."""
    ts1, ts2, ts_diff = test_sets
    if len({ts1.tsid, ts2.tsid, ts_diff.tsid}) != 3:
        raise ParameterError("comparison proofs must consume three distinct test sets")
    if x1 < x2:
        raise UnprovableError(f"{x1} < {x2}; the wrapped difference exceeds the bound")
    r_diff = r1 * numtheory.invmod(r2, key.n) % key.n
    return ComparisonProof(
        proof_x1=prove_range(key, ts1, x1, r1),
        proof_x2=prove_range(key, ts2, x2, r2),
        proof_diff=prove_range(key, ts_diff, x1 - x2, r_diff),
    )


def verify_geq(
    key: PaillierPublicKey | PaillierKeyPair,
    ts_publics: tuple[TestSetPublic, TestSetPublic, TestSetPublic],
    c1: PaillierCiphertext,
    c2: PaillierCiphertext,
    proof: ComparisonProof,
) -> GeqResult:
    """Check all three component proofs, deriving the difference ciphertext."""
    ts1, ts2, ts_diff = ts_publics
    if len({ts1.tsid, ts2.tsid, ts_diff.tsid}) != 3:
        return GeqResult(ok=False, failed="testsets")
    if not verify_range(key, ts1, c1, proof.proof_x1):
        return GeqResult(ok=False, failed="x1")
    if not verify_range(key, ts2, c2, proof.proof_x2):
        return GeqResult(ok=False, failed="x2")
    if not verify_range(key, ts_diff, diff_ciphertext(key, c1, c2), proof.proof_diff):
        return GeqResult(ok=False, failed="diff")
    return GeqResult(ok=True)
