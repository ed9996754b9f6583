"""Paillier homomorphic encryption with explicit randomness.

The auction relies on four unusual corners of the cryptosystem, all of which
are first-class here:

* encryption with caller-supplied randomness, ``E(m, r) = (1+mn) * r^n mod n^2``,
  so posted ciphertexts are re-checkable commitments;
* two decryption paths: by the private key ``phi`` and by the original
  randomness ``r``;
* recovery of the randomness from a ciphertext by the key holder,
  ``r = C^(n^-1 mod phi) mod n``;
* the multiplicative inverse of a ciphertext, which is itself an encryption
  of the negated plaintext under the inverted randomness and makes the
  range-proof check an exact identity.

Multiplying ciphertexts adds plaintexts and multiplies randomness:
``E(m1, r1) * E(m2, r2) = E(m1 + m2 mod n, r1 * r2 mod n)``.
"""

import math
import random
from dataclasses import dataclass
from typing import Callable

from . import numtheory
from .errors import (
    DecryptionError,
    DomainError,
    GenerationError,
    KeyMismatchError,
    ConsistencyError,
    RandomnessError,
)


@dataclass(frozen=True)
class PaillierPublicKey:
    n: int
    n_sq: int


@dataclass(frozen=True)
class PaillierKeyPair:
    p: int
    q: int
    n: int
    n_sq: int
    phi: int

    @property
    def public(self) -> PaillierPublicKey:
        return PaillierPublicKey(self.n, self.n_sq)


@dataclass(frozen=True)
class PaillierCiphertext:
    value: int
    n: int  # modulus tag of the producing key


PrimeSource = Callable[[int], int]


def fixed_primes(*primes: int) -> PrimeSource:
    """Prime source that replays the given primes in order (testing hook)."""
    queue = list(primes)

    def source(_bits: int) -> int:
        if not queue:
            raise GenerationError("fixed prime source exhausted")
        return queue.pop(0)

    return source


def keygen(
    key_bits: int,
    rng: random.Random | None = None,
    prime_source: PrimeSource | None = None,
    max_attempts: int = 64,
) -> PaillierKeyPair:
    """Generate a key pair with an n of exactly `key_bits` bits.

    A custom `prime_source` (e.g. `fixed_primes(5, 7)`) bypasses the size
    checks so tiny deterministic keys can be built for tests; the structural
    invariants (distinct primes, gcd(n, phi) = 1) are enforced either way.
    """
    sized = prime_source is None
    if sized and key_bits < 16:
        raise GenerationError(f"key_bits must be >= 16, got {key_bits}")
    if rng is None:
        rng = random.SystemRandom()
    if prime_source is None:
        prime_source = lambda bits: numtheory.gen_prime(bits, rng)
    q_bits = key_bits // 2
    p_bits = key_bits - q_bits
    for _ in range(max_attempts):
        p = prime_source(p_bits)
        q = prime_source(q_bits)
        if p == q:
            continue
        if not numtheory.is_probable_prime(p, rng) or not numtheory.is_probable_prime(q, rng):
            raise GenerationError("prime source returned a composite")
        n = p * q
        phi = (p - 1) * (q - 1)
        if math.gcd(n, phi) != 1:
            continue
        if sized and n.bit_length() != key_bits:
            continue
        return PaillierKeyPair(p=p, q=q, n=n, n_sq=n * n, phi=phi)
    raise GenerationError(f"no valid key pair after {max_attempts} attempts")


def sample_randomness(key: PaillierPublicKey | PaillierKeyPair, rng: random.Random) -> int:
    """Uniform r in [2, n) with gcd(r, n) = 1."""
    while True:
        r = rng.randrange(2, key.n)
        if math.gcd(r, key.n) == 1:
            return r


def encrypt(key: PaillierPublicKey | PaillierKeyPair, m: int, r: int) -> PaillierCiphertext:
    """E(m, r) = (1 + m*n) * r^n mod n^2."""
    n, n_sq = key.n, key.n_sq
    if not 0 <= m < n:
        raise DomainError(f"plaintext {m} outside [0, {n})")
    if not 1 <= r < n or math.gcd(r, n) != 1:
        raise RandomnessError(f"randomness {r} is not a unit modulo {n}")
    value = (1 + m * n) * numtheory.powmod(r, n, n_sq) % n_sq
    return PaillierCiphertext(value=value, n=n)


def _check_tag(key: PaillierPublicKey | PaillierKeyPair, *cts: PaillierCiphertext) -> None:
    for ct in cts:
        if ct.n != key.n:
            raise KeyMismatchError("ciphertext was produced under a different key")


def decrypt_with_phi(key: PaillierKeyPair, ct: PaillierCiphertext) -> int:
    """m = L(C^phi mod n^2) * phi^-1 mod n, with L(x) = (x - 1) / n."""
    _check_tag(key, ct)
    if math.gcd(ct.value, key.n_sq) != 1:
        raise DecryptionError("ciphertext is not a unit modulo n^2")
    l_value = (numtheory.powmod(ct.value, key.phi, key.n_sq) - 1) // key.n
    return l_value * numtheory.invmod(key.phi, key.n) % key.n


def decrypt_with_r(key: PaillierPublicKey | PaillierKeyPair, ct: PaillierCiphertext, r: int) -> int:
    """m = ((C * r^-n mod n^2) - 1) / n; requires the exact encryption randomness."""
    _check_tag(key, ct)
    n, n_sq = key.n, key.n_sq
    if not 1 <= r < n or math.gcd(r, n) != 1:
        raise RandomnessError(f"randomness {r} is not a unit modulo {n}")
    u = ct.value * numtheory.powmod(numtheory.invmod(r, n_sq), n, n_sq) % n_sq
    if (u - 1) % n != 0:
        raise ConsistencyError("randomness does not match the ciphertext")
    m = (u - 1) // n
    if not 0 <= m < n:
        raise ConsistencyError("randomness does not match the ciphertext")
    return m


def recover_random(key: PaillierKeyPair, ct: PaillierCiphertext) -> int:
    """r = C^(n^-1 mod phi) mod n; inverts encryption for the key holder."""
    _check_tag(key, ct)
    try:
        exponent = numtheory.invmod(key.n, key.phi)
    except ValueError:
        raise GenerationError("n is not invertible modulo phi; key violates its invariants")
    return numtheory.powmod(ct.value, exponent, key.n)


def ct_inverse(key: PaillierPublicKey | PaillierKeyPair, ct: PaillierCiphertext) -> PaillierCiphertext:
    """Multiplicative inverse mod n^2: an encryption of (n - m) mod n under r^-1."""
    _check_tag(key, ct)
    try:
        value = numtheory.invmod(ct.value, key.n_sq)
    except ValueError:
        raise DomainError("ciphertext is not invertible modulo n^2")
    return PaillierCiphertext(value=value, n=key.n)


def ct_mul(
    key: PaillierPublicKey | PaillierKeyPair,
    a: PaillierCiphertext,
    b: PaillierCiphertext,
) -> PaillierCiphertext:
    """Homomorphic add: decrypts to (m_a + m_b) mod n under randomness r_a * r_b."""
    _check_tag(key, a, b)
    return PaillierCiphertext(value=a.value * b.value % key.n_sq, n=key.n)
