"""Arbitrary-precision modular arithmetic and prime generation.

All protocol math runs on plain Python ints.  When gmpy2 is importable the
hot operations (powmod, invert) are routed through it, which is roughly an
order of magnitude faster at the 1024-bit moduli the auction uses.  Setting
the environment variable ``VERIBID_PURE_PYTHON=1`` forces the stdlib path.
"""

import hashlib
import math
import os
import random

from .errors import GenerationError

MILLER_RABIN_ROUNDS = 64

_PURE = os.environ.get("VERIBID_PURE_PYTHON", "") not in ("", "0")

if not _PURE:
    try:
        import gmpy2 as _gmpy2
    except ImportError:
        _gmpy2 = None
else:
    _gmpy2 = None

BACKEND = "gmpy2" if _gmpy2 is not None else "python"


def _powmod_py(base: int, exp: int, mod: int) -> int:
    return pow(base, exp, mod)


def _invmod_py(a: int, mod: int) -> int:
    return pow(a, -1, mod)


if _gmpy2 is not None:

    def powmod(base: int, exp: int, mod: int) -> int:
        return int(_gmpy2.powmod(base, exp, mod))

    def invmod(a: int, mod: int) -> int:
        try:
            return int(_gmpy2.invert(a, mod))
        except ZeroDivisionError:
            raise ValueError("base is not invertible for the given modulus")

else:
    powmod = _powmod_py
    invmod = _invmod_py


def _small_primes(bound: int = 1000) -> tuple[int, ...]:
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, int(bound**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return tuple(i for i in range(bound + 1) if sieve[i])

SMALL_PRIMES = _small_primes()


def is_probable_prime(n: int, rng: random.Random, rounds: int = MILLER_RABIN_ROUNDS) -> bool:
    """Miller-Rabin primality test with a small-prime pre-sieve."""
    if n < 2:
        return False
    for p in SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for _ in range(rounds):
        a = rng.randrange(2, n - 1)
        x = powmod(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def gen_prime(bits: int, rng: random.Random, max_attempts: int = 100_000) -> int:
    """Random prime with exactly `bits` bits and the top two bits set.

    Setting the two most significant bits guarantees the product of two
    such primes has exactly 2*bits bits.
    """
    if bits < 3:
        raise GenerationError(f"cannot generate a {bits}-bit prime")
    head = (1 << (bits - 1)) | (1 << (bits - 2)) | 1
    for _ in range(max_attempts):
        candidate = rng.getrandbits(bits) | head
        if is_probable_prime(candidate, rng):
            return candidate
    raise GenerationError(f"no {bits}-bit prime found in {max_attempts} attempts")


def gen_safe_group_order(bits: int, rng: random.Random, max_attempts: int = 10_000_000) -> tuple[int, int]:
    """Find (p, rho) with rho a `bits`-bit prime and p = 2*rho + 1 also prime."""
    if bits < 4:
        raise GenerationError(f"cannot generate a {bits}-bit safe group order")
    for _ in range(max_attempts):
        rho = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        p = 2 * rho + 1
        # sieve both halves before spending Miller-Rabin rounds
        composite = False
        for sp in SMALL_PRIMES:
            if rho % sp == 0 and rho != sp:
                composite = True
                break
            if p % sp == 0 and p != sp:
                composite = True
                break
        if composite:
            continue
        if not is_probable_prime(rho, rng, rounds=2):
            continue
        if not is_probable_prime(p, rng, rounds=2):
            continue
        if is_probable_prime(rho, rng) and is_probable_prime(p, rng):
            return p, rho
    raise GenerationError(f"no {bits}-bit safe group order found")


def to_hex(value: int) -> str:
    """Canonical lowercase big-endian hex: no leading zeros, "0" for zero."""
    if value < 0:
        raise ValueError("negative values have no canonical hex form")
    return format(value, "x")


def from_hex(text: str) -> int:
    """Parse canonical hex, rejecting anything `to_hex` would not emit."""
    if not text or text != text.lower() or (len(text) > 1 and text[0] == "0"):
        raise ValueError(f"not canonical hex: {text!r}")
    return int(text, 16)


def hash_to_int(tag: bytes, *parts: int | bytes | str) -> int:
    """Domain-separated SHA-256 of the parts, as a non-negative integer."""
    h = hashlib.sha256()
    h.update(tag)
    for part in parts:
        if isinstance(part, int):
            chunk = to_hex(part).encode()
        elif isinstance(part, str):
            chunk = part.encode()
        else:
            chunk = part
        h.update(len(chunk).to_bytes(4, "big"))
        h.update(chunk)
    return int.from_bytes(h.digest(), "big")


def gcd(a: int, b: int) -> int:
    return math.gcd(a, b)
