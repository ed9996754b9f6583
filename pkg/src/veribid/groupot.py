"""1-out-of-z oblivious transfer over a prime-order subgroup of Z_p*.

A bidder (receiver) fetches the mapped bid at her chosen index from the
agent (sender) without revealing the index, and learns nothing about the
other z-1 messages:

    receiver: y = g^r * h^alpha            (r fresh in Z_rho)
    sender:   xi_i = (g^k_i, m_i * (y / h^i)^k_i)   for i = 1..z
    receiver: m_alpha = b / a^r            from xi_alpha = (a, b)

For i = alpha the blinding factor collapses to g^(r*k_i), which the receiver
can cancel; for every other index the factor carries an unknown power of h.
"""

import random
from dataclasses import dataclass

from . import numtheory
from .errors import DomainError, EncodingError, GenerationError, ProtocolError

_H_TAG = b"veribid/group-h/v1"


@dataclass(frozen=True)
class GroupParams:
    p: int    # safe-prime ambient modulus, p = 2*rho + 1
    rho: int  # prime order of the subgroup of squares
    g: int
    h: int


@dataclass(frozen=True)
class OTQuery:
    """Receiver state: y is sent to the sender; r and alpha never leave."""

    y: int
    r: int
    alpha: int


@dataclass(frozen=True)
class OTBatch:
    pairs: tuple[tuple[int, int], ...]


def validate_group(params: GroupParams, rng: random.Random | None = None) -> None:
    """Check the GroupParams invariants; raises GenerationError on failure."""
    rng = rng or random.Random(0)
    p, rho, g, h = params.p, params.rho, params.g, params.h
    if p != 2 * rho + 1:
        raise GenerationError("p != 2*rho + 1")
    if not numtheory.is_probable_prime(p, rng) or not numtheory.is_probable_prime(rho, rng):
        raise GenerationError("p and rho must both be prime")
    for name, x in (("g", g), ("h", h)):
        if x <= 1 or x >= p or numtheory.powmod(x, rho, p) != 1:
            raise GenerationError(f"{name} is not an order-rho generator")
    if g == h:
        raise GenerationError("g and h must be distinct")


def group_setup(bits: int, seed: int | bytes | str) -> GroupParams:
    """Deterministic group parameters with a `bits`-bit prime order rho.

    g is a random square; h is derived by hashing a domain tag into Z_p* and
    squaring, so no party knows log_g(h).
    """
    if bits < 4:
        raise GenerationError(f"group order of {bits} bits is too small")
    rng = random.Random(seed)
    p, rho = numtheory.gen_safe_group_order(bits, rng)
    while True:
        g = numtheory.powmod(rng.randrange(2, p - 1), 2, p)
        if g != 1:
            break
    counter = 0
    while True:
        h = numtheory.powmod(numtheory.hash_to_int(_H_TAG, p, counter) % p, 2, p)
        if h not in (0, 1, g):
            break
        counter += 1
    params = GroupParams(p=p, rho=rho, g=g, h=h)
    validate_group(params, rng)
    return params


def ot_query(alpha: int, z: int, params: GroupParams, rng: random.Random) -> OTQuery:
    """Receiver step: blind the choice index as y = g^r * h^alpha."""
    if not 1 <= alpha <= z:
        raise DomainError(f"choice index {alpha} outside [1, {z}]")
    r = rng.randrange(params.rho)
    y = (
        numtheory.powmod(params.g, r, params.p)
        * numtheory.powmod(params.h, alpha, params.p)
        % params.p
    )
    return OTQuery(y=y, r=r, alpha=alpha)


def ot_respond(y: int, messages: list[int], params: GroupParams, rng: random.Random) -> OTBatch:
    """Sender step: blind every message against the receiver's y.

    Each message must lie in [1, p-1]; it is blinded in the ambient group by
    (y / h^i)^k_i with a fresh uniform k_i per index.
    """
    p, rho, g, h = params.p, params.rho, params.g, params.h
    if not 1 <= y < p:
        raise ProtocolError(f"query element {y} outside Z_p*")
    powmod = numtheory.powmod
    h_inv = numtheory.invmod(h, p)
    base = y % p
    pairs = []
    for m in messages:
        if not 1 <= m < p:
            raise EncodingError(f"message {m} not encodable in [1, {p - 1}]")
        k = rng.randrange(rho)
        base = base * h_inv % p  # y / h^i, advanced once per index
        pairs.append((powmod(g, k, p), m * powmod(base, k, p) % p))
    return OTBatch(pairs=tuple(pairs))


def ot_recover(pair: tuple[int, int], r: int, params: GroupParams) -> int:
    """Receiver step: m_alpha = b / a^r for the alpha-th pair."""
    a, b = pair
    if a % params.p == 0:
        raise ProtocolError("transfer pair is not invertible")
    blind = numtheory.powmod(a, r, params.p)
    return b * numtheory.invmod(blind, params.p) % params.p
