"""Schnorr signatures over the same prime-order subgroup used for transfers.

Nonces are derived deterministically from the secret key and message, so a
board built from a fixed seed serializes to identical bytes on every run.
"""

import random
from dataclasses import dataclass

from . import numtheory
from .groupot import GroupParams

_NONCE_TAG = b"veribid/schnorr-nonce/v1"
_CHALLENGE_TAG = b"veribid/schnorr-challenge/v1"

Signature = tuple[int, int]  # (challenge e, response s)


@dataclass(frozen=True)
class SigningKey:
    params: GroupParams
    secret: int
    public: int


def keygen(params: GroupParams, rng: random.Random) -> SigningKey:
    secret = rng.randrange(1, params.rho)
    public = numtheory.powmod(params.g, secret, params.p)
    return SigningKey(params=params, secret=secret, public=public)


def sign(key: SigningKey, message: bytes) -> Signature:
    p, rho, g = key.params.p, key.params.rho, key.params.g
    counter = 0
    while True:
        k = numtheory.hash_to_int(_NONCE_TAG, key.secret, message, counter) % rho
        if k != 0:
            break
        counter += 1
    commitment = numtheory.powmod(g, k, p)
    e = numtheory.hash_to_int(_CHALLENGE_TAG, p, g, key.public, commitment, message) % rho
    s = (k + key.secret * e) % rho
    return e, s


def verify(params: GroupParams, public: int, message: bytes, sig: Signature) -> bool:
    e, s = sig
    if not (0 <= e < params.rho and 0 <= s < params.rho):
        return False
    p, g = params.p, params.g
    # g^s * public^-e reconstructs the nonce commitment iff the signature is valid
    commitment = (
        numtheory.powmod(g, s, p)
        * numtheory.invmod(numtheory.powmod(public, e, p), p)
        % p
    )
    expected = numtheory.hash_to_int(_CHALLENGE_TAG, p, g, public, commitment, message) % params.rho
    return expected == e
