"""Shared test utilities: independent oracles and tiny fixed structures."""

import random

from veribid.groupot import GroupParams


def modexp_oracle(base: int, exp: int, mod: int) -> int:
    """Square-and-multiply, written independently of the package backend."""
    result = 1
    base %= mod
    while exp:
        if exp & 1:
            result = result * base % mod
        base = base * base % mod
        exp >>= 1
    return result


def second_price_oracle(bids_by_index: dict[int, int]) -> tuple[int, int]:
    """Plaintext second-price auction on original bids.

    Returns (winner index, payment in cents); ties go to the lower index.
    The payment for a single bidder is the reserve sentinel 0.
    """
    ranked = sorted(bids_by_index.items(), key=lambda kv: (-kv[1], kv[0]))
    winner_index = ranked[0][0]
    payment = ranked[1][1] if len(ranked) > 1 else 0
    return winner_index, payment


def sampler_oracle(bit_bound: int, z: int, seed: int) -> list[int]:
    """Reimplementation of the documented mapping draw: z distinct values
    sampled without replacement from [1, 2^t - 1], descending."""
    rng = random.Random(seed)
    return sorted(rng.sample(range(1, (1 << bit_bound)), z), reverse=True)


class FixedRng:
    """Stub RNG whose randrange always returns the same value."""

    def __init__(self, value: int):
        self.value = value

    def randrange(self, *args) -> int:
        return self.value


# hand-checked tiny group: 23 = 2*11 + 1; 2 = 5^2 and 3 = 7^2 are squares
# mod 23, hence generators of the order-11 subgroup
TINY_GROUP = GroupParams(p=23, rho=11, g=2, h=3)
