"""Order-preserving bid mapping owned by the agent.

The bid space is a small finite set of cent amounts, so the mapping is a
random order-preserving injection into [1, 2^t - 1]: sample z distinct
values without replacement, sort, and pair them with the sorted bids.  This
gives the two properties the auction actually uses -- strict order
preservation and an exact inverse -- without the machinery of a bucketed
scheme.  Mapped values start at 1 so every one of them is a legal transfer
message and a legal Paillier plaintext difference.
"""

import random
from dataclasses import dataclass, field

from . import groupot, numtheory
from .errors import CapacityError, ConfigurationError, DomainError


@dataclass(frozen=True)
class BidSpace:
    """Descending tuple of the z possible bids, in integer cents."""

    values: tuple[int, ...]
    min_cents: int
    max_cents: int
    step_cents: int

    @property
    def z(self) -> int:
        return len(self.values)


def build_bid_space(min_cents: int, max_cents: int, step_cents: int) -> BidSpace:
    if not 0 < min_cents <= max_cents:
        raise ConfigurationError(f"need 0 < min <= max, got [{min_cents}, {max_cents}]")
    if step_cents <= 0:
        raise ConfigurationError(f"step must be positive, got {step_cents}")
    if (max_cents - min_cents) % step_cents != 0:
        raise ConfigurationError(
            f"step {step_cents} does not divide the range {max_cents - min_cents}"
        )
    values = tuple(range(max_cents, min_cents - 1, -step_cents))
    return BidSpace(values=values, min_cents=min_cents, max_cents=max_cents, step_cents=step_cents)


@dataclass(frozen=True)
class OpeTable:
    """Bijection between the bid space and its mapped image, both descending."""

    bids: tuple[int, ...]
    mapped: tuple[int, ...]
    bit_bound: int
    seed: int
    _forward: dict[int, int] = field(repr=False, default_factory=dict)
    _inverse: dict[int, int] = field(repr=False, default_factory=dict)

    def __post_init__(self):
        self._forward.update(zip(self.bids, self.mapped))
        self._inverse.update(zip(self.mapped, self.bids))

    def map(self, bid_cents: int) -> int:
        try:
            return self._forward[bid_cents]
        except KeyError:
            raise DomainError(f"bid {bid_cents} is not in the bid space")

    def unmap(self, mapped_bid: int) -> int:
        try:
            return self._inverse[mapped_bid]
        except KeyError:
            raise DomainError(f"mapped value {mapped_bid} is not in the table image")


def generate_mapping(space: BidSpace, bit_bound: int, seed: int) -> OpeTable:
    """Sample a fresh order-preserving table; deterministic given the seed."""
    capacity = (1 << bit_bound) - 1
    if capacity < space.z:
        raise CapacityError(
            f"2^{bit_bound} - 1 = {capacity} slots cannot hold {space.z} distinct values"
        )
    rng = random.Random(seed)
    sample = sorted(rng.sample(range(1, capacity + 1), space.z), reverse=True)
    return OpeTable(bids=space.values, mapped=tuple(sample), bit_bound=bit_bound, seed=seed)


def choice_index(space: BidSpace, bid_cents: int) -> int:
    """1-based position of a bid in the descending space (the OT choice)."""
    offset, rem = divmod(space.max_cents - bid_cents, space.step_cents)
    if rem != 0 or not 0 <= offset < space.z:
        raise DomainError(f"bid {bid_cents} is not in the bid space")
    return offset + 1


def serve_mapped_bids(
    table: OpeTable,
    y: int,
    params: groupot.GroupParams,
    rng: random.Random,
) -> groupot.OTBatch:
    """Answer one transfer query over the full mapped space.

    Deliberately takes only the blinded group element y, never the
    receiver's choice index.  Entry i of the reply carries the mapped value
    of the i-th largest bid, matching the descending bid-space order.
    """
    return groupot.ot_respond(y, list(table.mapped), params, rng)


def save_table(table: OpeTable, path: str) -> None:
    """Two columns per row: cents, mapped value as canonical hex; descending."""
    with open(path, "w", encoding="utf-8") as fh:
        for cents, mapped in zip(table.bids, table.mapped):
            fh.write(f"{cents}\t{numtheory.to_hex(mapped)}\n")


def load_table(path: str, bit_bound: int, seed: int = -1) -> OpeTable:
    bids = []
    mapped = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            try:
                cents_text, mapped_hex = line.rstrip("\n").split("\t")
                bids.append(int(cents_text))
                mapped.append(numtheory.from_hex(mapped_hex))
            except ValueError as exc:
                raise ConfigurationError(f"bad table row at line {lineno}: {exc}")
    return OpeTable(bids=tuple(bids), mapped=tuple(mapped), bit_bound=bit_bound, seed=seed)
