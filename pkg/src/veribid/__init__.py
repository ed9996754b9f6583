"""Verifiable, privacy-preserving second-price ad auction simulator.

A three-tier sealed-bid auction (bidders -> ad networks -> auctioneer) whose
bids stay hidden behind an order-preserving mapping plus Paillier encryption,
and whose outcome any third party can verify from a signed bulletin log via
re-encryption checks and range-proof-based integer comparisons.
"""

from .auction import (
    AuctionOutcome,
    InternalResult,
    World,
    init_auction,
    internal_auction,
    global_auction,
    patch_verify,
    resolve_outcome,
    run_auction,
    scan_board,
    verify_ordering,
    verify_payment,
    verify_winner,
)
from .config import WorldConfig, load_config
from .errors import AuctionError

__version__ = "0.1.0"

__all__ = [
    "AuctionError",
    "AuctionOutcome",
    "InternalResult",
    "World",
    "WorldConfig",
    "__version__",
    "global_auction",
    "init_auction",
    "internal_auction",
    "load_config",
    "patch_verify",
    "resolve_outcome",
    "run_auction",
    "scan_board",
    "verify_ordering",
    "verify_payment",
    "verify_winner",
]
