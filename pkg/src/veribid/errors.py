"""Exception taxonomy shared by every protocol layer."""


class AuctionError(Exception):
    """Base class for all protocol and harness errors."""


class GenerationError(AuctionError):
    """Key or group material could not be generated within the retry budget."""


class DomainError(AuctionError):
    """A value lies outside its legal domain."""


class RandomnessError(AuctionError):
    """Encryption randomness is not a unit modulo the key."""


class DecryptionError(AuctionError):
    """The ciphertext is not decryptable under this key."""


class ConsistencyError(AuctionError):
    """Randomness-based decryption does not match the ciphertext."""


class KeyMismatchError(AuctionError):
    """Ciphertexts produced under different keys were combined."""


class ConfigurationError(AuctionError):
    """Bid space or world configuration is invalid."""


class CapacityError(AuctionError):
    """The mapped-bid range cannot hold that many distinct values."""


class ParameterError(AuctionError):
    """A protocol parameter violates its bound (e.g. 2^t >= n/2)."""


class UnprovableError(AuctionError):
    """No valid proof exists for the claimed statement."""


class EncodingError(AuctionError):
    """A transfer message is not representable in the group."""


class ProtocolError(AuctionError):
    """A protocol message is malformed or out of sequence."""


class AuthorizationError(AuctionError):
    """The author is not allowed to write to the bulletin board."""


class SignatureError(AuctionError):
    """Signing failed or a signing key does not match its registration."""


class BoardError(AuctionError):
    """The bulletin log is malformed, gapped, or carries a bad signature."""


class HarnessError(AuctionError):
    """The fault-injection harness was driven with bad arguments."""
