"""BB84 key exchange (honest or full intercept-resend) and a one-time pad."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import bits as B
from .errors import InvalidArgumentError, KeyExhaustedError, OneTimeViolationError
from .quantum_core import apply_hadamard, make_basis_state, measure_computational

MIN_RAW_COUNT = 16
DEFAULT_SAMPLE_FRACTION = 0.25
DEFAULT_QBER_THRESHOLD = 0.11
RECTILINEAR, DIAGONAL = 0, 1


class Key:
    """One party's copy of a shared key, with one-time bookkeeping.

    Segments are handed out left to right.  Each party's copy tracks its own
    usage, so Alice encrypting and Bob decrypting the same segment is fine,
    but either of them touching it twice is not.
    """

    def __init__(self, bits: str):
        self.bits = B.check_bits(bits, name="key")
        self._used = np.zeros(len(bits), dtype=bool)

    @property
    def length(self) -> int:
        return len(self.bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __repr__(self) -> str:
        return f"Key(length={self.length}, remaining={self.remaining})"

    @property
    def remaining(self) -> int:
        return int(np.count_nonzero(~self._used))

    def next_offset(self) -> int:
        used = np.flatnonzero(self._used)
        return int(used[-1]) + 1 if used.size else 0

    def consume(self, length: int, offset: int | None = None) -> tuple[int, str]:
        if offset is None:
            offset = self.next_offset()
        if offset < 0 or offset + length > self.length:
            raise KeyExhaustedError(
                f"need key bits [{offset}, {offset + length}) but key has {self.length}"
            )
        if self._used[offset:offset + length].any():
            raise OneTimeViolationError(f"key segment [{offset}, {offset + length}) already used")
        self._used[offset:offset + length] = True
        return offset, self.bits[offset:offset + length]


@dataclass(frozen=True)
class Ciphertext:
    bits: str
    key_offset: int = 0

    @property
    def length(self) -> int:
        return len(self.bits)


def otp_encrypt(key: Key, message: str, offset: int | None = None) -> Ciphertext:
    B.check_bits(message, name="message")
    offset, pad = key.consume(len(message), offset)
    return Ciphertext(B.xor(message, pad), offset)


def otp_decrypt(key: Key, ciphertext: Ciphertext) -> str:
    _, pad = key.consume(ciphertext.length, ciphertext.key_offset)
    return B.xor(ciphertext.bits, pad)


@dataclass
class Bb84Report:
    raw_count: int
    sifted_count: int
    sample_count: int
    mismatches: int
    qber: float
    eve_present: bool
    qber_threshold: float
    final_key: Key = field(repr=False)
    bob_key: Key = field(repr=False)

    @property
    def aborted(self) -> bool:
        return self.final_key.length == 0

    def to_dict(self) -> dict:
        # key material stays out of reports
        return {
            "raw_count": self.raw_count,
            "sifted_count": self.sifted_count,
            "sample_count": self.sample_count,
            "mismatches": self.mismatches,
            "qber": self.qber,
            "eve_present": self.eve_present,
            "qber_threshold": self.qber_threshold,
            "aborted": self.aborted,
            "final_key_length": self.final_key.length,
        }


def _prepare_uncached(bit: int, basis: int):
    psi = make_basis_state(1, str(bit))
    return apply_hadamard(psi, 1) if basis == DIAGONAL else psi


# gates never mutate their input, so the four BB84 states can be shared
_PREPARED = {(bit, basis): _prepare_uncached(bit, basis) for bit in (0, 1) for basis in (0, 1)}


def _prepare(bit: int, basis: int):
    return _PREPARED[int(bit), int(basis)]


def _measure(psi, basis: int, rng: np.random.Generator) -> int:
    if basis == DIAGONAL:
        psi = apply_hadamard(psi, 1)
    outcome, _ = measure_computational(psi, [1], rng)
    return int(outcome)


def bb84_exchange(
    raw_count: int,
    eve_present: bool,
    sample_fraction: float = DEFAULT_SAMPLE_FRACTION,
    qber_threshold: float = DEFAULT_QBER_THRESHOLD,
    rng: np.random.Generator | None = None,
) -> Bb84Report:
    """Simulate BB84 qubit by qubit, sift, and estimate the QBER on a random sample.

    With ``eve_present`` every qubit is intercepted, measured in a random basis
    and resent.  If the sampled QBER exceeds ``qber_threshold`` the exchange
    aborts and both returned keys are empty.
    """
    if raw_count < MIN_RAW_COUNT:
        raise InvalidArgumentError(f"raw_count must be >= {MIN_RAW_COUNT}, got {raw_count}")
    if not 0 < sample_fraction < 1:
        raise InvalidArgumentError(f"sample_fraction must lie in (0, 1), got {sample_fraction}")
    rng = rng if rng is not None else np.random.default_rng()

    alice_bits = rng.integers(0, 2, size=raw_count)
    alice_bases = rng.integers(0, 2, size=raw_count)
    bob_bases = rng.integers(0, 2, size=raw_count)
    eve_bases = rng.integers(0, 2, size=raw_count)
    bob_bits = np.empty(raw_count, dtype=np.int64)
    for i in range(raw_count):
        psi = _prepare(alice_bits[i], alice_bases[i])
        if eve_present:
            seen = _measure(psi, eve_bases[i], rng)
            psi = _prepare(seen, eve_bases[i])
        bob_bits[i] = _measure(psi, bob_bases[i], rng)

    sifted = np.flatnonzero(alice_bases == bob_bases)
    sample_count = int(round(sample_fraction * sifted.size))
    if sample_count < 1 or sample_count >= sifted.size:
        raise InvalidArgumentError(
            f"{sifted.size} sifted bits cannot support a sample fraction of {sample_fraction}"
        )
    sample_idx = rng.choice(sifted.size, size=sample_count, replace=False)
    in_sample = np.zeros(sifted.size, dtype=bool)
    in_sample[sample_idx] = True
    sampled = sifted[in_sample]
    mismatches = int(np.count_nonzero(alice_bits[sampled] != bob_bits[sampled]))
    qber = mismatches / sample_count

    kept = sifted[~in_sample]
    if qber > qber_threshold:
        alice_key, bob_key = Key(""), Key("")
    else:
        alice_key, bob_key = Key(B.from_array(alice_bits[kept])), Key(B.from_array(bob_bits[kept]))
    return Bb84Report(
        raw_count=raw_count,
        sifted_count=int(sifted.size),
        sample_count=sample_count,
        mismatches=mismatches,
        qber=qber,
        eve_present=eve_present,
        qber_threshold=qber_threshold,
        final_key=alice_key,
        bob_key=bob_key,
    )
