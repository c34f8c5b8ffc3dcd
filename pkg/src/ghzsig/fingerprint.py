"""Quantum fingerprints over a seeded binary linear code, and the swap test.

A fingerprint of an ``n``-bit string ``x`` is the state

    |f(x)> = 1/sqrt(m) * sum_i |i-1>|E_i(x)>

over ``log2(m) + 1`` qubits, where ``E`` is an ``m x n`` GF(2) generator
matrix.  The index register is the most significant block and holds ``i-1``
in binary; the final qubit holds codeword bit ``i``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import bits as B
from .errors import CapabilityError, ConstructionError, InvalidArgumentError, ResourceError
from .quantum_core import (
    StateVector,
    apply_cswap,
    apply_hadamard,
    make_basis_state,
    measure_computational,
)

MAX_EXACT_N = 16
DEFAULT_COPIES = 16
_MAX_RANK_RETRIES = 64


class SwapVerdict(enum.Enum):
    EQUAL = "Equal"
    UNEQUAL = "Unequal"


@dataclass(frozen=True, eq=False)
class LinearCode:
    n: int
    m: int
    c_requested: float
    seed: int | None
    generator: np.ndarray = field(repr=False)

    @property
    def c(self) -> float:
        return self.m / self.n

    @property
    def index_qubits(self) -> int:
        return self.m.bit_length() - 1

    @property
    def num_qubits(self) -> int:
        return self.index_qubits + 1

    @property
    def code_id(self) -> tuple:
        return (self.n, self.m, self.c_requested, self.seed)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearCode):
            return NotImplemented
        return self.code_id == other.code_id and np.array_equal(self.generator, other.generator)

    __hash__ = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "m": self.m,
                "c_requested": self.c_requested,
                "seed": self.seed,
                "generator": [B.from_array(row) for row in self.generator],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "LinearCode":
        d = json.loads(text)
        rows = [B.to_array(B.check_bits(r, d["n"], "generator row")) for r in d["generator"]]
        gen = np.array(rows, dtype=np.uint8).reshape(d["m"], d["n"])
        code = cls(d["n"], d["m"], d["c_requested"], d["seed"], gen)
        _validate_shape(code)
        return code


def _validate_shape(code: LinearCode) -> None:
    if code.m < 2 or code.m & (code.m - 1):
        raise InvalidArgumentError(f"codeword length must be a power of two, got {code.m}")
    if code.generator.shape != (code.m, code.n):
        raise InvalidArgumentError(f"generator shape {code.generator.shape} != ({code.m}, {code.n})")
    if code.m <= code.n:
        raise InvalidArgumentError("codeword length must exceed input length")


def gf2_rank(matrix: np.ndarray) -> int:
    """Rank over GF(2) by Gaussian elimination."""
    a = (np.array(matrix, dtype=np.uint8) & 1).copy()
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        pivots = np.flatnonzero(a[rank:, col])
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        a[[rank, p]] = a[[p, rank]]
        below = np.flatnonzero(a[:, col])
        below = below[below != rank]
        a[below] ^= a[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def codeword_length(n: int, c_requested: float) -> int:
    """Smallest power of two at or above ``c_requested * n``."""
    target = c_requested * n
    m = 1 << max(0, math.ceil(math.log2(target)))
    # guard against log2 rounding on exact powers of two
    while m // 2 >= target:
        m //= 2
    while m < target:
        m *= 2
    return max(m, 2)


def make_code(n: int, c_requested: float, seed: int) -> LinearCode:
    """Seeded pseudorandom full-rank code with ``m`` rounded up to a power of two."""
    if n < 1:
        raise InvalidArgumentError(f"input length must be >= 1, got {n}")
    if not c_requested > 1:
        raise InvalidArgumentError(f"expansion ratio must exceed 1, got {c_requested}")
    m = codeword_length(n, c_requested)
    rng = np.random.default_rng(seed)
    for _ in range(_MAX_RANK_RETRIES):
        gen = rng.integers(0, 2, size=(m, n), dtype=np.uint8)
        if gf2_rank(gen) == n:
            return LinearCode(n, m, float(c_requested), seed, gen)
    raise ConstructionError(f"no full-rank {m}x{n} generator after {_MAX_RANK_RETRIES} draws")


def repetition_code(n: int, m: int) -> LinearCode:
    """Each input bit copied ``m // n`` times in a contiguous block (test fixture)."""
    if m % n or m <= n:
        raise InvalidArgumentError("repetition code needs m a multiple of n and m > n")
    reps = m // n
    gen = np.zeros((m, n), dtype=np.uint8)
    for j in range(n):
        gen[j * reps:(j + 1) * reps, j] = 1
    code = LinearCode(n, m, m / n, None, gen)
    _validate_shape(code)
    return code


def encode(code: LinearCode, x: str) -> str:
    B.check_bits(x, code.n, "message")
    return B.from_array((code.generator.astype(np.int64) @ B.to_array(x)) & 1)


def min_distance(code: LinearCode) -> int:
    if code.n > MAX_EXACT_N:
        raise CapabilityError(f"exhaustive distance search limited to n <= {MAX_EXACT_N}, got {code.n}")
    msgs = (np.arange(1, 1 << code.n)[:, None] >> np.arange(code.n - 1, -1, -1)) & 1
    words = (msgs @ code.generator.T.astype(np.int64)) & 1
    return int(words.sum(axis=1).min())


@dataclass(eq=False)
class FingerprintState:
    state: StateVector
    code: LinearCode
    consumed: bool = False

    @property
    def num_qubits(self) -> int:
        return self.state.num_qubits

    def take(self) -> StateVector:
        if self.consumed:
            raise ResourceError("fingerprint copy already consumed")
        self.consumed = True
        return self.state


def make_fingerprint(code: LinearCode, x: str) -> FingerprintState:
    word = B.to_array(encode(code, x))
    amps = np.zeros(2 * code.m, dtype=np.complex128)
    amps[2 * np.arange(code.m) + word] = 1.0 / math.sqrt(code.m)
    return FingerprintState(StateVector(amps), code)


def fingerprint_copies(code: LinearCode, x: str) -> Iterator[FingerprintState]:
    """Unbounded supply of freshly prepared copies of ``|f(x)>``."""
    while True:
        yield make_fingerprint(code, x)


def _same_code(a: FingerprintState, b: FingerprintState) -> None:
    if a.code != b.code:
        raise InvalidArgumentError("fingerprints were built from different codes")


def overlap(a: FingerprintState, b: FingerprintState) -> float:
    """<f(x)|f(y)>, which equals 1 - d_H(E(x), E(y)) / m."""
    _same_code(a, b)
    return float(np.vdot(a.state.amplitudes, b.state.amplitudes).real)


def accept_probability(s: float) -> float:
    return (1.0 + s * s) / 2.0


def swap_test(a: FingerprintState, b: FingerprintState, rng: np.random.Generator) -> bool:
    """Run the swap-test circuit once; True means the ancilla read 0.

    Both fingerprints are consumed.
    """
    _same_code(a, b)
    k = a.num_qubits
    psi = make_basis_state(1, "0").kron(a.take()).kron(b.take())
    psi = apply_hadamard(psi, 1)
    for j in range(k):
        psi = apply_cswap(psi, 1, 2 + j, 2 + k + j)
    psi = apply_hadamard(psi, 1)
    outcome, _ = measure_computational(psi, [1], rng)
    return outcome == "0"


def repeated_swap_test(
    source_a: Iterable[FingerprintState],
    source_b: Iterable[FingerprintState],
    r: int,
    rng: np.random.Generator,
) -> SwapVerdict:
    """Up to ``r`` swap tests on fresh copies; any rejection gives ``UNEQUAL``.

    Stops at the first rejection, leaving the remaining copies with their suppliers.
    """
    if r < 1:
        raise InvalidArgumentError(f"trial count must be >= 1, got {r}")
    it_a, it_b = iter(source_a), iter(source_b)
    for _ in range(r):
        try:
            a, b = next(it_a), next(it_b)
        except StopIteration:
            raise ResourceError("fingerprint supplier exhausted") from None
        if not swap_test(a, b, rng):
            return SwapVerdict.UNEQUAL
    return SwapVerdict.EQUAL
