"""Small state-vector engine for the handful of gates the protocol needs.

Qubits are addressed 1-based, left to right as written in a ket: qubit 1 is
the most significant bit of the amplitude index, so ``|011>`` lives at
index 3.  Gates are pure functions returning a new :class:`StateVector`.
"""

from __future__ import annotations

import enum
import functools
from typing import Sequence

import numpy as np

from .bits import check_bits
from .errors import InternalConsistencyError, InvalidArgumentError

NORM_TOL = 1e-9
MEASURE_NORM_TOL = 1e-6
SQRT1_2 = 1.0 / np.sqrt(2.0)


class StateVector:
    """Normalized complex amplitudes over ``num_qubits`` qubits."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes, *, check_norm: bool = True):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size < 2 or amps.size & (amps.size - 1):
            raise InvalidArgumentError(
                f"amplitude vector length must be a power of two >= 2, got shape {amps.shape}"
            )
        if check_norm:
            norm = np.linalg.norm(amps)
            if abs(norm - 1.0) > NORM_TOL:
                raise InvalidArgumentError(f"state is not normalized (norm={norm!r})")
        self.num_qubits = amps.size.bit_length() - 1
        self.amplitudes = amps

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.num_qubits)

    def amplitude(self, bits: str) -> complex:
        check_bits(bits, self.num_qubits)
        return complex(self.amplitudes[int(bits, 2)])

    def dump(self, eps: float = 1e-12) -> str:
        """One line per nonzero amplitude, ``bits: re+im i``, 12 significant digits."""
        lines = []
        for idx in np.flatnonzero(np.abs(self.amplitudes) > eps):
            a = self.amplitudes[idx]
            lines.append(f"{idx:0{self.num_qubits}b}: {a.real:.12g}{a.imag:+.12g}i")
        return "\n".join(lines)

    def kron(self, other: "StateVector") -> "StateVector":
        return StateVector(np.kron(self.amplitudes, other.amplitudes), check_norm=False)


class BellOutcome(enum.Enum):
    PHI_PLUS = "PhiPlus"
    PHI_MINUS = "PhiMinus"
    PSI_PLUS = "PsiPlus"
    PSI_MINUS = "PsiMinus"


# rows are <bell| in the (q1, q2) computational basis 00, 01, 10, 11
BELL_ORDER = (BellOutcome.PHI_PLUS, BellOutcome.PHI_MINUS, BellOutcome.PSI_PLUS, BellOutcome.PSI_MINUS)
BELL_VECTORS = SQRT1_2 * np.array(
    [
        [1, 0, 0, 1],
        [1, 0, 0, -1],
        [0, 1, 1, 0],
        [0, 1, -1, 0],
    ],
    dtype=np.complex128,
)


def bell_state(outcome: BellOutcome) -> StateVector:
    return StateVector(BELL_VECTORS[BELL_ORDER.index(outcome)])


def _axis(state: StateVector, q: int) -> int:
    if isinstance(q, bool) or not isinstance(q, (int, np.integer)) or not 1 <= q <= state.num_qubits:
        raise InvalidArgumentError(f"qubit index {q!r} outside 1..{state.num_qubits}")
    return int(q) - 1


def _distinct_axes(state: StateVector, *qubits: int) -> list[int]:
    axes = [_axis(state, q) for q in qubits]
    if len(set(axes)) != len(axes):
        raise InvalidArgumentError(f"qubit indices must be distinct, got {qubits}")
    return axes


def _finish(t: np.ndarray) -> StateVector:
    return StateVector(np.ascontiguousarray(t).reshape(-1), check_norm=False)


def make_basis_state(k: int, bits: str) -> StateVector:
    if k < 1:
        raise InvalidArgumentError(f"need at least one qubit, got {k}")
    check_bits(bits, k)
    amps = np.zeros(1 << k, dtype=np.complex128)
    amps[int(bits, 2)] = 1.0
    return StateVector(amps)


def make_ghz() -> StateVector:
    """(|000> + |111>)/sqrt(2)."""
    amps = np.zeros(8, dtype=np.complex128)
    amps[0b000] = amps[0b111] = SQRT1_2
    return StateVector(amps)


def _split(state: StateVector, q: int) -> np.ndarray:
    """View amplitudes as (left, 2, right) around qubit ``q``."""
    ax = _axis(state, q)
    return state.amplitudes.reshape(1 << ax, 2, -1)


def apply_pauli_x(state: StateVector, q: int) -> StateVector:
    return _finish(_split(state, q)[:, ::-1, :])


def apply_pauli_z(state: StateVector, q: int) -> StateVector:
    t = _split(state, q).copy()
    t[:, 1, :] *= -1
    return _finish(t)


def apply_hadamard(state: StateVector, q: int) -> StateVector:
    t = _split(state, q)
    zero, one = t[:, 0, :], t[:, 1, :]
    return _finish(np.stack(((zero + one) * SQRT1_2, (zero - one) * SQRT1_2), axis=1))


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    c, t_ax = _distinct_axes(state, control, target)
    t = state.tensor().copy()
    idx = [slice(None)] * state.num_qubits
    idx[c] = 1
    sub = t[tuple(idx)].copy()
    # dropping the control axis shifts later axes down by one
    t[tuple(idx)] = np.flip(sub, axis=t_ax - (t_ax > c))
    return _finish(t)


def apply_cswap(state: StateVector, ctrl: int, a: int, b: int) -> StateVector:
    c, ax_a, ax_b = _distinct_axes(state, ctrl, a, b)
    t = state.tensor().copy()
    idx = [slice(None)] * state.num_qubits
    idx[c] = 1
    sub = t[tuple(idx)].copy()
    t[tuple(idx)] = np.swapaxes(sub, ax_a - (ax_a > c), ax_b - (ax_b > c))
    return _finish(t)


def _sample(probs: np.ndarray, rng: np.random.Generator) -> int:
    cdf = np.cumsum(probs)
    j = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(j, probs.size - 1)


def _check_measurable(state: StateVector) -> None:
    norm = state.norm()
    if abs(norm - 1.0) > MEASURE_NORM_TOL:
        raise InternalConsistencyError(f"cannot measure a state with norm {norm!r}")


@functools.lru_cache(maxsize=256)
def _outcome_labels(num_qubits: int, axes: tuple[int, ...]) -> np.ndarray:
    """For each basis index, the integer spelled by the bits at ``axes`` (first axis most significant)."""
    idx = np.arange(1 << num_qubits)
    labels = np.zeros_like(idx)
    for ax in axes:
        labels = (labels << 1) | ((idx >> (num_qubits - 1 - ax)) & 1)
    labels.setflags(write=False)
    return labels


def computational_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Outcome distribution over ``qubits``; entry ``j`` is the outcome whose bits spell ``j``."""
    axes = tuple(_distinct_axes(state, *qubits))
    labels = _outcome_labels(state.num_qubits, axes)
    return np.bincount(labels, weights=np.abs(state.amplitudes) ** 2, minlength=1 << len(axes))


def measure_computational(
    state: StateVector, qubits: Sequence[int], rng: np.random.Generator
) -> tuple[str, StateVector]:
    """Sample the listed qubits in the computational basis and collapse.

    Returns the outcome bits, in the order the qubits were given, and the
    renormalized post-measurement state over all qubits.
    """
    _check_measurable(state)
    axes = tuple(_distinct_axes(state, *qubits))
    labels = _outcome_labels(state.num_qubits, axes)
    probs = np.bincount(labels, weights=np.abs(state.amplitudes) ** 2, minlength=1 << len(axes))
    outcome = _sample(probs, rng)
    collapsed = np.where(labels == outcome, state.amplitudes, 0) / np.sqrt(probs[outcome])
    return format(outcome, f"0{len(axes)}b"), StateVector(collapsed, check_norm=False)


def bell_components(state: StateVector, q1: int, q2: int) -> np.ndarray:
    """Unnormalized remainder state for each Bell projection, shape (4, rest)."""
    axes = _distinct_axes(state, q1, q2)
    t = np.moveaxis(state.tensor(), axes, (0, 1)).reshape(4, -1)
    return BELL_VECTORS.conj() @ t


def bell_probabilities(state: StateVector, q1: int, q2: int) -> dict[BellOutcome, float]:
    comps = bell_components(state, q1, q2)
    probs = np.sum(np.abs(comps) ** 2, axis=1)
    return {o: float(p) for o, p in zip(BELL_ORDER, probs)}


def bell_measure(
    state: StateVector, q1: int, q2: int, rng: np.random.Generator
) -> tuple[BellOutcome, StateVector]:
    """Projective measurement of qubits ``(q1, q2)`` onto the four Bell states.

    The collapsed state carries the exact Bell vector on ``(q1, q2)``.
    """
    _check_measurable(state)
    axes = _distinct_axes(state, q1, q2)
    comps = bell_components(state, q1, q2)
    probs = np.sum(np.abs(comps) ** 2, axis=1)
    j = _sample(probs, rng)
    rest = comps[j] / np.sqrt(probs[j])
    t = np.outer(BELL_VECTORS[j], rest).reshape((2,) * state.num_qubits)
    t = np.moveaxis(t, (0, 1), axes)
    return BELL_ORDER[j], _finish(t)


def distance(a: StateVector, b: StateVector) -> float:
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def phase_distance(a: StateVector, b: StateVector) -> float:
    """L2 distance after choosing the global phase of ``b`` that best matches ``a``."""
    if a.num_qubits != b.num_qubits:
        raise InvalidArgumentError("states have different qubit counts")
    inner = np.vdot(b.amplitudes, a.amplitudes)
    phase = inner / abs(inner) if abs(inner) > 0 else 1.0
    return float(np.linalg.norm(a.amplitudes - phase * b.amplitudes))
