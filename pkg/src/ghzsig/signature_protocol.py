"""The GHZ-triplet signature protocol as a sequence of guarded phases.

Bob prepares ``N`` GHZ triplets and sends particle 3 of each to Alice.  Alice
signs message bit ``i`` by applying sigma-x to particle 3 of triplet ``i``
when the bit is 1, then returns the particles.  Bob undoes the GHZ
correlation with CNOT(control=2, target=1) and reads each bit from a Bell
measurement on particles 2 and 3: Phi+ is 0, Psi+ is 1.  Disputes are settled
by Trent, who swap-tests a fingerprint Alice deposited against one rebuilt
from the disputed message.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple

import numpy as np

from . import bits as B
from .errors import InvalidArgumentError, ProtocolOrderError, ResourceError
from .fingerprint import (
    DEFAULT_COPIES,
    FingerprintState,
    SwapVerdict,
    fingerprint_copies,
    make_code,
    make_fingerprint,
    repeated_swap_test,
)
from .quantum_core import (
    BellOutcome,
    StateVector,
    apply_cnot,
    apply_pauli_x,
    bell_measure,
    bell_probabilities,
    make_ghz,
)
from .transcript import Kind, Party, Transcript

SIGNED_PARTICLE = 3


class Phase(enum.Enum):
    INITIALIZED = "Initialized"
    PARTICLES_SENT_TO_ALICE = "ParticlesSentToAlice"
    SIGNED = "Signed"
    RETURNED_TO_BOB = "ReturnedToBob"
    AUTHENTICATED = "Authenticated"
    ARBITRATED = "Arbitrated"


class Holder(enum.Enum):
    ALICE = "Alice"
    BOB = "Bob"
    IN_TRANSIT = "InTransit"


class Operation(enum.Enum):
    IDENTITY = "Identity"
    SIGMA_X = "SigmaX"


class Verdict(enum.Enum):
    VALID = "Valid"
    INVALID = "Invalid"
    NOT_INVOKED = "NotInvoked"


BIT_FOR_OUTCOME = {
    BellOutcome.PHI_PLUS: "0",
    BellOutcome.PSI_PLUS: "1",
    # never produced by an honest run; decoded to the nearest letter and flagged
    BellOutcome.PHI_MINUS: "0",
    BellOutcome.PSI_MINUS: "1",
}
HONEST_OUTCOMES = frozenset({BellOutcome.PHI_PLUS, BellOutcome.PSI_PLUS})

Interceptor = Callable[["GhzSession"], None]


@dataclass
class GhzSession:
    session_id: str
    n_bits: int
    triplets: list[StateVector]
    custody: list[dict[int, Holder]]
    transcript: Transcript = field(default_factory=Transcript)
    phase: Phase = Phase.INITIALIZED
    phase_history: list[Phase] = field(default_factory=lambda: [Phase.INITIALIZED])
    bell_outcomes: list[BellOutcome] = field(default_factory=list)
    outcome_probabilities: list[float] = field(default_factory=list)
    anomalies: list[int] = field(default_factory=list)

    def holders(self, particle: int) -> set[Holder]:
        return {c[particle] for c in self.custody}

    def to_dict(self) -> dict:
        """Session trace: phase history, Bell outcomes, anomalies and transcript counters."""
        return {
            "session_id": self.session_id,
            "n_bits": self.n_bits,
            "phase_history": [p.value for p in self.phase_history],
            "bell_outcomes": [o.value for o in self.bell_outcomes],
            "anomaly_positions": list(self.anomalies),
            "transcript_totals": self.transcript.totals_dict(),
        }


@dataclass(frozen=True)
class SignatureRecord:
    session_id: str
    operations_applied: tuple[Operation, ...]


class Verification(NamedTuple):
    accepted: bool
    mismatches: list[int]


def _require(session: GhzSession, phase: Phase, action: str) -> None:
    if session.phase is not phase:
        raise ProtocolOrderError(
            f"cannot {action} in phase {session.phase.value}; expected {phase.value}"
        )


def _advance(session: GhzSession, phase: Phase) -> None:
    session.phase = phase
    session.phase_history.append(phase)


def _move_particle3(session: GhzSession, holder: Holder) -> None:
    for c in session.custody:
        c[SIGNED_PARTICLE] = holder


def init_session(
    n_bits: int, rng: np.random.Generator, transcript: Transcript | None = None
) -> GhzSession:
    """Bob prepares ``n_bits`` independent GHZ triplets and keeps all particles."""
    if n_bits < 1:
        raise InvalidArgumentError(f"need at least one triplet, got {n_bits}")
    ghz = make_ghz()
    return GhzSession(
        session_id=f"s{int(rng.integers(0, 2**32)):08x}",
        n_bits=n_bits,
        triplets=[ghz] * n_bits,
        custody=[{1: Holder.BOB, 2: Holder.BOB, 3: Holder.BOB} for _ in range(n_bits)],
        transcript=transcript if transcript is not None else Transcript(),
    )


def tamper_in_transit(session: GhzSession, index: int, gate: Callable[[StateVector, int], StateVector]) -> None:
    """Apply ``gate`` to particle 3 of triplet ``index`` while it is on the wire."""
    if not 0 <= index < session.n_bits:
        raise InvalidArgumentError(f"triplet index {index} outside 0..{session.n_bits - 1}")
    if session.custody[index][SIGNED_PARTICLE] is not Holder.IN_TRANSIT:
        raise ProtocolOrderError("particle 3 is not in transit")
    session.triplets[index] = gate(session.triplets[index], SIGNED_PARTICLE)


def send_particles_to_alice(session: GhzSession, interceptor: Interceptor | None = None) -> GhzSession:
    _require(session, Phase.INITIALIZED, "send particles to Alice")
    _move_particle3(session, Holder.IN_TRANSIT)
    session.transcript.log(Party.BOB, Party.ALICE, Kind.QUBIT, session.n_bits, "particle 3 of each triplet")
    if interceptor is not None:
        interceptor(session)
    _move_particle3(session, Holder.ALICE)
    _advance(session, Phase.PARTICLES_SENT_TO_ALICE)
    return session


def sign(session: GhzSession, message: str) -> SignatureRecord:
    """Alice applies sigma-x to particle 3 of triplet ``i`` exactly where ``message[i] == "1"``."""
    _require(session, Phase.PARTICLES_SENT_TO_ALICE, "sign")
    B.check_bits(message, session.n_bits, "message")
    ops = []
    for i, bit in enumerate(message):
        if bit == "1":
            session.triplets[i] = apply_pauli_x(session.triplets[i], SIGNED_PARTICLE)
            ops.append(Operation.SIGMA_X)
        else:
            ops.append(Operation.IDENTITY)
    _advance(session, Phase.SIGNED)
    return SignatureRecord(session.session_id, tuple(ops))


def return_particles_to_bob(
    session: GhzSession, record: SignatureRecord, interceptor: Interceptor | None = None
) -> GhzSession:
    _require(session, Phase.SIGNED, "return particles to Bob")
    if record.session_id != session.session_id:
        raise InvalidArgumentError("signature record belongs to a different session")
    _move_particle3(session, Holder.IN_TRANSIT)
    session.transcript.log(Party.ALICE, Party.BOB, Kind.QUBIT, session.n_bits, "signature |S>")
    if interceptor is not None:
        interceptor(session)
    _move_particle3(session, Holder.BOB)
    _advance(session, Phase.RETURNED_TO_BOB)
    return session


def authenticate(session: GhzSession, rng: np.random.Generator) -> str:
    """Recover the message from the returned triplets.

    Any Phi-/Psi- outcome is decoded to its nearest honest letter and its
    position recorded in ``session.anomalies``.
    """
    _require(session, Phase.RETURNED_TO_BOB, "authenticate")
    outcomes, probs, anomalies, recovered = [], [], [], []
    for i, triplet in enumerate(session.triplets):
        disentangled = apply_cnot(triplet, control=2, target=1)
        outcome, collapsed = bell_measure(disentangled, 2, 3, rng)
        probs.append(bell_probabilities(disentangled, 2, 3)[outcome])
        outcomes.append(outcome)
        recovered.append(BIT_FOR_OUTCOME[outcome])
        if outcome not in HONEST_OUTCOMES:
            anomalies.append(i)
        session.triplets[i] = collapsed
    session.bell_outcomes = outcomes
    session.outcome_probabilities = probs
    session.anomalies = anomalies
    _advance(session, Phase.AUTHENTICATED)
    return "".join(recovered)


def verify(m_decrypted: str, m_recovered: str) -> Verification:
    if len(m_decrypted) != len(m_recovered):
        raise InvalidArgumentError(
            f"length mismatch: decrypted {len(m_decrypted)} vs recovered {len(m_recovered)}"
        )
    mismatches = B.diff_positions(m_decrypted, m_recovered)
    return Verification(not mismatches, mismatches)


@dataclass(frozen=True)
class AliceParams:
    """Alice's private fingerprint parameters and the number of deposited copies."""

    c: float = 2.0
    seed: int = 0
    r: int = DEFAULT_COPIES


@dataclass
class ArbitrationRecord:
    n: int
    params: AliceParams
    trent_copies: list[FingerprintState] = field(repr=False)
    verdict: Verdict = Verdict.NOT_INVOKED

    @property
    def trent_fingerprint_params(self) -> tuple:
        return (self.n, self.params.c, self.params.seed, self.params.r)


@dataclass
class Arbitrator:
    """Trent: holds deposited fingerprint copies until a dispute needs them."""

    records: list[ArbitrationRecord] = field(default_factory=list)


def deposit_fingerprint(
    message: str,
    alice_params: AliceParams,
    trent: Arbitrator | None = None,
    transcript: Transcript | None = None,
) -> ArbitrationRecord:
    """Alice hands Trent ``r`` copies of ``|f(message)>``."""
    B.check_bits(message, name="message")
    if alice_params.r < 1:
        raise InvalidArgumentError(f"copy count must be >= 1, got {alice_params.r}")
    code = make_code(len(message), alice_params.c, alice_params.seed)
    copies = [make_fingerprint(code, message) for _ in range(alice_params.r)]
    if transcript is not None:
        transcript.log(
            Party.ALICE, Party.TRENT, Kind.QUBIT, alice_params.r * code.num_qubits, "fingerprint |f(M)>_T"
        )
    record = ArbitrationRecord(len(message), alice_params, copies)
    if trent is not None:
        trent.records.append(record)
    return record


def _drain(copies: list[FingerprintState]) -> Iterator[FingerprintState]:
    while copies:
        yield copies.pop(0)


def arbitrate(
    record: ArbitrationRecord,
    claimed_message: str,
    rng: np.random.Generator,
    session: GhzSession | None = None,
) -> Verdict:
    """Swap-test Trent's deposit against a fingerprint Alice rebuilds from ``claimed_message``."""
    B.check_bits(claimed_message, record.n, "claimed message")
    if session is not None:
        _require(session, Phase.AUTHENTICATED, "arbitrate")
    r = record.params.r
    if len(record.trent_copies) < r:
        raise ResourceError(f"Trent holds {len(record.trent_copies)} fingerprint copies, needs {r}")
    code = make_code(record.n, record.params.c, record.params.seed)
    result = repeated_swap_test(_drain(record.trent_copies), fingerprint_copies(code, claimed_message), r, rng)
    record.verdict = Verdict.VALID if result is SwapVerdict.EQUAL else Verdict.INVALID
    if session is not None:
        _advance(session, Phase.ARBITRATED)
    return record.verdict
