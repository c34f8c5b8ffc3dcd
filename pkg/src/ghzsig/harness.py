"""End-to-end scenarios: honest signing, Eve's tampering, Bob's forgery, Alice's disavowal."""

from __future__ import annotations

import enum
import json
import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import bits as B
from .errors import InvalidArgumentError, ScenarioError
from .fingerprint import DEFAULT_COPIES, codeword_length
from .qkd_otp import (
    DEFAULT_QBER_THRESHOLD,
    DEFAULT_SAMPLE_FRACTION,
    Bb84Report,
    Ciphertext,
    bb84_exchange,
    otp_decrypt,
    otp_encrypt,
)
from .quantum_core import apply_pauli_x, apply_pauli_z
from .signature_protocol import (
    AliceParams,
    Arbitrator,
    GhzSession,
    Verdict,
    arbitrate,
    authenticate,
    deposit_fingerprint,
    init_session,
    return_particles_to_bob,
    send_particles_to_alice,
    sign,
    tamper_in_transit,
    verify,
)
from .transcript import Kind, Party, Transcript


class Attack(enum.Enum):
    NONE = "None"
    EVE_FLIP = "EveFlip"
    EVE_PHASE = "EvePhase"
    BOB_FORGE = "BobForge"
    ALICE_DISAVOW = "AliceDisavow"


# qubit counts for the GHZ-based arbitrated schemes we compare against; not simulated
REFERENCE_ROWS = {
    "arbitrated GHZ signature (Zeng et al.)": {
        "alice_to_bob": "3n",
        "bob_to_arbitrator": "3n",
        "arbitrator_to_bob": "5n+1",
    },
    "arbitrated, message recovery, public board (Lee et al.)": {
        "alice_to_bob": "2n",
        "bob_to_arbitrator": "3n",
        "arbitrator_to_bob": "3n+2",
    },
    "arbitrated, message recovery, no public board (Lee et al.)": {
        "alice_to_bob": "2n",
        "bob_to_arbitrator": "3n",
        "arbitrator_to_bob": "4n+1",
    },
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to replay a scenario bit for bit.

    ``mask`` selects the triplets Eve tampers with (EveFlip/EvePhase).
    ``forge_mask`` selects the bits Bob flips (BobForge); ``None`` means one
    random bit.  ``eve_flips_ciphertext`` additionally has Eve flip the same
    positions of E_K{M}.
    """

    n_bits: int = 64
    message: str = "random"
    c_requested: float = 2.0
    code_seed: int = 0
    r_copies: int = DEFAULT_COPIES
    master_seed: int = 0
    attack: Attack = Attack.NONE
    mask: str | None = None
    forge_mask: str | None = None
    eve_flips_ciphertext: bool = False
    bb84_raw_count: int | None = None
    sample_fraction: float = DEFAULT_SAMPLE_FRACTION
    qber_threshold: float = DEFAULT_QBER_THRESHOLD

    def validate(self) -> "ScenarioConfig":
        if self.n_bits < 1:
            raise InvalidArgumentError(f"n_bits must be >= 1, got {self.n_bits}")
        if self.message != "random":
            B.check_bits(self.message, self.n_bits, "message")
        if not self.c_requested > 1:
            raise InvalidArgumentError(f"c must exceed 1, got {self.c_requested}")
        if self.r_copies < 1:
            raise InvalidArgumentError(f"r_copies must be >= 1, got {self.r_copies}")
        if self.attack in (Attack.EVE_FLIP, Attack.EVE_PHASE):
            if self.mask is None:
                raise InvalidArgumentError(f"{self.attack.value} needs a mask")
            B.check_bits(self.mask, self.n_bits, "mask")
            if "1" not in self.mask:
                raise InvalidArgumentError("mask selects no positions")
        elif self.mask is not None:
            raise InvalidArgumentError(f"mask given for attack {self.attack.value}")
        if self.forge_mask is not None:
            if self.attack is not Attack.BOB_FORGE:
                raise InvalidArgumentError("forge_mask only applies to BobForge")
            B.check_bits(self.forge_mask, self.n_bits, "forge_mask")
        if self.eve_flips_ciphertext and self.attack is not Attack.EVE_FLIP:
            raise InvalidArgumentError("eve_flips_ciphertext only applies to EveFlip")
        return self

    @property
    def raw_count(self) -> int:
        return self.bb84_raw_count if self.bb84_raw_count is not None else max(64, 8 * self.n_bits)

    def to_dict(self) -> dict:
        return {
            "n_bits": self.n_bits,
            "message": self.message,
            "c_requested": self.c_requested,
            "code_seed": self.code_seed,
            "r_copies": self.r_copies,
            "master_seed": self.master_seed,
            "attack": self.attack.value,
            "mask": self.mask,
            "forge_mask": self.forge_mask,
            "eve_flips_ciphertext": self.eve_flips_ciphertext,
            "bb84_raw_count": self.raw_count,
            "sample_fraction": self.sample_fraction,
            "qber_threshold": self.qber_threshold,
        }


@dataclass
class ScenarioReport:
    scenario: str
    n_bits: int
    master_seed: int
    accepted: bool
    recovered_equals_message: bool
    mismatch_positions: list[int]
    anomaly_positions: list[int]
    arbitration_verdict: Verdict
    qber: float
    transcript_totals: dict[str, int]
    classical_bits: dict[str, int]
    disputed_message_differs: bool | None = None
    wall_time: float = field(default=0.0, compare=False)

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "scenario": self.scenario,
            "n_bits": self.n_bits,
            "master_seed": self.master_seed,
            "accepted": self.accepted,
            "recovered_equals_message": self.recovered_equals_message,
            "mismatch_positions": list(self.mismatch_positions),
            "anomaly_positions": list(self.anomaly_positions),
            "arbitration_verdict": self.arbitration_verdict.value,
            "qber": self.qber,
            "transcript_totals": dict(self.transcript_totals),
            "classical_bits": dict(self.classical_bits),
            "disputed_message_differs": self.disputed_message_differs,
        }
        if include_timing:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing))


@dataclass
class _Streams:
    bb84: np.random.Generator
    ghz: np.random.Generator
    swap: np.random.Generator
    forgery: np.random.Generator
    message: np.random.Generator


def _streams(master_seed: int) -> _Streams:
    children = np.random.SeedSequence(master_seed).spawn(5)
    return _Streams(*(np.random.default_rng(s) for s in children))


@dataclass
class _Run:
    """State left behind by the shared honest prefix of every scenario."""

    config: ScenarioConfig
    streams: _Streams
    transcript: Transcript
    bb84: Bb84Report
    message: str
    session: GhzSession
    ciphertext: Ciphertext
    decrypted: str
    recovered: str
    trent: Arbitrator


def _run_protocol(config: ScenarioConfig) -> _Run:
    config.validate()
    streams = _streams(config.master_seed)
    n = config.n_bits
    message = config.message if config.message != "random" else B.random_bits(n, streams.message)
    transcript = Transcript()

    bb84 = bb84_exchange(
        config.raw_count,
        eve_present=False,
        sample_fraction=config.sample_fraction,
        qber_threshold=config.qber_threshold,
        rng=streams.bb84,
    )
    if bb84.aborted:
        raise ScenarioError(f"key exchange aborted with QBER {bb84.qber:.3f}")
    if bb84.final_key.length < n:
        raise ScenarioError(
            f"key exchange produced {bb84.final_key.length} bits, need {n}; raise bb84_raw_count"
        )
    alice_key, bob_key = bb84.final_key, bb84.bob_key

    eve_gate = None
    if config.attack is Attack.EVE_FLIP:
        eve_gate = apply_pauli_x
    elif config.attack is Attack.EVE_PHASE:
        eve_gate = apply_pauli_z
    targets = B.positions_of_ones(config.mask) if config.mask else []

    def eve(session: GhzSession) -> None:
        for i in targets:
            tamper_in_transit(session, i, eve_gate)

    session = init_session(n, streams.ghz, transcript)
    send_particles_to_alice(session)
    record = sign(session, message)
    return_particles_to_bob(session, record, interceptor=eve if eve_gate else None)

    ciphertext = otp_encrypt(alice_key, message)
    sent = ciphertext
    if config.eve_flips_ciphertext:
        sent = Ciphertext(B.xor(ciphertext.bits, config.mask), ciphertext.key_offset)
    transcript.log(Party.ALICE, Party.BOB, Kind.CLASSICAL_BIT, sent.length, "E_K{M}")

    trent = Arbitrator()
    deposit_fingerprint(
        message,
        AliceParams(config.c_requested, config.code_seed, config.r_copies),
        trent,
        transcript,
    )

    recovered = authenticate(session, streams.ghz)
    decrypted = otp_decrypt(bob_key, sent)
    return _Run(config, streams, transcript, bb84, message, session, ciphertext, decrypted, recovered, trent)


def _report(run: _Run, started: float, verdict: Verdict = Verdict.NOT_INVOKED, **extra) -> ScenarioReport:
    check = verify(run.decrypted, run.recovered)
    totals = run.transcript.totals_dict()
    quantum = {k: v for k, v in totals.items() if k.endswith(":" + Kind.QUBIT.value)}
    classical = {k: v for k, v in totals.items() if k.endswith(":" + Kind.CLASSICAL_BIT.value)}
    return ScenarioReport(
        scenario=run.config.attack.value,
        n_bits=run.config.n_bits,
        master_seed=run.config.master_seed,
        accepted=check.accepted and not run.session.anomalies,
        recovered_equals_message=run.recovered == run.message,
        mismatch_positions=check.mismatches,
        anomaly_positions=list(run.session.anomalies),
        arbitration_verdict=verdict,
        qber=run.bb84.qber,
        transcript_totals=quantum,
        classical_bits=classical,
        wall_time=time.perf_counter() - started,
        **extra,
    )


def run_honest(config: ScenarioConfig) -> ScenarioReport:
    if config.attack is not Attack.NONE:
        raise InvalidArgumentError(f"run_honest needs attack=None, got {config.attack.value}")
    started = time.perf_counter()
    return _report(_run_protocol(config), started)


def run_eve_attack(config: ScenarioConfig) -> ScenarioReport:
    """Eve applies sigma-x (EveFlip) or sigma-z (EvePhase) to masked particles on the Alice->Bob leg."""
    if config.attack not in (Attack.EVE_FLIP, Attack.EVE_PHASE):
        raise InvalidArgumentError(f"run_eve_attack needs EveFlip or EvePhase, got {config.attack.value}")
    started = time.perf_counter()
    return _report(_run_protocol(config), started)


def run_bob_forge(config: ScenarioConfig) -> ScenarioReport:
    """Bob swaps in a forged message after an honest signing; Trent tests the forged claim."""
    if config.attack is not Attack.BOB_FORGE:
        raise InvalidArgumentError(f"run_bob_forge needs BobForge, got {config.attack.value}")
    started = time.perf_counter()
    run = _run_protocol(config)
    n = config.n_bits
    if config.forge_mask is None:
        forge_mask = B.mask_from_positions(n, [int(run.streams.forgery.integers(0, n))])
    else:
        forge_mask = config.forge_mask
    # Bob knows K, so E_K{M_forged} is as easy for him as the forged message itself
    forged = B.xor(run.message, forge_mask)
    record = run.trent.records[-1]
    verdict = arbitrate(record, forged, run.streams.swap, session=run.session)
    return _report(run, started, verdict, disputed_message_differs=forged != run.message)


def run_alice_disavow(config: ScenarioConfig) -> ScenarioReport:
    """Alice denies a genuine signature; Trent tests the genuine message against her deposit."""
    if config.attack is not Attack.ALICE_DISAVOW:
        raise InvalidArgumentError(f"run_alice_disavow needs AliceDisavow, got {config.attack.value}")
    started = time.perf_counter()
    run = _run_protocol(config)
    record = run.trent.records[-1]
    verdict = arbitrate(record, run.message, run.streams.swap, session=run.session)
    return _report(run, started, verdict, disputed_message_differs=False)


RUNNERS = {
    Attack.NONE: run_honest,
    Attack.EVE_FLIP: run_eve_attack,
    Attack.EVE_PHASE: run_eve_attack,
    Attack.BOB_FORGE: run_bob_forge,
    Attack.ALICE_DISAVOW: run_alice_disavow,
}


def run_scenario(config: ScenarioConfig) -> ScenarioReport:
    return RUNNERS[config.attack](config)


def run_batch(config: ScenarioConfig, count: int) -> list[ScenarioReport]:
    """``count`` runs with master seeds ``config.master_seed``, ``+1``, ..."""
    return [run_scenario(replace(config, master_seed=config.master_seed + i)) for i in range(count)]


def table1_row(n: int, c: float, r: int = 1) -> dict[str, int]:
    """Transmitted qubits per channel for an ``n``-bit message."""
    if n < 1:
        raise InvalidArgumentError(f"n must be >= 1, got {n}")
    if not c > 1:
        raise InvalidArgumentError(f"c must exceed 1, got {c}")
    if r < 1:
        raise InvalidArgumentError(f"r must be >= 1, got {r}")
    m = codeword_length(n, c)
    return {
        "alice_to_bob": n,
        "bob_to_alice": n,
        "alice_to_trent": r * (int(math.log2(m)) + 1),
    }


def transcript_row(totals: dict[str, int]) -> dict[str, int]:
    """Pick the three Table 1 channels out of transcript totals."""
    q = Kind.QUBIT.value
    return {
        "alice_to_bob": totals.get(f"Alice->Bob:{q}", 0),
        "bob_to_alice": totals.get(f"Bob->Alice:{q}", 0),
        "alice_to_trent": totals.get(f"Alice->Trent:{q}", 0),
    }
