import json

import pytest

from ghzsig import bits as B
from ghzsig.errors import InvalidArgumentError, ScenarioError
from ghzsig.harness import (
    REFERENCE_ROWS,
    Attack,
    ScenarioConfig,
    run_alice_disavow,
    run_batch,
    run_bob_forge,
    run_eve_attack,
    run_honest,
    run_scenario,
    table1_row,
    transcript_row,
)
from ghzsig.signature_protocol import Verdict
from ghzsig.transcript import Kind, Party, Transcript


def test_table1_row():
    assert table1_row(64, 2) == {"alice_to_bob": 64, "bob_to_alice": 64, "alice_to_trent": 8}
    assert table1_row(1, 2)["alice_to_trent"] == 2
    assert table1_row(64, 2, r=16)["alice_to_trent"] == 128
    # c*n = 192 rounds up to m = 256
    assert table1_row(64, 3)["alice_to_trent"] == 9
    with pytest.raises(InvalidArgumentError):
        table1_row(4, 1)


def test_reference_rows_are_static():
    assert REFERENCE_ROWS["arbitrated GHZ signature (Zeng et al.)"]["arbitrator_to_bob"] == "5n+1"


def test_honest_run_matches_table1():
    rep = run_honest(ScenarioConfig(n_bits=64, c_requested=2, r_copies=1, master_seed=42))
    assert rep.accepted and rep.recovered_equals_message
    assert rep.qber == 0
    assert rep.arbitration_verdict is Verdict.NOT_INVOKED
    assert transcript_row(rep.transcript_totals) == table1_row(64, 2)
    assert rep.classical_bits == {"Alice->Bob:ClassicalBit": 64}


@pytest.mark.parametrize("n", [1, 5, 40])
def test_honest_runs_accept(n):
    for rep in run_batch(ScenarioConfig(n_bits=n, r_copies=2, master_seed=100), 10):
        assert rep.accepted and rep.recovered_equals_message and not rep.anomaly_positions


def test_fixed_message_is_used():
    rep = run_honest(ScenarioConfig(n_bits=6, message="011011", r_copies=1))
    assert rep.accepted and rep.recovered_equals_message


def test_scenario_determinism():
    cfg = ScenarioConfig(n_bits=20, attack=Attack.BOB_FORGE, master_seed=7, r_copies=4)
    a, b = run_scenario(cfg), run_scenario(cfg)
    assert a == b
    assert a.to_json() == b.to_json()
    assert "wall_time" not in a.to_dict() and "wall_time" in a.to_dict(include_timing=True)


def test_eve_flip_positions():
    mask = B.mask_from_positions(32, [3, 17])
    rep = run_eve_attack(ScenarioConfig(n_bits=32, attack=Attack.EVE_FLIP, mask=mask, master_seed=1))
    assert not rep.accepted
    assert rep.mismatch_positions == [3, 17]
    assert rep.anomaly_positions == []


def test_eve_phase_positions():
    mask = B.mask_from_positions(32, [5])
    rep = run_eve_attack(ScenarioConfig(n_bits=32, attack=Attack.EVE_PHASE, mask=mask, master_seed=1))
    assert not rep.accepted
    assert rep.anomaly_positions == [5]


def test_eve_flipping_ciphertext_too_goes_unnoticed_by_bob():
    mask = B.mask_from_positions(16, [2, 9])
    cfg = ScenarioConfig(n_bits=16, attack=Attack.EVE_FLIP, mask=mask, eve_flips_ciphertext=True)
    rep = run_eve_attack(cfg)
    # the pad is malleable: Bob's two copies of M agree, but neither is Alice's message
    assert rep.accepted
    assert not rep.recovered_equals_message


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(attack=Attack.EVE_FLIP, mask="0" * 8),
        dict(attack=Attack.EVE_FLIP),
        dict(attack=Attack.EVE_PHASE, mask="01"),
        dict(attack=Attack.NONE, mask="00000001"),
        dict(attack=Attack.NONE, forge_mask="00000001"),
        dict(message="0101"),
        dict(r_copies=0),
        dict(c_requested=1),
        dict(n_bits=0),
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(InvalidArgumentError):
        ScenarioConfig(**{"n_bits": 8, **kwargs}).validate()


def test_runner_attack_guards():
    with pytest.raises(InvalidArgumentError):
        run_honest(ScenarioConfig(attack=Attack.BOB_FORGE))
    with pytest.raises(InvalidArgumentError):
        run_eve_attack(ScenarioConfig())
    with pytest.raises(InvalidArgumentError):
        run_bob_forge(ScenarioConfig())
    with pytest.raises(InvalidArgumentError):
        run_alice_disavow(ScenarioConfig())


def test_too_little_key_material():
    with pytest.raises(ScenarioError):
        run_honest(ScenarioConfig(n_bits=64, bb84_raw_count=64))


def test_bob_forge_detected():
    rep = run_bob_forge(ScenarioConfig(n_bits=8, attack=Attack.BOB_FORGE, r_copies=16, master_seed=3))
    assert rep.accepted
    assert rep.disputed_message_differs
    assert rep.arbitration_verdict is Verdict.INVALID


def test_degenerate_forgery_is_valid():
    cfg = ScenarioConfig(n_bits=8, attack=Attack.BOB_FORGE, forge_mask="0" * 8, r_copies=16)
    rep = run_bob_forge(cfg)
    assert rep.disputed_message_differs is False
    assert rep.arbitration_verdict is Verdict.VALID


def test_alice_cannot_disavow():
    for seed in range(5):
        rep = run_alice_disavow(
            ScenarioConfig(n_bits=16, attack=Attack.ALICE_DISAVOW, r_copies=4, master_seed=seed)
        )
        assert rep.accepted and rep.arbitration_verdict is Verdict.VALID
        # r copies of a (log2(32) + 1)-qubit fingerprint
        assert rep.transcript_totals["Alice->Trent:Qubit"] == 4 * 6


def test_transcript_bookkeeping():
    t = Transcript()
    t.log(Party.BOB, Party.ALICE, Kind.QUBIT, 5, "x")
    t.log(Party.ALICE, Party.BOB, Kind.QUBIT, 5, "y")
    t.log(Party.ALICE, Party.BOB, Kind.CLASSICAL_BIT, 5, "z")
    t.log(Party.ALICE, Party.TRENT, Kind.QUBIT, 3)
    assert sum(t.totals.values()) == sum(e.count for e in t.entries)
    assert t.sent_by(Party.ALICE) == 8 and t.received_by(Party.BOB) == 5
    total_sent = sum(t.sent_by(p) for p in Party)
    total_received = sum(t.received_by(p) for p in Party)
    assert total_sent == total_received == 13
    assert json.loads(json.dumps(t.to_dict()))["totals"]["Alice->Trent:Qubit"] == 3
    with pytest.raises(InvalidArgumentError):
        t.log(Party.BOB, Party.BOB, Kind.QUBIT, 1)
