import math

import numpy as np
import pytest

from ghzsig import bits as B
from ghzsig.errors import InvalidArgumentError, KeyExhaustedError, OneTimeViolationError
from ghzsig.qkd_otp import Ciphertext, Key, bb84_exchange, otp_decrypt, otp_encrypt


def test_otp_examples():
    assert otp_encrypt(Key("0000"), "0000").bits == "0000"
    assert otp_encrypt(Key("0110"), "1010").bits == "1100"
    assert otp_decrypt(Key("0110"), Ciphertext("1100")) == "1010"
    assert otp_decrypt(Key("0000"), Ciphertext("1011")) == "1011"


def test_otp_round_trip(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 40))
        bits = B.random_bits(n, rng)
        msg = B.random_bits(n, rng)
        assert otp_decrypt(Key(bits), otp_encrypt(Key(bits), msg)) == msg


def test_tampered_ciphertext_flips_only_that_bit(rng):
    key_bits, msg = B.random_bits(16, rng), B.random_bits(16, rng)
    ct = otp_encrypt(Key(key_bits), msg)
    tampered = Ciphertext(B.xor(ct.bits, B.mask_from_positions(16, [5])), ct.key_offset)
    assert B.diff_positions(otp_decrypt(Key(key_bits), tampered), msg) == [5]


def test_segments_are_consumed_in_order():
    alice = Key("10110011")
    first = otp_encrypt(alice, "0000")
    second = otp_encrypt(alice, "0000")
    assert (first.key_offset, first.bits) == (0, "1011")
    assert (second.key_offset, second.bits) == (4, "0011")
    assert alice.remaining == 0


def test_key_exhaustion():
    with pytest.raises(KeyExhaustedError):
        otp_encrypt(Key("101"), "0000")


def test_one_time_violation():
    alice, bob = Key("1011"), Key("1011")
    ct = otp_encrypt(alice, "0110")
    with pytest.raises(OneTimeViolationError):
        otp_encrypt(alice, "0110", offset=0)
    assert otp_decrypt(bob, ct) == "0110"
    with pytest.raises(OneTimeViolationError):
        otp_decrypt(bob, ct)


def test_ciphertext_is_uniform_under_random_key(rng):
    # chi-square over the 16 possible 4-bit ciphertexts of a fixed message
    counts = np.zeros(16)
    trials = 10_000
    for _ in range(trials):
        counts[int(otp_encrypt(Key(B.random_bits(4, rng)), "1010").bits, 2)] += 1
    expected = trials / 16
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    # 15 degrees of freedom: the 99.9th percentile is 37.70
    assert chi2 < 37.70


def test_bb84_honest():
    rep = bb84_exchange(10_000, eve_present=False, rng=np.random.default_rng(3))
    assert rep.qber == 0 and rep.mismatches == 0
    assert abs(rep.sifted_count / 10_000 - 0.5) <= 3 * math.sqrt(0.25 / 10_000)
    assert not rep.aborted
    assert rep.final_key.length == rep.sifted_count - rep.sample_count
    assert rep.final_key.bits == rep.bob_key.bits


def test_bb84_intercept_resend_raises_qber():
    rep = bb84_exchange(4_000, eve_present=True, qber_threshold=1.0, rng=np.random.default_rng(4))
    assert 0.15 < rep.qber < 0.35
    assert not rep.aborted
    # Bob's key now disagrees with Alice's in roughly a quarter of positions
    assert rep.final_key.bits != rep.bob_key.bits


def test_bb84_aborts_under_threshold():
    for seed in range(5):
        rep = bb84_exchange(2_000, eve_present=True, qber_threshold=0.11, rng=np.random.default_rng(seed))
        assert rep.aborted and rep.final_key.length == 0 and rep.bob_key.length == 0


def test_bb84_report_keeps_key_out():
    d = bb84_exchange(64, eve_present=False, rng=np.random.default_rng(0)).to_dict()
    assert "final_key" not in d and "bob_key" not in d
    assert d["final_key_length"] > 0


def test_bb84_argument_checks():
    with pytest.raises(InvalidArgumentError):
        bb84_exchange(15, False)
    with pytest.raises(InvalidArgumentError):
        bb84_exchange(100, False, sample_fraction=1.0)


def test_bb84_deterministic():
    a = bb84_exchange(500, True, qber_threshold=1, rng=np.random.default_rng(9))
    b = bb84_exchange(500, True, qber_threshold=1, rng=np.random.default_rng(9))
    assert a.to_dict() == b.to_dict() and a.final_key.bits == b.final_key.bits
