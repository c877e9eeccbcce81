"""Core comparison semantics, checkers, and serialization."""

import itertools

import pytest
from hypothesis import given, strategies as st

from orelearn.core import (
    BOT,
    Bot,
    Message,
    Ordering3,
    PublicParams,
    check_decryption_correctness,
    check_strong_correctness,
    check_weak_correctness,
    comp_ciph,
    comp_plain,
    compare_ints,
    decode_blob,
    encode_blob,
)
from orelearn.opf import OpfOre


def test_comp_plain_basic():
    assert comp_plain(Message(3, 8), Message(7, 8)) is Ordering3.LT
    assert comp_plain(Message(5, 8), Message(5, 8)) is Ordering3.EQ
    assert comp_plain(Message(255, 8), Message(0, 8)) is Ordering3.GT


def test_comp_plain_rejects_mismatched_bit_lengths():
    with pytest.raises(ValueError):
        comp_plain(Message(1, 8), Message(1, 9))


def test_message_domain_validation():
    with pytest.raises(ValueError):
        Message(256, 8)
    with pytest.raises(ValueError):
        Message(-1, 8)
    with pytest.raises(ValueError):
        Message(0, 0)


def test_comp_plain_total_order_exhaustive_ell6():
    # antisymmetry and transitivity on every pair/triple of the ell=6 domain
    domain = range(64)
    for a, b in itertools.product(domain, repeat=2):
        r = compare_ints(a, b)
        assert r.flipped() is compare_ints(b, a)
    lt = [[compare_ints(a, b) is Ordering3.LT for b in domain] for a in domain]
    for a, b, c in itertools.product(domain, repeat=3):
        if lt[a][b] and lt[b][c]:
            assert lt[a][c]


@given(st.integers(0, 2**32), st.integers(0, 2**32))
def test_compare_ints_matches_python_order(a, b):
    r = compare_ints(a, b)
    assert (r is Ordering3.LT) == (a < b)
    assert (r is Ordering3.GT) == (a > b)
    assert (r is Ordering3.EQ) == (a == b)


def test_bot_is_singleton_and_falsy():
    assert Bot() is BOT
    assert not BOT
    assert repr(BOT) == "BOT"


def test_comp_ciph_decrypt_then_compare(rng):
    scheme = OpfOre(ell=8)
    key = scheme.gen(rng)
    c2, c9 = scheme.enc(key.sk, 2), scheme.enc(key.sk, 9)
    assert comp_ciph(scheme, key.sk, c2, c9) is Ordering3.LT
    assert comp_ciph(scheme, key.sk, c9, c9) is Ordering3.EQ


def test_comp_ciph_bot_on_garbage(rng):
    # random 64-byte strings fail the authenticity check
    scheme = OpfOre(ell=8)
    key = scheme.gen(rng)
    c4 = scheme.enc(key.sk, 4)
    for _ in range(200):
        garbage = bytes(rng.bytes(64))
        assert comp_ciph(scheme, key.sk, c4, garbage) is BOT
        assert comp_ciph(scheme, key.sk, garbage, c4) is BOT


def test_comp_ciph_agrees_with_comp_plain_exhaustive_ell6(rng):
    scheme = OpfOre(ell=6)
    key = scheme.gen(rng)
    cts = [scheme.enc(key.sk, m) for m in range(64)]
    for a in range(64):
        for b in range(64):
            assert comp_ciph(scheme, key.sk, cts[a], cts[b]) is compare_ints(a, b)


def test_check_decryption_correctness_passes_full_domain(rng):
    scheme = OpfOre(ell=8)
    report = check_decryption_correctness(scheme, range(256), keys=1, rng=rng)
    assert report.passed and report.checked == 256


def test_check_decryption_correctness_many_keys(rng):
    scheme = OpfOre(ell=16)
    ms = rng.integers(0, 2**16, size=100)
    report = check_decryption_correctness(scheme, map(int, ms), keys=10, rng=rng)
    assert report.passed and report.checked == 1000


class _BrokenDecScheme(OpfOre):
    """Negative control: decryption always answers 0."""

    def dec(self, sk, ct):
        return 0


def test_check_decryption_correctness_detects_broken_scheme(rng):
    report = check_decryption_correctness(_BrokenDecScheme(ell=8), range(1, 17), 1, rng)
    assert not report.passed
    assert len(report.failures) == 16


class _InvertedCompScheme(OpfOre):
    """Negative control: comparison answers are flipped."""

    def comp(self, params, c0, c1):
        return super().comp(params, c0, c1).flipped()


def test_check_weak_correctness_detects_inverted_comparator(rng):
    scheme = _InvertedCompScheme(ell=6)
    key = scheme.gen(rng)
    pairs = [(a, b) for a in range(16) for b in range(16)]
    report = check_weak_correctness(scheme, pairs, key)
    strict = sum(1 for a, b in pairs if a != b)
    assert len(report.failures) == strict  # every strict pair flips, EQ survives


def test_check_weak_correctness_equal_pairs_all_eq(rng):
    scheme = OpfOre(ell=10)
    key = scheme.gen(rng)
    report = check_weak_correctness(scheme, [(m, m) for m in range(0, 1024, 11)], key)
    assert report.passed


def test_strong_correctness_checker_counts_by_class(rng):
    scheme = OpfOre(ell=8)
    key = scheme.gen(rng)
    report = check_strong_correctness(scheme, key, trials=300, rng=rng)
    assert not report.passed
    assert sum(report.counts_by_class.values()) == len(report.failures)
    # honest pairs never disagree for a weakly correct scheme
    assert report.counts_by_class.get("valid+valid", 0) == 0


def test_determinism_fixed_coins():
    scheme = OpfOre(ell=16)
    coins = bytes(range(32))
    k1, k2 = scheme.gen_from_coins(coins), scheme.gen_from_coins(coins)
    assert k1.params.data == k2.params.data
    for m in (0, 1, 40000, 65535):
        assert scheme.enc(k1.sk, m) == scheme.enc(k2.sk, m)


def test_params_equality_and_hash():
    a = PublicParams(b"abc", 8)
    b = PublicParams(b"abc", 8)
    c = PublicParams(b"abd", 8)
    assert a == b and hash(a) == hash(b)
    assert a != c and a != PublicParams(b"abc", 9)


def test_blob_roundtrip_and_strictness():
    blob = encode_blob(b"", b"xy", b"\x00" * 5)
    assert decode_blob(blob, 3) == [b"", b"xy", b"\x00" * 5]
    assert decode_blob(blob + b"!", 3) is None  # trailing bytes rejected
    assert decode_blob(blob[:-1], 3) is None  # short buffer rejected
    assert decode_blob(b"", 1) is None


def test_key_serialization_roundtrip(rng):
    from orelearn.core import deserialize_key, serialize_key

    scheme = OpfOre(ell=12)
    key = scheme.gen(rng)
    restored = deserialize_key(scheme, serialize_key(key))
    assert restored.params == key.params
    assert scheme.enc(restored.sk, 99) == scheme.enc(key.sk, 99)
    with pytest.raises(ValueError):
        deserialize_key(scheme, b"junk")
    with pytest.raises(ValueError):
        deserialize_key(OpfOre(ell=10), serialize_key(key))  # wrong scheme
