"""Statistical-query oracle and the query-light learner for encrypted thresholds.

A statistical query is a binary predicate over (example, label) together
with a tolerance tau; the oracle answers with any value within tau of the
predicate's true expectation under the labeled example distribution.  The
oracle here computes true expectations exactly over enumerable (finite
support) distributions and either returns them as-is (exact mode) or
perturbs them by uniform noise bounded by tau (jitter mode).  Tolerances
below an inverse-polynomial floor are rejected.

The learner needs only 1 + |params bits| + ell queries:

1. one query on the label bit decides whether the all-zeroes hypothesis
   is already good;
2. one query per bit of the public parameters recovers them, since all
   positive mass lives on the target's parameter string;
3. a secret key matching the recovered parameters is obtained from a key
   recovery back-end (a registry oracle standing in for brute-force
   search, or genuine exhaustive search over a tiny coin space), any such
   key being functionally equivalent to the generating one for a strongly
   correct scheme;
4. at most ell threshold queries binary-search the threshold, halting as
   soon as the hypothesis's positive weight matches the target's within
   alpha/2, or when the candidate interval collapses to a single point.

The functional-equivalence claim of step 3 is executable via
``check_key_equivalence``, which sweeps all encryptions of the full
domain under both keys plus a fuzz corpus.
"""

from __future__ import annotations

import math

import numpy as np

from .core import BOT, KeyMaterial, OreScheme, PublicParams
from .encthresh import (
    AllZeroesHypothesis,
    DecryptThresholdHypothesis,
    EncThreshConcept,
)

__all__ = [
    "StatOracle",
    "tolerance_floor",
    "OracleKeyRecovery",
    "TinyKeyspaceRecovery",
    "KeyRecoveryError",
    "sq_learn",
    "check_key_equivalence",
    "bit_of",
]


def tolerance_floor(k_bits: int, alpha: float) -> float:
    """Minimum admissible tolerance: 1 / (64 * k * ceil(1/alpha))."""
    return 1.0 / (64.0 * k_bits * math.ceil(1.0 / alpha))


class StatOracle:
    """Answers statistical queries about a labeled example distribution.

    The distribution must expose ``support() -> [(Example, weight)]``;
    answers are exact expectations, optionally jittered by noise uniform
    in [-tau, tau] (clipped to [0, 1], which preserves the tau bound).
    The query counter increments once per query.
    """

    def __init__(
        self,
        concept: EncThreshConcept,
        distribution,
        alpha: float,
        mode: str = "exact",
        rng: "np.random.Generator | None" = None,
        k_bits: "int | None" = None,
    ):
        if mode not in ("exact", "jitter"):
            raise ValueError(f"unknown oracle mode {mode!r}")
        if mode == "jitter" and rng is None:
            raise ValueError("jitter mode needs an rng")
        self.concept = concept
        self.mode = mode
        self.rng = rng
        self._support = [
            (x, w, concept.evaluate(x)) for x, w in distribution.support()
        ]
        if k_bits is None:
            # instance description length: params bytes plus a ciphertext
            max_ct = max(len(x.ct) for x, _, _ in self._support)
            k_bits = 8 * (concept.scheme.params_len() + max_ct)
        self.k_bits = k_bits
        self.tau_floor = tolerance_floor(k_bits, alpha)
        self.query_count = 0

    def true_expectation(self, psi) -> float:
        return sum(w for x, w, label in self._support if psi(x, label))

    def query(self, psi, tau: float) -> float:
        if tau < self.tau_floor:
            raise ValueError(
                f"tolerance {tau} below the floor {self.tau_floor}"
            )
        self.query_count += 1
        value = self.true_expectation(psi)
        if self.mode == "jitter":
            value = min(1.0, max(0.0, value + float(self.rng.uniform(-tau, tau))))
        return value


# ---------------------------------------------------------------------------
# Key recovery back-ends
# ---------------------------------------------------------------------------


class KeyRecoveryError(LookupError):
    pass


class OracleKeyRecovery:
    """Registry of generated keys, standing in for brute-force search.

    Any key whose parameters match is admissible: for a strongly correct
    scheme all keys sharing a parameter string decrypt identically.
    """

    def __init__(self):
        self._by_params: dict[bytes, object] = {}

    def register(self, key: KeyMaterial):
        self._by_params[key.params.data] = key.sk

    def recover(self, params: PublicParams):
        sk = self._by_params.get(params.data)
        if sk is None:
            raise KeyRecoveryError("no registered key matches the parameters")
        return sk


class TinyKeyspaceRecovery:
    """Genuine exhaustive search over a small coin space.

    Only usable when the scheme draws its generation coins from at most
    16 bits; every coin string is replayed through gen until the public
    parameters match.
    """

    def __init__(self, scheme: OreScheme):
        if scheme.coin_len > 2:
            raise ValueError(
                f"coin space 2**{8 * scheme.coin_len} too large for exhaustive search"
            )
        self.scheme = scheme
        self.searched = 0

    def recover(self, params: PublicParams):
        n_coins = 1 << (8 * self.scheme.coin_len)
        for c in range(n_coins):
            coins = c.to_bytes(self.scheme.coin_len, "big")
            key = self.scheme.gen_from_coins(coins)
            self.searched += 1
            if key.params.data == params.data:
                return key.sk
        raise KeyRecoveryError("exhausted the coin space without a match")


# ---------------------------------------------------------------------------
# The learner
# ---------------------------------------------------------------------------


def bit_of(data: bytes, i: int) -> int:
    """Bit i of a byte string, most significant bit of each byte first."""
    return (data[i >> 3] >> (7 - (i & 7))) & 1


def sq_learn(
    oracle: StatOracle,
    alpha: float,
    key_recovery,
    scheme: OreScheme,
):
    """Recover parameters bit-by-bit, a matching key, and the threshold.

    Returns the all-zeroes hypothesis when the first query reports label
    weight below alpha/2; otherwise a decrypt-and-threshold hypothesis.
    Total queries are at most 1 + 8*params_len + ell.
    """
    v = oracle.query(lambda x, b: b == 1, alpha / 4.0)
    if v < alpha / 2.0:
        return AllZeroesHypothesis()

    n_bits = 8 * scheme.params_len()
    bits = []
    for i in range(n_bits):
        answer = oracle.query(
            lambda x, b, i=i: b == 1 and bit_of(x.params.data, i) == 1,
            alpha / 16.0,
        )
        # positive mass all lies on the target parameters, so the answer is
        # either ~0 or at least ~alpha/4 minus the tolerance
        bits.append(1 if answer > alpha / 8.0 else 0)
    data = bytearray(scheme.params_len())
    for i, bit in enumerate(bits):
        if bit:
            data[i >> 3] |= 1 << (7 - (i & 7))
    params = PublicParams(data=bytes(data), ell=scheme.ell)

    sk = key_recovery.recover(params)

    # positive weight is at least alpha/4 > 0, so the threshold is at least 1
    lo, hi = 1, scheme.domain_size
    params_data = params.data
    while lo < hi:
        t_mid = (lo + hi) // 2

        def phi(x, b, t=t_mid):
            if x.params.data != params_data:
                return False
            m = scheme.dec(sk, x.ct)
            return m is not BOT and m < t

        v1 = oracle.query(phi, alpha / 4.0)
        if abs(v1 - v) <= alpha / 2.0:
            return DecryptThresholdHypothesis(scheme, params, sk, t_mid)
        if v1 < v - alpha / 2.0:
            lo = t_mid + 1  # hypothesis too light: true threshold is higher
        else:
            hi = t_mid - 1
    return DecryptThresholdHypothesis(scheme, params, sk, lo)


# ---------------------------------------------------------------------------
# Functional equivalence of recovered keys
# ---------------------------------------------------------------------------


def check_key_equivalence(
    scheme: OreScheme,
    sk1,
    sk2,
    rng: np.random.Generator,
    fuzz_trials: int = 2000,
):
    """Sweep for ciphertexts on which the two keys decrypt differently.

    Covers every encryption of the full domain under both keys plus a
    fuzzed corpus (mutants and random bytes).  Exhaustive over the domain,
    so restricted to ell <= 12.
    """
    from .core import CheckReport

    if scheme.ell > 12:
        raise ValueError("domain sweep restricted to ell <= 12")
    report = CheckReport()

    def compare_on(ct: bytes, origin: str):
        d1 = scheme.dec(sk1, ct)
        d2 = scheme.dec(sk2, ct)
        report.checked += 1
        if d1 is not d2 and d1 != d2:
            report.add_failure(
                {"origin": origin, "dec1": str(d1), "dec2": str(d2)},
                mutation_class=origin,
            )

    for m in range(scheme.domain_size):
        compare_on(scheme.enc(sk1, m), "enc-sk1")
        compare_on(scheme.enc(sk2, m), "enc-sk2")
    for _ in range(fuzz_trials):
        m = int(rng.integers(0, scheme.domain_size))
        ct = bytearray(scheme.enc(sk1, m))
        kind = int(rng.integers(0, 3))
        if kind == 0:
            pos = int(rng.integers(0, len(ct) * 8))
            ct[pos // 8] ^= 1 << (pos % 8)
            compare_on(bytes(ct), "bitflip")
        elif kind == 1:
            compare_on(bytes(ct[: int(rng.integers(0, len(ct)))]), "truncate")
        else:
            compare_on(bytes(rng.bytes(len(ct))), "random")
    return report
