"""Example reidentification for encrypted-threshold concepts.

The generator fixes the middle threshold t = N/2, draws n uniform
messages, encrypts them under a fresh key, and hands the learner the
labeled sample.  Sorting the drawn messages splits the plaintext space
into buckets B_i = [m_i, m_{i+1}) between consecutive sample messages
(with sentinels m_0 = 0 and m_{n+1} = N-1).  The tracer estimates, for
each bucket, the probability that the learned hypothesis accepts a fresh
encryption from that bucket, and accuses the sample index whose message
separates the first adjacent bucket pair whose estimates drop by at least
gamma/n.  Any hypothesis with nontrivial accuracy must induce such a drop
somewhere; a hypothesis learned without example i induces one at i only
with the probability that the scheme's security is broken.

Estimates use K = ceil((8 n^2 / gamma^2) * ln(9 n / xi)) samples per
bucket, which makes all n+1 of them simultaneously gamma/(4n)-accurate
with probability at least 1 - xi/4 (Chernoff plus a union bound).  A
reduced-K mode caps the per-bucket sample count for fast runs; reports
carry a flag marking such runs as non-conforming to that analysis.

The differential-privacy consequence is quantified by ``dp_bound``: a
tracing scheme with completeness failure beta and soundness/completeness
slack xi rules out any efficient (eps, delta)-differentially private
(alpha, beta)-PAC learner with delta below (1 - beta - xi)/n - e^eps * xi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .encthresh import (
    AllZeroesHypothesis,
    ComparatorHypothesis,
    DecryptThresholdHypothesis,
    EncThreshConcept,
    Example,
    UniformValidDistribution,
    empirical_error,
)
from .core import OreScheme

__all__ = [
    "ReidentState",
    "TraceVerdict",
    "gen_ex",
    "sample_without",
    "concentration_sample_count",
    "estimate_bucket_probs",
    "trace_ex",
    "accuse_from_estimates",
    "completeness_experiment",
    "soundness_experiment",
    "dp_bound",
    "CompletenessReport",
    "SoundnessReport",
]


@dataclass
class ReidentState:
    """Shared state between the generator and the tracer for one run."""

    concept: EncThreshConcept
    raw_messages: np.ndarray  # m'_1..m'_n in draw order
    sorted_messages: np.ndarray  # m_1 <= ... <= m_n
    sorted_to_raw: np.ndarray  # raw (0-based) index of each sorted position
    junk_example: Example  # encryption of m_0 = 0, labeled 1
    well_spaced: bool

    @property
    def n(self) -> int:
        return len(self.raw_messages)

    @property
    def bucket_bounds(self) -> np.ndarray:
        """n+2 boundaries: 0, m_1, ..., m_n, N-1; bucket i is [b_i, b_{i+1})."""
        big_n = self.concept.scheme.domain_size
        return np.concatenate(([0], self.sorted_messages, [big_n - 1]))


@dataclass
class TraceVerdict:
    accused: "int | None"  # raw sample index in [1, n], or None for no accusation
    accused_sorted: "int | None"  # sorted position of the separating message
    estimates: np.ndarray  # p_hat_0 .. p_hat_n
    k_used: int
    k_conforming: bool  # False when a reduced K was used
    degraded: bool = False  # True when empty buckets inherited estimates


def gen_ex(
    scheme: OreScheme, n: int, rng: np.random.Generator
) -> tuple[ReidentState, list[tuple[Example, int]]]:
    """Draw the concept (t = N/2), the sample, and the junk example.

    Warns when n^2 approaches the domain size, since the well-spacing of
    uniform draws is then at risk; the returned state records whether all
    gaps (sentinels included) exceed one.
    """
    big_n = scheme.domain_size
    if n < 1:
        raise ValueError("need n >= 1")
    if n * n >= big_n // 100:
        import warnings

        warnings.warn(
            f"n^2 = {n * n} is large relative to the domain {big_n}; "
            "well-spacing of the sample is at risk",
            stacklevel=2,
        )
    key = scheme.gen(rng)
    concept = EncThreshConcept(scheme=scheme, t=big_n // 2, key=key)
    raw = rng.integers(0, big_n, size=n)
    order = np.argsort(raw, kind="stable")
    s = raw[order]
    bounds = np.concatenate(([0], s, [big_n - 1]))
    well_spaced = bool(np.all(np.diff(bounds) > 1))
    junk = concept.encrypt_example(0)
    state = ReidentState(
        concept=concept,
        raw_messages=raw,
        sorted_messages=s,
        sorted_to_raw=order,
        junk_example=junk,
        well_spaced=well_spaced,
    )
    sample = [
        (concept.encrypt_example(int(m)), 1 if int(m) < concept.t else 0)
        for m in raw
    ]
    return state, sample


def sample_without(
    state: ReidentState, sample: list[tuple[Example, int]], i: int
) -> list[tuple[Example, int]]:
    """The sample with position i (1-based) replaced by the junk example.

    The junk slot is labeled 1: it encrypts 0, which every middle-threshold
    concept accepts.
    """
    if not (1 <= i <= state.n):
        raise ValueError(f"index {i} outside [1, {state.n}]")
    out = list(sample)
    out[i - 1] = (state.junk_example, 1)
    return out


def concentration_sample_count(n: int, gamma: float, xi: float) -> int:
    """K = ceil((8 n^2 / gamma^2) * ln(9 n / xi))."""
    if n < 1 or not (0 < gamma) or not (0 < xi):
        raise ValueError("need n >= 1 and positive gamma, xi")
    return math.ceil((8.0 * n * n / (gamma * gamma)) * math.log(9.0 * n / xi))


def estimate_bucket_probs(
    state: ReidentState,
    hypothesis,
    gamma: float,
    xi: float,
    rng: np.random.Generator,
    k_cap: "int | None" = None,
) -> tuple[np.ndarray, int, bool, bool]:
    """Per-bucket acceptance estimates of the hypothesis on fresh encryptions.

    Returns (estimates, K used, conforming, degraded).  Empty buckets (only
    possible when the draw was not well-spaced) inherit the estimate of the
    nearest nonempty bucket below and set the degraded flag, mirroring the
    bookkeeping of discarding non-well-spaced runs.
    """
    n = state.n
    k_exact = concentration_sample_count(n, gamma, xi)
    k = min(k_exact, k_cap) if k_cap is not None else k_exact
    conforming = k >= k_exact
    bounds = state.bucket_bounds
    concept = state.concept
    scheme, sk, params = concept.scheme, concept.key.sk, concept.key.params
    evaluate = hypothesis.evaluate
    enc = scheme.enc
    p_hat = np.zeros(n + 1)
    degraded = False
    for i in range(n + 1):
        lo, hi = int(bounds[i]), int(bounds[i + 1])
        if hi <= lo:
            p_hat[i] = p_hat[i - 1] if i > 0 else 0.0
            degraded = True
            continue
        draws = rng.integers(lo, hi, size=k)
        acc = 0
        for m in draws:
            acc += evaluate(Example(params, enc(sk, int(m))))
        p_hat[i] = acc / k
    return p_hat, k, conforming, degraded


def accuse_from_estimates(estimates: np.ndarray, gamma: float, n: int) -> "int | None":
    """Least sorted position i in [1, n] with p_hat_{i-1} - p_hat_i >= gamma/n."""
    threshold = gamma / n
    for i in range(1, n + 1):
        if estimates[i - 1] - estimates[i] >= threshold:
            return i
    return None


def trace_ex(
    state: ReidentState,
    hypothesis,
    gamma: float,
    xi: float,
    rng: np.random.Generator,
    k_cap: "int | None" = None,
) -> TraceVerdict:
    """Estimate bucket probabilities and accuse the first separating index."""
    estimates, k, conforming, degraded = estimate_bucket_probs(
        state, hypothesis, gamma, xi, rng, k_cap=k_cap
    )
    sorted_i = accuse_from_estimates(estimates, gamma, state.n)
    raw_i = None
    if sorted_i is not None:
        raw_i = int(state.sorted_to_raw[sorted_i - 1]) + 1
    return TraceVerdict(
        accused=raw_i,
        accused_sorted=sorted_i,
        estimates=estimates,
        k_used=k,
        k_conforming=conforming,
        degraded=degraded,
    )


# ---------------------------------------------------------------------------
# Experiments
# ---------------------------------------------------------------------------


def _hypothesis_error(state: ReidentState, hypothesis, rng) -> float:
    """Error under the run's own distribution (uniform valid encryptions)."""
    dist = UniformValidDistribution(state.concept)
    known = (AllZeroesHypothesis, ComparatorHypothesis, DecryptThresholdHypothesis)
    if isinstance(hypothesis, known):
        try:
            return dist.exact_error(hypothesis, state.concept)
        except TypeError:
            pass
    return empirical_error(hypothesis, state.concept, dist, 2000, rng)


@dataclass
class CompletenessReport:
    trials: int
    alpha: float
    rows: list = field(default_factory=list)
    k_conforming: bool = True

    @property
    def p_good(self) -> float:
        return sum(r["good"] for r in self.rows) / len(self.rows)

    @property
    def p_good_and_untraced(self) -> float:
        return sum(r["good"] and r["accused"] is None for r in self.rows) / len(
            self.rows
        )

    @property
    def p_accused(self) -> float:
        return sum(r["accused"] is not None for r in self.rows) / len(self.rows)

    def p_accused_well_spaced(self) -> float:
        ws = [r for r in self.rows if r["well_spaced"]]
        if not ws:
            return float("nan")
        return sum(r["accused"] is not None for r in ws) / len(ws)


def completeness_experiment(
    scheme: OreScheme,
    n: int,
    learner,
    alpha: float,
    gamma: float,
    xi: float,
    trials: int,
    rng: np.random.Generator,
    k_cap: "int | None" = None,
) -> CompletenessReport:
    """Can a good hypothesis be traced to some example?

    Per trial: generate, learn on the full sample, measure error, trace.
    Reports the rates of (error <= alpha), (good and untraced), and
    (accused), both overall and restricted to well-spaced draws.
    """
    report = CompletenessReport(trials=trials, alpha=alpha)
    for _ in range(trials):
        state, sample = gen_ex(scheme, n, rng)
        hypothesis = learner(sample)
        err = _hypothesis_error(state, hypothesis, rng)
        verdict = trace_ex(state, hypothesis, gamma, xi, rng, k_cap=k_cap)
        report.k_conforming &= verdict.k_conforming
        report.rows.append(
            {
                "well_spaced": state.well_spaced,
                "error": err,
                "good": err <= alpha,
                "accused": verdict.accused,
                "degraded": verdict.degraded,
            }
        )
    return report


@dataclass
class SoundnessReport:
    trials: int
    drop_index: int
    rows: list = field(default_factory=list)
    k_conforming: bool = True

    @property
    def p_accuse_dropped(self) -> float:
        return sum(r["accused"] == self.drop_index for r in self.rows) / len(self.rows)

    def p_accuse_dropped_well_spaced(self) -> float:
        ws = [r for r in self.rows if r["well_spaced"]]
        if not ws:
            return float("nan")
        return sum(r["accused"] == self.drop_index for r in ws) / len(ws)


def soundness_experiment(
    scheme: OreScheme,
    n: int,
    learner,
    drop_index: int,
    gamma: float,
    xi: float,
    trials: int,
    rng: np.random.Generator,
    k_cap: "int | None" = None,
) -> SoundnessReport:
    """How often is the dropped example accused when the learner never saw it?"""
    report = SoundnessReport(trials=trials, drop_index=drop_index)
    for _ in range(trials):
        state, sample = gen_ex(scheme, n, rng)
        hypothesis = learner(sample_without(state, sample, drop_index))
        verdict = trace_ex(state, hypothesis, gamma, xi, rng, k_cap=k_cap)
        report.k_conforming &= verdict.k_conforming
        report.rows.append(
            {
                "well_spaced": state.well_spaced,
                "accused": verdict.accused,
                "degraded": verdict.degraded,
            }
        )
    return report


def dp_bound(beta: float, xi: float, n: int, eps: float) -> float:
    """No efficient (eps, delta)-DP (alpha, beta)-PAC learner exists for
    delta below this value; nonpositive means no contradiction at these
    parameters."""
    if n < 1:
        raise ValueError("need n >= 1")
    if not (0 <= beta <= 1 and 0 <= xi <= 1 and eps >= 0):
        raise ValueError("parameters out of range")
    return (1.0 - beta - xi) / n - math.exp(eps) * xi
