"""Experiment orchestration: strict configs, seeded trials, JSON/CSV reports.

Every experiment is described by an ``ExperimentConfig`` whose canonical
JSON serialization (sorted keys) is hashed to identify the run.  Unknown
config keys are rejected so experiment definitions cannot drift silently.
Each trial draws its own random stream from a keyed hash of (master seed,
trial index), making whole runs reproducible bit-for-bit: re-running with
the same config bytes yields identical per-trial rows, and the CSV bodies
exclude wall-clock fields for exactly that reason.

Exit-code contract used by the CLI: 0 on success, 2 on config errors, 3
when an experiment's gate thresholds fail (for CI gating).
"""

from __future__ import annotations

import dataclasses
import hashlib
import io
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import check_strong_correctness, check_weak_correctness
from .encthresh import (
    DISTRIBUTION_FAMILIES,
    PointMassDistribution,
    exact_error,
    labeled_sample,
    make_distribution,
    pac_learn,
    random_concept,
    required_sample_size,
)
from .games import (
    ChallengePair,
    EscrowKeyLeakAdversary,
    PayloadBitAdversary,
    RandomGuessAdversary,
    adversary_from_learner,
    hybrid_schedule,
    run_static_game,
    synthetic_reduction_win_rate,
    adversary_success_prob,
)
from .opf import OpfOre, forge_spliced_ciphertext
from .reident import (
    completeness_experiment,
    dp_bound,
    soundness_experiment,
)
from .sq import OracleKeyRecovery, StatOracle, TinyKeyspaceRecovery, sq_learn
from .strengthen import EscrowCertifier, SignatureCertifier, strengthen
from .validsig import (
    Ed25519Scheme,
    SigExampleDistribution,
    representation_error,
    run_weak_forgery_game,
    validsig_gen_ex,
    validsig_learn,
    validsig_trace_ex,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentReport",
    "derive_trial_rng",
    "run",
    "EXPERIMENTS",
    "CSV_SCHEMA_VERSION",
]

EXPERIMENTS = ("correctness", "pac", "trace", "games", "hybrid", "sq", "validsig")

CSV_SCHEMA_VERSION = "orelearn.csv.v1"


class ConfigError(ValueError):
    """Invalid experiment configuration; carries the offending field path."""

    def __init__(self, field_path: str, message: str):
        self.field_path = field_path
        super().__init__(f"{field_path}: {message}")


_DEFAULTS = {
    "experiment": None,  # required
    "lam": 128,
    "ell": 16,
    "n": 50,
    "alpha": 0.05,
    "beta": 0.05,
    "gamma": 0.45,
    "xi": 0.01,
    "eps": 0.1,
    "trials": 100,
    "seed": 0,
    "scheme": "strengthened",
    "certifier": "escrow",
    "dist": "uniform",
    "mode": None,
    "drop_index": None,
    "k_cap": None,
    "left": None,
    "right": None,
    "keyspace": "oracle",
    "transcripts": False,
}

_MODES = {
    "correctness": (None,),
    "pac": (None,),
    "trace": ("completeness", "soundness"),
    "games": ("random", "payload", "leak", "reduction", "synthetic"),
    "hybrid": (None,),
    "sq": (None, "exact", "jitter"),  # statistical-query oracle answer mode
    "validsig": ("learn", "trace", "forge"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    lam: int = 128
    ell: int = 16
    n: int = 50
    alpha: float = 0.05
    beta: float = 0.05
    gamma: float = 0.45
    xi: float = 0.01
    eps: float = 0.1
    trials: int = 100
    seed: int = 0
    scheme: str = "strengthened"
    certifier: str = "escrow"
    dist: str = "uniform"
    mode: "str | None" = None
    drop_index: "int | None" = None
    k_cap: "int | None" = None
    left: "tuple | None" = None
    right: "tuple | None" = None
    keyspace: str = "oracle"
    transcripts: bool = False

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        unknown = set(raw) - set(_DEFAULTS)
        if unknown:
            raise ConfigError(sorted(unknown)[0], "unknown config key")
        if "experiment" not in raw:
            raise ConfigError("experiment", "missing required key")
        merged = dict(_DEFAULTS)
        merged.update(raw)
        cfg = cls(**{k: (tuple(v) if k in ("left", "right") and v is not None else v) for k, v in merged.items()})
        cfg.validate()
        return cfg

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {EXPERIMENTS}")
        if not (1 <= self.ell <= 64):
            raise ConfigError("ell", "must be in [1, 64]")
        if self.trials < 0:
            raise ConfigError("trials", "must be >= 0")
        if self.n < 1:
            raise ConfigError("n", "must be >= 1")
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (0 < v < 1):
                raise ConfigError(name, "must lie in (0, 1)")
        if not (0 < self.gamma <= 0.5):
            raise ConfigError("gamma", "must lie in (0, 0.5]")
        if not (0 < self.xi < 1):
            raise ConfigError("xi", "must lie in (0, 1)")
        if self.scheme not in ("opf", "strengthened"):
            raise ConfigError("scheme", "must be 'opf' or 'strengthened'")
        if self.certifier not in ("escrow", "signature"):
            raise ConfigError("certifier", "must be 'escrow' or 'signature'")
        if self.dist not in DISTRIBUTION_FAMILIES + ("all",):
            raise ConfigError("dist", f"must be one of {DISTRIBUTION_FAMILIES + ('all',)}")
        if self.keyspace not in ("oracle", "tiny"):
            raise ConfigError("keyspace", "must be 'oracle' or 'tiny'")
        allowed_modes = _MODES[self.experiment]
        if self.mode not in allowed_modes:
            raise ConfigError("mode", f"must be one of {allowed_modes}")
        if self.experiment == "trace" and self.mode == "soundness":
            if self.drop_index is None or not (1 <= self.drop_index <= self.n):
                raise ConfigError("drop_index", "must lie in [1, n] for soundness mode")
        if self.experiment == "hybrid":
            if not self.left or not self.right:
                raise ConfigError("left", "hybrid experiment needs left and right vectors")

    def canonical_json(self) -> str:
        d = dataclasses.asdict(self)
        d["left"] = list(d["left"]) if d["left"] is not None else None
        d["right"] = list(d["right"]) if d["right"] is not None else None
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()[:16]


def derive_trial_rng(
    master_seed: int, trial_index: int, label: bytes = b""
) -> np.random.Generator:
    """Independent per-trial stream: keyed hash of (seed || index || label)."""
    digest = hashlib.blake2b(
        int(master_seed).to_bytes(8, "big", signed=False)
        + int(trial_index).to_bytes(8, "big", signed=False)
        + label,
        key=b"orelearn-trial-rng",
        digest_size=16,
    ).digest()
    return np.random.default_rng(int.from_bytes(digest, "big"))


def build_scheme(config: ExperimentConfig):
    base = OpfOre(lam=config.lam, ell=config.ell)
    if config.scheme == "opf":
        return base
    certifier = EscrowCertifier() if config.certifier == "escrow" else SignatureCertifier()
    return strengthen(base, certifier)


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    columns: list
    rows: list
    aggregates: dict
    passed: "bool | None"
    wall_clock: float
    extra: dict = field(default_factory=dict)  # JSON-only payloads (transcripts)
    schema = CSV_SCHEMA_VERSION

    def to_json(self) -> str:
        return json.dumps(
            {
                "schema": self.schema,
                "library_version": __version__,
                "config": json.loads(self.config.canonical_json()),
                "config_hash": self.config.config_hash(),
                "columns": self.columns,
                "rows": self.rows,
                "aggregates": self.aggregates,
                "passed": self.passed,
                "wall_clock_s": round(self.wall_clock, 3),
                **self.extra,
            },
            indent=2,
            sort_keys=True,
        )

    def csv_trials(self) -> str:
        """Per-trial CSV body; excludes wall-clock so re-runs are identical."""
        buf = io.StringIO()
        buf.write(",".join([self.schema, "config=" + self.config.config_hash()]) + "\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.rows:
            buf.write(",".join(_csv_cell(row.get(c)) for c in self.columns) + "\n")
        return buf.getvalue()

    def csv_summary(self) -> str:
        buf = io.StringIO()
        keys = sorted(self.aggregates)
        buf.write(",".join([self.schema, "config=" + self.config.config_hash()]) + "\n")
        buf.write(",".join(keys) + "\n")
        buf.write(",".join(_csv_cell(self.aggregates[k]) for k in keys) + "\n")
        return buf.getvalue()

    def write(self, out_dir, formats=("json", "csv")):
        import pathlib

        out = pathlib.Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = f"{self.config.experiment}_{self.config.config_hash()}"
        written = []
        if "json" in formats:
            p = out / f"{stem}.json"
            p.write_text(self.to_json())
            written.append(p)
        if "csv" in formats:
            p = out / f"{stem}_trials.csv"
            p.write_text(self.csv_trials())
            written.append(p)
            p = out / f"{stem}_summary.csv"
            p.write_text(self.csv_summary())
            written.append(p)
        return written


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# Experiment bodies
# ---------------------------------------------------------------------------


def run(config: ExperimentConfig) -> ExperimentReport:
    start = time.perf_counter()
    runner = _RUNNERS[config.experiment]
    result = runner(config)
    columns, rows, aggregates, passed = result[:4]
    extra = result[4] if len(result) > 4 else {}
    if config.trials == 0 and config.experiment not in ("hybrid",):
        passed = None
    return ExperimentReport(
        config=config,
        columns=columns,
        rows=rows,
        aggregates=aggregates,
        passed=passed,
        wall_clock=time.perf_counter() - start,
        extra=extra,
    )


def _run_correctness(config: ExperimentConfig):
    scheme = build_scheme(config)
    rng = derive_trial_rng(config.seed, 0)
    key = scheme.gen(rng)
    rows = []
    columns = ["check", "class", "checked", "failures"]

    pair_budget = min(config.trials, 4096)
    ms = rng.integers(0, scheme.domain_size, size=(pair_budget, 2))
    weak = check_weak_correctness(scheme, [tuple(map(int, p)) for p in ms], key)
    rows.append({"check": "weak", "class": "honest", "checked": weak.checked, "failures": len(weak.failures)})

    extra = []
    if isinstance(scheme, OpfOre):
        lo = scheme.domain_size // 8
        hi = scheme.domain_size - 1 - lo
        witness = forge_spliced_ciphertext(scheme, key.sk, tag_of=hi, payload_of=lo)
        extra = [(witness, scheme.enc(key.sk, (lo + hi) // 2))]
    strong = check_strong_correctness(
        scheme, key, config.trials, derive_trial_rng(config.seed, 1), extra_pairs=extra
    )
    for cls in sorted(set(strong.counts_by_class) | {"all"}):
        failures = (
            len(strong.failures) if cls == "all" else strong.counts_by_class.get(cls, 0)
        )
        rows.append(
            {"check": "strong", "class": cls, "checked": strong.checked, "failures": failures}
        )
    aggregates = {
        "weak_failures": len(weak.failures),
        "strong_failures": len(strong.failures),
        "strong_checked": strong.checked,
    }
    passed = weak.passed and strong.passed
    return columns, rows, aggregates, passed


def _run_pac(config: ExperimentConfig):
    scheme = build_scheme(config)
    n = required_sample_size(config.alpha, config.beta)
    families = (
        DISTRIBUTION_FAMILIES if config.dist == "all" else (config.dist,)
    )
    columns = ["family", "trial", "n", "error", "good", "one_sided_ok", "hypothesis"]
    rows = []
    rates = {}
    one_sided_all = True
    for family in families:
        good = 0
        for trial in range(config.trials):
            rng = derive_trial_rng(config.seed, trial, label=family.encode())
            concept = random_concept(scheme, rng)
            dist = make_distribution(family, concept, rng)
            sample = labeled_sample(concept, dist, n, rng)
            hypothesis = pac_learn(scheme, sample)
            err = exact_error(hypothesis, concept, dist)
            probes = [x for x, _ in sample] + [dist.sample(rng) for _ in range(50)]
            one_sided = all(
                hypothesis.evaluate(x) <= concept.evaluate(x) for x in probes
            )
            one_sided_all &= one_sided
            good += err <= config.alpha
            rows.append(
                {
                    "family": family,
                    "trial": trial,
                    "n": n,
                    "error": err,
                    "good": err <= config.alpha,
                    "one_sided_ok": one_sided,
                    "hypothesis": hypothesis.kind,
                }
            )
        rates[family] = good / config.trials if config.trials else float("nan")
    aggregates = {f"rate_{f}": r for f, r in rates.items()}
    aggregates["one_sided_all"] = one_sided_all
    passed = one_sided_all and all(
        r >= 0.90 for r in rates.values() if not np.isnan(r)
    )
    return columns, rows, aggregates, passed if config.trials else None


def _run_trace(config: ExperimentConfig):
    scheme = build_scheme(config)
    learner = lambda sample: pac_learn(scheme, sample)
    rng = derive_trial_rng(config.seed, 0)
    # pass alpha = 1/2 - gamma to match the weak-learning tracing regime;
    # the defaults (alpha=0.05, gamma=0.45) already align
    alpha = config.alpha
    columns = ["trial", "well_spaced", "error", "accused", "good_and_untraced"]
    rows = []
    if config.mode == "completeness":
        report = completeness_experiment(
            scheme,
            config.n,
            learner,
            alpha,
            config.gamma,
            config.xi,
            config.trials,
            rng,
            k_cap=config.k_cap,
        )
        for t, r in enumerate(report.rows):
            rows.append(
                {
                    "trial": t,
                    "well_spaced": r["well_spaced"],
                    "error": r["error"],
                    "accused": r["accused"],
                    "good_and_untraced": r["good"] and r["accused"] is None,
                }
            )
        aggregates = {
            "p_good": report.p_good,
            "p_good_and_untraced": report.p_good_and_untraced,
            "p_accused": report.p_accused,
            "p_accused_well_spaced": report.p_accused_well_spaced(),
            "k_conforming": report.k_conforming,
            "dp_delta_bound": dp_bound(config.beta, config.xi, config.n, config.eps),
        }
        passed = (
            report.p_good_and_untraced <= 0.05
            and report.p_accused_well_spaced() >= 0.95
        )
    else:
        report = soundness_experiment(
            scheme,
            config.n,
            learner,
            config.drop_index,
            config.gamma,
            config.xi,
            config.trials,
            rng,
            k_cap=config.k_cap,
        )
        for t, r in enumerate(report.rows):
            rows.append(
                {
                    "trial": t,
                    "well_spaced": r["well_spaced"],
                    "error": None,
                    "accused": r["accused"],
                    "good_and_untraced": None,
                }
            )
        aggregates = {
            "p_accuse_dropped": report.p_accuse_dropped,
            "p_accuse_dropped_well_spaced": report.p_accuse_dropped_well_spaced(),
            "drop_index": config.drop_index,
            "k_conforming": report.k_conforming,
            "dp_delta_bound": dp_bound(config.beta, config.xi, config.n, config.eps),
        }
        passed = report.p_accuse_dropped <= 0.02
    return columns, rows, aggregates, passed if config.trials else None


def _run_games(config: ExperimentConfig):
    rng = derive_trial_rng(config.seed, 0)
    columns = ["game", "trials", "advantage", "ci_lo", "ci_hi"]
    if config.mode == "synthetic":
        rows = []
        ok = True
        for p, q in ((1.0, 0.0), (0.75, 0.25), (0.5, 0.5)):
            rate = synthetic_reduction_win_rate(p, q, config.trials, rng)
            want = adversary_success_prob(p, q)
            rows.append(
                {
                    "game": f"synthetic(p={p},q={q})",
                    "trials": config.trials,
                    "advantage": rate,
                    "ci_lo": want,
                    "ci_hi": abs(rate - want),
                }
            )
            ok &= abs(rate - want) <= 0.01
        return columns, rows, {"max_gap": max(r["ci_hi"] for r in rows)}, ok

    scheme = build_scheme(config)
    q = 4
    lo = scheme.domain_size // 8
    span = scheme.domain_size // 2
    left = tuple(lo + i * span // q for i in range(q))
    right = tuple(lo + span // (2 * q) + i * span // q for i in range(q))
    if config.mode == "random":
        adversary = RandomGuessAdversary(q=q)
        gate = lambda rep: rep.advantage <= 0.03 + rep.ci_halfwidth
    elif config.mode == "payload":
        adversary = PayloadBitAdversary(ChallengePair(left, right))
        gate = lambda rep: rep.advantage <= 0.03 + rep.ci_halfwidth
    elif config.mode == "leak":
        if not (config.scheme == "strengthened" and config.certifier == "escrow"):
            raise ConfigError("mode", "leak adversary needs the escrow-strengthened scheme")
        adversary = EscrowKeyLeakAdversary(OpfOre(config.lam, config.ell), ChallengePair(left, right))
        gate = lambda rep: rep.advantage >= 0.9
    else:  # reduction
        learner = lambda sample: pac_learn(scheme, sample)
        adversary = adversary_from_learner(scheme, learner, config.n, max(1, config.n // 2))
        bound = config.gamma**2 / (8.0 * config.n**2)
        gate = lambda rep: rep.advantage >= bound - rep.ci_halfwidth
    report = run_static_game(
        scheme, adversary, config.trials, rng, keep_transcripts=config.transcripts
    )
    rows = [
        {
            "game": f"static/{config.mode}",
            "trials": config.trials,
            "advantage": report.advantage,
            "ci_lo": report.ci_lo,
            "ci_hi": report.ci_hi,
        }
    ]
    aggregates = {
        "advantage": report.advantage,
        "ci_halfwidth": report.ci_halfwidth,
        "p0": report.p_guess1_given_b0,
        "p1": report.p_guess1_given_b1,
        **{f"flag_{k}": v for k, v in report.flag_counts.items()},
    }
    extra = {}
    if config.transcripts and report.transcripts is not None:
        extra["transcripts"] = [
            {"trial": t.trial, "bit": t.bit, "guess": t.guess, "win": t.win, **t.flags}
            for t in report.transcripts
        ]
    return columns, rows, aggregates, (gate(report) if config.trials else None), extra


def _run_hybrid(config: ExperimentConfig):
    pair = ChallengePair(left=config.left, right=config.right)
    pair.validate(1 << config.ell)
    hybrids = hybrid_schedule(pair)
    columns = ["index", "vector"]
    rows = [{"index": i, "vector": " ".join(map(str, h))} for i, h in enumerate(hybrids)]
    q = pair.q
    ascending = all(all(a < b for a, b in zip(h, h[1:])) for h in hybrids)
    adjacent = all(
        sum(x != y for x, y in zip(hybrids[i], hybrids[i + 1])) <= 1
        for i in range(len(hybrids) - 1)
    )
    aggregates = {
        "count": len(hybrids),
        "endpoints_ok": hybrids[0] == pair.left and hybrids[-1] == pair.right,
        "ascending_ok": ascending,
        "adjacent_ok": adjacent,
    }
    passed = bool(
        aggregates["endpoints_ok"] and ascending and adjacent and len(hybrids) == 2 * q + 1
    )
    return columns, rows, aggregates, passed


def _run_sq(config: ExperimentConfig):
    if config.keyspace == "tiny":
        base = OpfOre(lam=config.lam, ell=config.ell, coin_len=2)
        certifier = (
            EscrowCertifier() if config.certifier == "escrow" else SignatureCertifier()
        )
        scheme = strengthen(base, certifier) if config.scheme == "strengthened" else base
    else:
        scheme = build_scheme(config)
    columns = ["trial", "queries", "recovered_t", "true_t", "error", "hypothesis"]
    rows = []
    bound = 1 + 8 * scheme.params_len() + config.ell
    all_good = True
    for trial in range(config.trials):
        rng = derive_trial_rng(config.seed, trial)
        concept = random_concept(scheme, rng, t=int(rng.integers(1, scheme.domain_size + 1)))
        support_ms = rng.choice(scheme.domain_size, size=min(256, scheme.domain_size), replace=False)
        points = [concept.encrypt_example(int(m)) for m in support_ms]
        weights = rng.dirichlet(np.ones(len(points))).tolist()
        dist = PointMassDistribution(points, weights)
        oracle_mode = config.mode or "exact"
        oracle = StatOracle(concept, dist, config.alpha, mode=oracle_mode, rng=rng)
        if config.keyspace == "tiny":
            recovery = TinyKeyspaceRecovery(scheme)
        else:
            recovery = OracleKeyRecovery()
            recovery.register(concept.key)
        hypothesis = sq_learn(oracle, config.alpha, recovery, scheme)
        err = dist.exact_error(hypothesis, concept)
        recovered_t = getattr(hypothesis, "t", None)
        ok = err <= config.alpha and oracle.query_count <= bound
        all_good &= ok
        rows.append(
            {
                "trial": trial,
                "queries": oracle.query_count,
                "recovered_t": recovered_t,
                "true_t": concept.t,
                "error": err,
                "hypothesis": hypothesis.kind,
            }
        )
    aggregates = {"query_bound": bound, "all_good": all_good}
    return columns, rows, aggregates, all_good if config.trials else None


def _run_validsig(config: ExperimentConfig):
    sig = Ed25519Scheme()
    columns = ["trial", "outcome", "detail"]
    rows = []
    if config.mode == "learn":
        n = required_sample_size(config.alpha, config.beta)
        good = 0
        for trial in range(config.trials):
            rng = derive_trial_rng(config.seed, trial)
            state, _ = validsig_gen_ex(sig, 1, config.ell, rng)
            dist = SigExampleDistribution(state, positive_weight=0.5, rng=rng)
            sample = [
                (x, state.concept.evaluate(x))
                for x in (dist.sample(rng) for _ in range(n))
            ]
            rep = validsig_learn(sample)
            err = representation_error(rep, state.concept, dist.positive_mass())
            good += err <= config.alpha
            rows.append({"trial": trial, "outcome": err <= config.alpha, "detail": err})
        rate = good / config.trials if config.trials else float("nan")
        return columns, rows, {"success_rate": rate}, (rate >= 0.90 if config.trials else None)
    if config.mode == "trace":
        traced = 0
        for trial in range(config.trials):
            rng = derive_trial_rng(config.seed, trial)
            state, sample = validsig_gen_ex(sig, config.n, config.ell, rng)
            rep = validsig_learn(sample)
            accused = validsig_trace_ex(state, rep)
            traced += accused is not None
            rows.append({"trial": trial, "outcome": accused is not None, "detail": accused})
        rate = traced / config.trials if config.trials else float("nan")
        return columns, rows, {"traced_rate": rate}, (rate == 1.0 if config.trials else None)
    # forge: the honest learner must never win the weak forgery game
    wins = 0
    for trial in range(config.trials):
        rng = derive_trial_rng(config.seed, trial)
        result = run_weak_forgery_game(sig, validsig_learn, config.n, config.ell, rng)
        wins += result["value"]
        rows.append({"trial": trial, "outcome": result["value"], "detail": result.get("reason", "")})
    return columns, rows, {"wins": wins}, (wins == 0 if config.trials else None)


_RUNNERS = {
    "correctness": _run_correctness,
    "pac": _run_pac,
    "trace": _run_trace,
    "games": _run_games,
    "hybrid": _run_hybrid,
    "sq": _run_sq,
    "validsig": _run_validsig,
}
