"""Experiment configs, seeded trial execution, CSV/JSON reports and lemma checks."""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import fourier, stats
from .domain import (
    NormalizedBoolLinear,
    class_from_descriptor,
    class_stats_boollinear,
    density,
    predicate_from_descriptor,
)
from .learners import dictator_sq_learner, trivial_sparse_learner
from .oracles import AdversaryState, HonestSQS, QueryBudget
from .samplers import (
    ReductionParams,
    bit_fixing_sampler,
    consistent_set_sampler,
    learn_then_sample,
    query_family,
    random_guess,
)

CSV_COLUMNS = ("trial", "seed", "queries", "output_hex", "is_positive", "notes")
SAMPLERS = ("random", "bit_fixing", "consistent_set", "learn_then_sample")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based generator keyed by ``(seed, trial)``; independent of execution order."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, trial])))


def thread_count() -> int:
    raw = os.environ.get("SQSLAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ConfigError(f"SQSLAB_THREADS={raw!r} is not an integer") from None


# ---------------------------------------------------------------------------
# Config


@dataclass
class ExperimentConfig:
    """One experiment.

    Exactly one of ``predicate`` (a fixed target) or ``cls`` (a class; honest
    oracles draw a uniform member per trial, the adversary prunes it) is set.
    ``budget`` is ``{"q": int | null, "xi": float}`` or null.
    """

    name: str
    oracle: dict
    sampler: dict
    trials: int
    seed: int
    predicate: dict | None = None
    cls: dict | None = None
    budget: dict | None = None
    output: str | None = None
    bound_slack: float = 0.0

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {"name", "oracle", "sampler", "trials", "seed", "predicate", "class", "budget", "output", "bound_slack"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown field(s): {sorted(extra)}")
        for key in ("name", "oracle", "sampler", "trials", "seed"):
            if key not in d:
                raise ConfigError(f"missing field {key!r}")
        cfg = cls(
            name=d["name"], oracle=d["oracle"], sampler=d["sampler"], trials=d["trials"], seed=d["seed"],
            predicate=d.get("predicate"), cls=d.get("class"), budget=d.get("budget"),
            output=d.get("output"), bound_slack=d.get("bound_slack", 0.0),
        )
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_json(Path(path).read_text())

    def validate(self) -> None:
        if not isinstance(self.trials, int) or self.trials < 0:
            raise ConfigError("field 'trials': must be a nonnegative integer")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigError("field 'seed': must be a nonnegative integer")
        if (self.predicate is None) == (self.cls is None):
            raise ConfigError("exactly one of 'predicate' and 'class' must be given")
        kind = self.oracle.get("kind")
        if kind not in ("honest", "adversarial"):
            raise ConfigError("field 'oracle.kind': expected 'honest' or 'adversarial'")
        if kind == "adversarial" and self.cls is None:
            raise ConfigError("field 'oracle.kind': the adversary needs a 'class'")
        if kind == "honest" and self.oracle.get("mode", "exact") not in ("exact", "sampled", "worst_noise"):
            raise ConfigError("field 'oracle.mode': expected exact, sampled or worst_noise")
        if self.sampler.get("kind") not in SAMPLERS:
            raise ConfigError(f"field 'sampler.kind': expected one of {SAMPLERS}")
        if self.budget is not None:
            if "xi" not in self.budget:
                raise ConfigError("field 'budget.xi': missing")
            q = self.budget.get("q")
            if q is not None and (not isinstance(q, int) or q < 0):
                raise ConfigError("field 'budget.q': must be a nonnegative integer or null")
        try:
            if self.predicate is not None:
                predicate_from_descriptor(self.predicate)
            else:
                class_from_descriptor(self.cls)
        except (KeyError, ValueError, TypeError) as exc:
            field_name = "predicate" if self.predicate is not None else "class"
            raise ConfigError(f"field {field_name!r}: {exc}") from None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["class"] = d.pop("cls")
        return d

    def query_budget(self) -> QueryBudget | None:
        if self.budget is None:
            return None
        return QueryBudget(self.budget.get("q"), float(self.budget["xi"]))


# ---------------------------------------------------------------------------
# Theory bounds


def negparity_bound(n: int) -> float:
    """``1/2 + 2^-(n/4 - 2)``."""
    return 0.5 + 2.0 ** -(n / 4 - 2)


def boollinear_bound(n: int, p: int) -> float:
    """``1/p + p^(-n/13)``."""
    return 1 / p + p ** (-n / 13)


def theory_bound(cfg: ExperimentConfig) -> tuple[str | None, float | None]:
    """``(kind, value)``: an upper bound on success for adversarial regimes, a lower bound for the reduction."""
    if cfg.oracle["kind"] == "adversarial":
        c = cfg.cls
        if c["kind"] == "negparity_class":
            return "upper", negparity_bound(int(c["n"]))
        if c["kind"] == "boollinear_class":
            return "upper", boollinear_bound(int(c["n"]), int(c["p"]))
        return None, None
    if cfg.sampler["kind"] == "learn_then_sample" and cfg.sampler.get("learner", "dictator") == "dictator":
        return "lower", 1 - float(cfg.sampler["eps_prime"])
    return None, None


# ---------------------------------------------------------------------------
# Trials


@dataclass
class TrialRecord:
    trial: int
    seed: int
    queries: int
    output_hex: str
    is_positive: int
    notes: str
    optimal_success: float | None = field(default=None, repr=False)


class _Shared:
    """Read-only objects built once per experiment."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.budget = cfg.query_budget()
        self.predicate = predicate_from_descriptor(cfg.predicate) if cfg.predicate else None
        self.cls = class_from_descriptor(cfg.cls) if cfg.cls else None
        if self.cls is not None:
            # warm lazily cached tables before worker threads read them
            self.cls.positive_sizes()
            if isinstance(self.cls, NormalizedBoolLinear):
                self.cls.mask_matrix()
        self.domain = (self.cls or self.predicate).domain


def _run_sampler(cfg: ExperimentConfig, sh: _Shared, session, target, rng) -> tuple[object, str]:
    s = cfg.sampler
    kind = s["kind"]
    budget = sh.budget
    q = budget.max_queries if budget else None
    if kind == "random":
        return random_guess(sh.domain, rng), ""
    if kind == "bit_fixing":
        out = bit_fixing_sampler(session, sh.domain.n, int(s["size_bound"]), q, rng)
        return out.output, out.notes
    if kind == "consistent_set":
        if sh.cls is None:
            raise ConfigError("consistent_set sampler needs a class")
        xi = float(s.get("xi", budget.min_tolerance if budget else 0.1))
        count = int(s.get("queries", q if q is not None else sh.domain.n))
        qs = query_family(s.get("family", "random"), sh.domain, count, rng)
        out = consistent_set_sampler(session, sh.cls, qs, xi, rng)
        return out.output, out.notes
    # learn_then_sample
    rho = float(s["rho"]) if "rho" in s else density(target)
    learner_kind = s.get("learner", "dictator")
    if learner_kind == "dictator":
        params = ReductionParams(float(s["eps_prime"]), rho, sh.domain.n, s.get("preset", "unit"))

        def learner(sql, eps, delta):
            return dictator_sq_learner(sql, eps, delta, float(s.get("learner_xi", 0.25)))
    elif learner_kind == "trivial":
        params = ReductionParams(float(s["eps_prime"]), rho, 1, s.get("preset", "unit"))

        def learner(sql, eps, delta):
            return trivial_sparse_learner(float(s["density_bound"]), float(s.get("learner_eps", 1.0)), sql.n)
    else:
        raise ConfigError(f"field 'sampler.learner': unknown learner {learner_kind!r}")
    out = learn_then_sample(learner, session, params, rng)
    return out.output, out.notes


def run_trial(cfg: ExperimentConfig, sh: _Shared, trial: int) -> TrialRecord:
    rng = trial_rng(cfg.seed, trial)
    adversarial = cfg.oracle["kind"] == "adversarial"
    notes: list[str] = []
    target = None
    if adversarial:
        session = AdversaryState(sh.cls, budget=sh.budget)
    else:
        target = sh.predicate or sh.cls.member(int(rng.integers(sh.cls.size)))
        mode = cfg.oracle.get("mode", "exact")
        session = HonestSQS(target, mode, m=cfg.oracle.get("m"), rng=rng, budget=sh.budget)
    opt = None
    try:
        x, note = _run_sampler(cfg, sh, session, target, rng)
        if note:
            notes.append(note)
        if adversarial:
            opt = session.optimal_success()[1]
            removed = "/".join(str(r["removed"]) for r in session.transcript)
            notes.append(f"optimal={opt:.6f}")
            if removed:
                notes.append(f"removed={removed}")
            target = session.commit(rng)
        positive = int(target(x))
        out_hex = sh.domain.format_element(x)
    except Exception as exc:  # recorded per trial, never fatal to the batch
        notes.append(f"error:{type(exc).__name__}:{exc}")
        positive, out_hex = 0, ""
    return TrialRecord(trial, cfg.seed, session.queries_used, out_hex, positive, ";".join(notes), opt)


# ---------------------------------------------------------------------------
# Experiment


@dataclass
class ExperimentResult:
    records: list[TrialRecord]
    summary: dict

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow([r.trial, r.seed, r.queries, r.output_hex, r.is_positive, r.notes])
        return buf.getvalue()

    def summary_text(self) -> str:
        return json.dumps(self.summary, indent=2, sort_keys=True) + "\n"


def _output_paths(out) -> tuple[Path, Path]:
    out = Path(out)
    if out.suffix == ".csv":
        return out, out.with_suffix(".summary.json")
    return out.with_suffix(out.suffix + ".csv") if out.suffix else out.with_suffix(".csv"), (
        out.with_suffix(out.suffix + ".summary.json") if out.suffix else out.with_suffix(".summary.json")
    )


def summarize(cfg: ExperimentConfig, records: list[TrialRecord]) -> dict:
    kind, bound = theory_bound(cfg)
    n = len(records)
    successes = sum(r.is_positive for r in records)
    rate = successes / n if n else None
    satisfied = None
    if rate is not None and bound is not None:
        satisfied = rate <= bound + cfg.bound_slack if kind == "upper" else rate >= bound - cfg.bound_slack
    opts = [r.optimal_success for r in records if r.optimal_success is not None]
    return {
        "name": cfg.name,
        "trials": n,
        "successes": successes,
        "success_rate": rate,
        "no_data": n == 0,
        "theory_bound": bound,
        "bound_kind": kind,
        "bound_slack": cfg.bound_slack,
        "bound_satisfied": satisfied,
        "max_optimal_success": max(opts) if opts else None,
        "optimal_within_bound": (max(opts) <= bound) if (opts and kind == "upper") else None,
        "errors": sum(1 for r in records if "error:" in r.notes),
        "mean_queries": (sum(r.queries for r in records) / n) if n else None,
        "config": cfg.to_dict(),
    }


def run_experiment(config, out=None, threads: int | None = None) -> ExperimentResult:
    """Run every trial, write ``<out>.csv`` and ``<out>.summary.json`` when an output path is known."""
    cfg = config if isinstance(config, ExperimentConfig) else ExperimentConfig.from_dict(config)
    sh = _Shared(cfg)
    threads = threads or thread_count()
    if threads > 1 and cfg.trials > 1:
        with ThreadPoolExecutor(threads) as pool:
            records = list(pool.map(lambda t: run_trial(cfg, sh, t), range(cfg.trials)))
    else:
        records = [run_trial(cfg, sh, t) for t in range(cfg.trials)]
    result = ExperimentResult(records, summarize(cfg, records))
    out = out or cfg.output
    if out:
        csv_path, json_path = _output_paths(out)
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(result.csv_text())
        json_path.write_text(result.summary_text())
    return result


# ---------------------------------------------------------------------------
# Lemma checks


SELECTORS = ("class-stats", "independent-count", "orthonormal", "coefficient", "hoeffding", "uniform-sd", "all")


def _entry(lemma: str, anchor: str, measured, bound, ok: bool) -> dict:
    return {"lemma": lemma, "anchor": anchor, "measured": measured, "bound": bound, "verdict": "pass" if ok else "fail"}


def _check_class_stats(n, p, **_) -> list[dict]:
    st = class_stats_boollinear(n, p, strict=False)
    return [
        _entry(f"class-stats:{key}", "booleanized linear class counts", st.brute[key], st.formula[key],
               st.brute[key] == st.formula[key])
        for key in st.formula
    ]


def _check_independent_count(n, xi, trials, seed, **_) -> list[dict]:
    rng = np.random.default_rng(seed)
    worst = 0
    from .domain import FullCube

    dom = FullCube(n)
    res = None
    for _ in range(trials):
        g = fourier.TruthTable(rng.choice(np.array([-1.0, 1.0]), size=1 << n), dom)
        res = fourier.count_dependent_negparity(g, xi, check=False)
        worst = max(worst, res.count)
    bound = 1 / (xi - 6 / 2**n) ** 2
    lemma = 2 ** (n / 2 + 2)
    return [
        _entry("independent-count:tolerance-bound", "dependent negative parities", worst, bound, worst <= bound),
        _entry("independent-count:regime-bound", "dependent negative parities", worst, lemma, worst <= lemma),
    ]


def _check_orthonormal(n, p, **_) -> list[dict]:
    from .domain import PuncturedZp

    cls = NormalizedBoolLinear(n, p)
    dom = PuncturedZp(n, p)
    tables = [fourier.TruthTable(2.0 * col - 1.0, dom) for col in cls.mask_matrix().T]
    basis = fourier.orthonormalize_correlated(tables, fourier.boollinear_correlation(n, p))
    B = np.stack([b.values for b in basis])
    dev = float(np.max(np.abs(B @ B.T / dom.cardinality - np.eye(len(basis)))))
    return [_entry("orthonormal", "uniformly correlated family", dev, 1e-9, dev <= 1e-9)]


def _check_coefficient(n, trials, seed, **_) -> list[dict]:
    from .domain import FullCube

    rng = np.random.default_rng(seed)
    dom = FullCube(n)
    worst = 0.0
    for _ in range(trials):
        g = fourier.TruthTable(rng.choice(np.array([-1.0, 1.0]), size=1 << n), dom)
        spec = fourier.wht(g)
        for s in rng.integers(1, 1 << n, size=8):
            c = fourier.ParityCoefficientCounts.from_table(g, int(s))
            worst = max(worst, abs(fourier.parity_coefficient_from_counts(c) - spec[int(s)]))
    return [_entry("coefficient", "parity coefficient from counts", worst, 1e-12, worst <= 1e-12)]


def _check_hoeffding(trials, seed, **_) -> list[dict]:
    rng = np.random.default_rng(seed)
    out = []
    for m in (50, 100, 400):
        for eps in (0.05, 0.1, 0.2):
            means = rng.binomial(m, 0.5, size=trials) / m
            emp = float(np.mean(means <= 0.5 - eps))
            bound = stats.hoeffding_tail(m, eps)
            out.append(_entry(f"hoeffding:m={m},eps={eps}", "Hoeffding tail", emp, bound, emp <= bound))
    return out


def _check_uniform_sd(trials, seed, **_) -> list[dict]:
    from scipy.integrate import quad

    rng = np.random.default_rng(seed)
    worst = 0.0
    within = True
    for _ in range(trials):
        hw = float(rng.uniform(0.05, 1.0))
        D1 = stats.UniformInterval(float(rng.uniform(-1, 1)), hw)
        D2 = stats.UniformInterval(float(rng.uniform(-1, 1)), hw)
        lo, hi = min(D1.low, D2.low), max(D1.low, D2.low) + 2 * hw
        pts = sorted({D1.low, D1.low + 2 * hw, D2.low, D2.low + 2 * hw})
        num = 0.5 * quad(lambda x: abs(float(D1.pdf(x)) - float(D2.pdf(x))), lo, hi, points=pts, limit=200)[0]
        exact = stats.uniform_interval_sd(D1, D2)
        worst = max(worst, abs(num - exact))
        within &= exact <= stats.uniform_interval_sd_bound(D1, D2) + 1e-15
    return [
        _entry("uniform-sd:closed-form", "uniform interval distance", worst, 1e-6, worst <= 1e-6),
        _entry("uniform-sd:length-bound", "uniform interval distance", within, True, within),
    ]


_CHECKS = {
    "class-stats": _check_class_stats,
    "independent-count": _check_independent_count,
    "orthonormal": _check_orthonormal,
    "coefficient": _check_coefficient,
    "hoeffding": _check_hoeffding,
    "uniform-sd": _check_uniform_sd,
}

_DEFAULTS = {
    "class-stats": {"n": 3, "p": 3},
    "independent-count": {"n": 16, "xi": 2**-4, "trials": 20},
    "orthonormal": {"n": 3, "p": 3},
    "coefficient": {"n": 10, "trials": 20},
    "hoeffding": {"trials": 10_000},
    "uniform-sd": {"trials": 100},
}


def verify_lemmas(selector: str, n: int | None = None, p: int | None = None, xi: float | None = None,
                  trials: int | None = None, seed: int = 0) -> dict:
    """Run the invariant checks for ``selector`` and return a machine-readable report."""
    if selector not in SELECTORS:
        raise ValueError(f"unknown selector {selector!r}; expected one of {SELECTORS}")
    names = list(_CHECKS) if selector == "all" else [selector]
    lemmas = []
    for name in names:
        params = dict(_DEFAULTS[name])
        for key, val in (("n", n), ("p", p), ("xi", xi), ("trials", trials)):
            if val is not None and key in params:
                params[key] = val
        if name == "independent-count" and xi is None and n is not None:
            params["xi"] = 2 ** (-params["n"] / 4)
        lemmas.extend(_CHECKS[name](seed=seed, **params))
    return {"selector": selector, "seed": seed, "lemmas": lemmas,
            "passed": all(e["verdict"] == "pass" for e in lemmas)}


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, float) and math.isnan(o):
        return None
    raise TypeError(type(o))


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=_json_default) + "\n"
