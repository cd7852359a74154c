"""Experiment layer: JSON config parsing, Monte Carlo estimators with paired
per-trial sampling, implication audits, threshold sweeps, and CSV emission.

Reproducibility contract: identical config + seed gives byte-identical CSV.
Floats are serialized with repr, trials are reduced in index order, and the
sidecar carries no timestamps.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .analytics import (
    DIRECT_SUM_MAX_TRACES,
    MGF_MAX_RUNS,
    ThresholdParams,
    TraceCount,
    critical_rate,
    prob_no_pattern_witness_asymptotic,
    prob_no_pattern_witness_exact,
    prob_uncovered_run_asymptotic,
    prob_uncovered_run_mgf,
    prob_uncovered_run_sum,
)
from .bits import (
    BitString,
    PatternSpan,
    RepeatBlockSpec,
    RunFractionSpec,
    make_repeat_instance,
    make_run_instance,
    run_decompose,
)
from .channel import RngSpec
from .events import (
    AdjacentPattern,
    SandwichPattern,
    _pattern_witness_from_flags,
    _run_coverage_from_flags,
    _validated_alternative,
    _windows_violated,
)
from .reconstruct import DEFAULT_ORACLE_CAP, _consistent_rows, maximal_runs
from .bits import is_subsequence

__all__ = [
    "ConfigError",
    "InfeasibleError",
    "ExperimentConfig",
    "EstimateRow",
    "AuditReport",
    "CSV_HEADER",
    "ESTIMATORS",
    "WILSON_Z",
    "wilson_interval",
    "estimate_difficulty",
    "estimate_event_probs",
    "estimate_mr_error",
    "audit_implications",
    "sweep_threshold",
    "run_mode",
    "rows_to_csv",
    "write_outputs",
]


class ConfigError(ValueError):
    """Malformed or inconsistent experiment configuration (exit code 2)."""


class InfeasibleError(RuntimeError):
    """Structurally valid request that exceeds a hard resource cap (exit 3)."""


MODES = ("montecarlo", "exact", "asymptotic", "sweep", "audit", "generate")
ESTIMATORS = ("difficulty", "no-pattern-witness", "uncovered-run", "reconstruction-error")
CSV_HEADER = "estimator,n,p,T_or_c,a,value,ln_value,ci_low,ci_high,trials,seed,method"
WILSON_Z = 1.959963984540054  # two-sided 95%

_MODE_KEYS = {
    "montecarlo": {"mode", "source", "p", "traces", "trials", "seed", "out", "estimators"},
    "exact": {"mode", "source", "p", "traces", "out"},
    "asymptotic": {"mode", "source", "p", "traces", "out"},
    "sweep": {"mode", "source", "p", "c_grid", "n_grid", "a", "out"},
    "audit": {"mode", "source", "p", "traces", "trials", "seed", "out"},
    "generate": {"mode", "source", "out"},
}


def _require(condition: bool, message: str):
    if not condition:
        raise ConfigError(message)


def _check_keys(obj: dict, allowed: set, where: str):
    _require(isinstance(obj, dict), f"{where} must be a JSON object")
    unknown = set(obj) - allowed
    _require(not unknown, f"unknown key(s) in {where}: {', '.join(sorted(unknown))}")


@dataclass(frozen=True)
class _Instance:
    """A concrete source string with everything the estimators consume."""

    s: BitString
    spans: tuple[PatternSpan, ...]
    lengths: tuple[int, ...]
    first_bit: int


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    pattern: str | None = None
    ell: float | None = None
    copy_exponent: float = 1.0
    first_bit: int = 0
    fractions: tuple[float, ...] | None = None
    bits: str | None = None
    n: int | None = None

    @classmethod
    def from_dict(cls, obj, *, allow_missing_n: bool) -> "SourceSpec":
        _require(isinstance(obj, dict), "source must be a JSON object")
        kind = obj.get("kind")
        _require(kind in ("repeat", "runs", "bits"), "source.kind must be repeat, runs, or bits")
        if kind == "bits":
            _check_keys(obj, {"kind", "bits"}, "source")
            bits = obj.get("bits")
            _require(isinstance(bits, str) and bits and set(bits) <= {"0", "1"},
                     "source.bits must be a nonempty 0/1 string")
            return cls(kind="bits", bits=bits, n=len(bits))
        n = obj.get("n")
        if not allow_missing_n:
            _require(isinstance(n, int) and n >= 1, "source.n must be a positive integer")
        else:
            _require(n is None, "omit source.n: the sweep n-grid supplies it")
        if kind == "repeat":
            _check_keys(obj, {"kind", "pattern", "ell", "a", "n"}, "source")
            pattern = obj.get("pattern")
            _require(isinstance(pattern, str) and pattern and set(pattern) <= {"0", "1"},
                     "source.pattern must be a nonempty 0/1 string")
            ell = obj.get("ell")
            _require(isinstance(ell, (int, float)) and 0 < ell <= 1, "source.ell must lie in (0, 1]")
            a = obj.get("a", 1.0)
            _require(isinstance(a, (int, float)) and 0 < a <= 1, "source.a must lie in (0, 1]")
            return cls(kind="repeat", pattern=pattern, ell=float(ell), copy_exponent=float(a), n=n)
        _check_keys(obj, {"kind", "first_bit", "fractions", "n"}, "source")
        first = obj.get("first_bit", 0)
        _require(first in (0, 1), "source.first_bit must be 0 or 1")
        fracs = obj.get("fractions")
        _require(isinstance(fracs, list) and fracs
                 and all(isinstance(x, (int, float)) and 0 < x < 1 for x in fracs),
                 "source.fractions must be a list of numbers in (0, 1)")
        _require(abs(sum(fracs) - 1.0) <= 1e-9, "source.fractions must sum to 1")
        return cls(kind="runs", first_bit=first, fractions=tuple(float(x) for x in fracs), n=n)

    def run_fractions(self) -> tuple[float, ...]:
        """Run-length fractions for asymptotics; unavailable for raw bits."""
        if self.kind == "runs":
            return self.fractions
        raise ConfigError(f"{self.kind} source has no run-length fractions")

    def instance(self, n: int | None = None) -> _Instance:
        n = self.n if n is None else n
        if self.kind == "bits":
            s = BitString(self.bits)
        elif self.kind == "repeat":
            spec = RepeatBlockSpec(BitString(self.pattern), self.ell, self.copy_exponent)
            try:
                s, span = make_repeat_instance(spec, n)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            profile = run_decompose(s)
            return _Instance(s, (span,), profile.lengths, profile.first_bit)
        else:
            spec = RunFractionSpec(self.first_bit, self.fractions)
            try:
                s = make_run_instance(spec, n)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        profile = run_decompose(s)
        return _Instance(s, (_longest_run_span(profile),), profile.lengths, profile.first_bit)


def _longest_run_span(profile) -> PatternSpan:
    """The first longest run, declared as a single-bit repeat span."""
    lengths = profile.lengths
    idx = max(range(len(lengths)), key=lambda i: lengths[i])
    offset = sum(lengths[:idx])
    return PatternSpan(offset=offset, period=1, copies=lengths[idx])


@dataclass(frozen=True)
class ExperimentConfig:
    mode: str
    source: SourceSpec
    p: float | None = None
    traces: int | None = None
    schedule: tuple[float, float] | None = None  # (c, a)
    trials: int | None = None
    seed: int | None = None
    out: str | None = None
    estimators: tuple[str, ...] | None = None
    c_grid: tuple[float, ...] | None = None
    n_grid: tuple[int, ...] | None = None
    sweep_a: float = 1.0

    @classmethod
    def from_dict(cls, obj: dict, mode: str | None = None) -> "ExperimentConfig":
        _require(isinstance(obj, dict), "config must be a JSON object")
        cfg_mode = obj.get("mode", mode)
        _require(cfg_mode in MODES, f"mode must be one of {', '.join(MODES)}")
        _require(mode is None or cfg_mode == mode,
                 f"config mode {cfg_mode!r} does not match subcommand {mode!r}")
        _check_keys(obj, _MODE_KEYS[cfg_mode], f"{cfg_mode} config")
        source = SourceSpec.from_dict(obj.get("source"), allow_missing_n=cfg_mode == "sweep")
        out = obj.get("out")
        _require(out is None or (isinstance(out, str) and out), "out must be a nonempty path")

        if cfg_mode == "generate":
            return cls(mode=cfg_mode, source=source, out=out)

        p = obj.get("p")
        _require(isinstance(p, (int, float)) and 0 <= p <= 1, "p must be a probability in [0, 1]")
        kwargs = dict(mode=cfg_mode, source=source, p=float(p), out=out)

        if cfg_mode == "sweep":
            c_grid = obj.get("c_grid")
            n_grid = obj.get("n_grid")
            _require(isinstance(c_grid, list) and c_grid
                     and all(isinstance(c, (int, float)) and c > 0 for c in c_grid),
                     "c_grid must be a list of positive rates")
            _require(isinstance(n_grid, list) and n_grid
                     and all(isinstance(n, int) and n >= 1 for n in n_grid),
                     "n_grid must be a list of positive integers")
            a = obj.get("a", 1.0)
            _require(isinstance(a, (int, float)) and 0 < a <= 1, "a must lie in (0, 1]")
            _require(source.kind != "bits", "sweep needs a repeat or runs source")
            return cls(c_grid=tuple(float(c) for c in c_grid), n_grid=tuple(n_grid),
                       sweep_a=float(a), **kwargs)

        traces = obj.get("traces")
        if isinstance(traces, bool) or traces is None:
            raise ConfigError("traces must be an integer or a {c, a} schedule")
        if isinstance(traces, int):
            _require(traces >= 1, "empty trace set has undefined sufficiency")
            kwargs["traces"] = traces
        elif isinstance(traces, dict):
            _check_keys(traces, {"c", "a"}, "traces")
            c = traces.get("c")
            a = traces.get("a", 1.0)
            _require(isinstance(c, (int, float)) and c > 0, "traces.c must be positive")
            _require(isinstance(a, (int, float)) and 0 < a <= 1, "traces.a must lie in (0, 1]")
            kwargs["schedule"] = (float(c), float(a))
        else:
            raise ConfigError("traces must be an integer or a {c, a} schedule")

        if cfg_mode == "asymptotic":
            _require("schedule" in kwargs, "asymptotic mode needs a {c, a} trace schedule")
            _require(source.kind != "bits", "asymptotic mode needs a repeat or runs source")
            return cls(**kwargs)
        if cfg_mode == "exact":
            return cls(**kwargs)

        # montecarlo and audit: simulation modes
        _require("traces" in kwargs, f"{cfg_mode} mode needs an integer trace count")
        trials = obj.get("trials")
        _require(isinstance(trials, int) and not isinstance(trials, bool) and trials >= 1,
                 "trials must be a positive integer")
        seed = obj.get("seed")
        _require(isinstance(seed, int) and not isinstance(seed, bool) and 0 <= seed < 2**64,
                 "seed must be an integer in [0, 2^64)")
        kwargs.update(trials=trials, seed=seed)
        if cfg_mode == "audit":
            return cls(**kwargs)
        names = obj.get("estimators")
        if names is not None:
            _require(isinstance(names, list) and names
                     and all(e in ESTIMATORS for e in names) and len(set(names)) == len(names),
                     f"estimators must be distinct names among {', '.join(ESTIMATORS)}")
            kwargs["estimators"] = tuple(names)
        return cls(**kwargs)

    @classmethod
    def from_file(cls, path: str, mode: str | None = None, overrides: dict | None = None):
        try:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError("config must be a JSON object")
        merged = dict(obj)
        for key, value in (overrides or {}).items():
            if value is not None:
                merged[key] = value
        config = cls.from_dict(merged, mode=mode)
        digest = hashlib.sha256(
            json.dumps(merged, sort_keys=True, separators=(",", ":")).encode()
        ).hexdigest()
        object.__setattr__(config, "_config_sha256", digest)
        return config

    @property
    def config_sha256(self) -> str:
        return getattr(self, "_config_sha256", "unhashed")


# ---------------------------------------------------------------------------
# rows and CSV

def wilson_interval(successes: int, trials: int, z: float = WILSON_Z) -> tuple[float, float]:
    """Wilson score interval; well behaved for proportions at 0 or 1."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    z2 = z * z
    denom = trials + z2
    center = (successes + z2 / 2.0) / denom
    spread = (z / denom) * math.sqrt(successes * (trials - successes) / trials + z2 / 4.0)
    # the bounds must bracket the point estimate; at 0 or trials successes the
    # algebra gives the estimate itself and float rounding can land either side
    freq = successes / trials
    return (max(0.0, min(center - spread, freq)), min(1.0, max(center + spread, freq)))


@dataclass(frozen=True)
class EstimateRow:
    estimator: str
    n: int
    p: float
    t_or_c: int | float
    a: float | None
    value: float
    ln_value: float
    ci: tuple[float, float] | None = None
    trials: int | None = None
    seed: int | None = None
    method: str = "monte-carlo"

    def __post_init__(self):
        if self.ci is not None and not (self.ci[0] <= self.value <= self.ci[1]):
            raise ValueError("estimate must lie inside its confidence interval")

    def fields(self) -> list[str]:
        return [
            self.estimator,
            str(self.n),
            repr(float(self.p)),
            str(self.t_or_c) if isinstance(self.t_or_c, int) else repr(self.t_or_c),
            "" if self.a is None else repr(float(self.a)),
            repr(float(self.value)),
            repr(float(self.ln_value)),
            "" if self.ci is None else repr(self.ci[0]),
            "" if self.ci is None else repr(self.ci[1]),
            "" if self.trials is None else str(self.trials),
            "" if self.seed is None else str(self.seed),
            self.method,
        ]


def rows_to_csv(rows, regimes=None) -> str:
    header = CSV_HEADER if regimes is None else CSV_HEADER + ",regime"
    lines = [header]
    if regimes is None:
        lines.extend(",".join(row.fields()) for row in rows)
    else:
        if len(regimes) != len(rows):
            raise ValueError("one regime label per row required")
        lines.extend(",".join(row.fields() + [reg]) for row, reg in zip(rows, regimes))
    return "\n".join(lines) + "\n"


def write_outputs(config: ExperimentConfig, text: str, *, suffix: str = "") -> None:
    """Write the payload to config.out (plus a metadata sidecar) or stdout."""
    if config.out is None:
        print(text, end="")
        return
    path = config.out + suffix
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    sidecar = "\n".join(
        [
            "rng-algorithm: pcg64",
            "package: deltrace 0.1.0",
            f"config-sha256: {config.config_sha256}",
        ]
    )
    with open(path + ".meta.txt", "w", encoding="utf-8", newline="") as fh:
        fh.write(sidecar + "\n")


# ---------------------------------------------------------------------------
# Monte Carlo core: one pass, shared masks, trial-index reduction order

_AUDIT_CHECKS = (
    "no-witness-and-sufficient",
    "covered-and-wrong",
    "ambiguity-alternative-inconsistent",
)


@dataclass
class _TrialStats:
    trials: int = 0
    span_events: list[int] = field(default_factory=list)
    uncovered: int = 0
    mr_errors: int = 0
    insufficient: int = 0
    audit_counts: dict[str, int] = field(default_factory=dict)
    offenders: list[tuple[int, str]] = field(default_factory=list)


def _audit_patterns(instance: _Instance):
    """Declare the structural patterns audited on every trial: adjacent run
    pairs at each boundary, and sandwiches around single-bit interior runs."""
    lengths = instance.lengths
    first = instance.first_bit
    starts = [0]
    for length in lengths[:-1]:
        starts.append(starts[-1] + length)
    bit_at = lambda i: (first + i) % 2  # noqa: E731  (run parity)
    declared = []
    for i in range(len(lengths) - 1):
        declared.append(
            AdjacentPattern(
                offset=starts[i],
                left=BitString([bit_at(i)]),
                left_copies=lengths[i],
                right=BitString([bit_at(i + 1)]),
                right_copies=lengths[i + 1],
            )
        )
    for i in range(1, len(lengths) - 1):
        if lengths[i] == 1:
            declared.append(
                SandwichPattern(
                    offset=starts[i - 1],
                    outer=BitString([bit_at(i - 1)]),
                    inner=BitString([bit_at(i)]),
                    left_copies=lengths[i - 1],
                    right_copies=lengths[i + 1],
                )
            )
    return declared


def _run_trials(config: ExperimentConfig, *, need: set, audit: bool = False) -> _TrialStats:
    instance = config.source.instance()
    s = instance.s
    n = len(s)
    bits = s.bits
    lengths = np.asarray(instance.lengths, dtype=np.int64)
    spans = instance.spans
    t_count = config.traces
    p = config.p
    rng_spec = RngSpec(master_seed=config.seed)
    if ("difficulty" in need or audit) and n > DEFAULT_ORACLE_CAP:
        raise InfeasibleError(f"brute-force infeasible: n={n} exceeds cap {DEFAULT_ORACLE_CAP}")
    validated = []
    if audit:
        for pat in _audit_patterns(instance):
            condition, windows, alt = _validated_alternative(s, pat)
            validated.append((condition, windows, alt))
    stats = _TrialStats(trials=config.trials, span_events=[0] * len(spans))
    stats.audit_counts = {name: 0 for name in _AUDIT_CHECKS}
    need_arrays = audit or "difficulty" in need or "reconstruction-error" in need
    for trial in range(config.trials):
        rng = rng_spec.trial_rng(trial)
        flags = rng.random((t_count, n)) < p
        witnessed = [_pattern_witness_from_flags(flags, span) for span in spans]
        for i, w in enumerate(witnessed):
            if not w:
                stats.span_events[i] += 1
        covered, _ = _run_coverage_from_flags(flags, lengths)
        if not covered:
            stats.uncovered += 1
        if not need_arrays:
            continue
        arrays = [bits[~flags[j]] for j in range(t_count)]
        mr_wrong = None
        if audit or "reconstruction-error" in need:
            result = maximal_runs(n, arrays)
            mr_wrong = not (result.ok and result.string == s)
            if mr_wrong:
                stats.mr_errors += 1
            if covered and mr_wrong:
                stats.audit_counts["covered-and-wrong"] += 1
                stats.offenders.append((trial, "covered-and-wrong"))
                if not audit:
                    raise RuntimeError(
                        f"run coverage held but reconstruction missed on trial {trial}"
                    )
        sufficient = None
        if audit or "difficulty" in need:
            sufficient = _consistent_rows(n, arrays).size == 1
            if not sufficient:
                stats.insufficient += 1
        if audit:
            if not witnessed[0] and sufficient:
                stats.audit_counts["no-witness-and-sufficient"] += 1
                stats.offenders.append((trial, "no-witness-and-sufficient"))
            for condition, windows, alt in validated:
                if _windows_violated(flags, windows).all():
                    if not all(is_subsequence(arr, alt) for arr in arrays):
                        stats.audit_counts["ambiguity-alternative-inconsistent"] += 1
                        stats.offenders.append((trial, "ambiguity-alternative-inconsistent"))
    return stats


def _mc_row(config, estimator, successes, *, n) -> EstimateRow:
    freq = successes / config.trials
    ci = wilson_interval(successes, config.trials)
    return EstimateRow(
        estimator=estimator,
        n=n,
        p=config.p,
        t_or_c=config.traces,
        a=None,
        value=freq,
        ln_value=math.log(freq) if freq > 0 else float("-inf"),
        ci=ci,
        trials=config.trials,
        seed=config.seed,
        method="monte-carlo",
    )


def _simulation_estimators(config: ExperimentConfig) -> tuple[str, ...]:
    if config.estimators is not None:
        return config.estimators
    n = config.source.n
    if n <= DEFAULT_ORACLE_CAP:
        return ESTIMATORS
    return tuple(e for e in ESTIMATORS if e != "difficulty")


def estimate_difficulty(config: ExperimentConfig) -> EstimateRow:
    """Fraction of trials whose trace set fails to pin down the source,
    judged by the brute-force oracle."""
    stats = _run_trials(config, need={"difficulty"})
    return _mc_row(config, "difficulty", stats.insufficient, n=config.source.n)


def estimate_event_probs(config: ExperimentConfig) -> list[EstimateRow]:
    """Frequencies of the two mask events: every trace deleting a copy of
    each declared span, and some run going uncovered."""
    instance = config.source.instance()
    stats = _run_trials(config, need={"no-pattern-witness", "uncovered-run"})
    rows = []
    many = len(instance.spans) > 1
    for i, successes in enumerate(stats.span_events):
        name = f"no-pattern-witness-{i}" if many else "no-pattern-witness"
        rows.append(_mc_row(config, name, successes, n=config.source.n))
    rows.append(_mc_row(config, "uncovered-run", stats.uncovered, n=config.source.n))
    return rows


def estimate_mr_error(config: ExperimentConfig) -> EstimateRow:
    """Fraction of trials where run-alignment reconstruction misses the
    source; coverage implying success is asserted on every trial."""
    stats = _run_trials(config, need={"reconstruction-error"})
    return _mc_row(config, "reconstruction-error", stats.mr_errors, n=config.source.n)


@dataclass(frozen=True)
class AuditReport:
    trials: int
    counts: dict[str, int]
    offenders: tuple[tuple[int, str], ...]
    rows: tuple[EstimateRow, ...]

    @property
    def ok(self) -> bool:
        return all(v == 0 for v in self.counts.values())

    def summary(self) -> str:
        lines = [f"audit trials: {self.trials}"]
        lines.extend(f"audit {name}: {count}" for name, count in self.counts.items())
        lines.extend(f"offender trial={t} check={name}" for t, name in self.offenders)
        lines.append(f"audit result: {'pass' if self.ok else 'FAIL'}")
        return "\n".join(lines) + "\n"


def audit_implications(config: ExperimentConfig) -> AuditReport:
    """Run every estimator on shared seeds and count implication breaches:
    an event that forbids sufficiency alongside a sufficient verdict, run
    coverage alongside a reconstruction miss, and a structural ambiguity
    whose competing source fails to embed some trace."""
    stats = _run_trials(config, need=set(ESTIMATORS), audit=True)
    n = config.source.n
    rows = [
        _mc_row(config, "difficulty", stats.insufficient, n=n),
        _mc_row(config, "no-pattern-witness", stats.span_events[0], n=n),
        _mc_row(config, "uncovered-run", stats.uncovered, n=n),
        _mc_row(config, "reconstruction-error", stats.mr_errors, n=n),
    ]
    return AuditReport(
        trials=config.trials,
        counts=dict(stats.audit_counts),
        offenders=tuple(stats.offenders),
        rows=tuple(rows),
    )


# ---------------------------------------------------------------------------
# formula modes

def _trace_count_of(config: ExperimentConfig, n: int) -> tuple[TraceCount, int | float, float | None]:
    """Resolve the trace count plus the CSV (T_or_c, a) pair."""
    if config.traces is not None:
        return TraceCount.integer(config.traces), config.traces, None
    c, a = config.schedule
    return TraceCount.exponential(c, n, a), c, a


def _formula_rows(config: ExperimentConfig) -> list[EstimateRow]:
    instance = config.source.instance()
    n = len(instance.s)
    count, t_or_c, a = _trace_count_of(config, n)
    rows = []
    for i, span in enumerate(instance.spans):
        report = prob_no_pattern_witness_exact(span.period, span.copies, config.p, count)
        name = f"no-pattern-witness-{i}" if len(instance.spans) > 1 else "no-pattern-witness"
        rows.append(EstimateRow(name, n, config.p, t_or_c, a, report.value,
                                report.ln_value, method=report.method))
    if len(instance.lengths) > MGF_MAX_RUNS:
        raise InfeasibleError(
            f"inclusion-exclusion over {len(instance.lengths)} runs exceeds the cap"
        )
    report = prob_uncovered_run_mgf(instance.lengths, config.p, count)
    rows.append(EstimateRow("uncovered-run", n, config.p, t_or_c, a, report.value,
                            report.ln_value, method=report.method))
    if config.traces is not None and config.traces <= DIRECT_SUM_MAX_TRACES:
        report = prob_uncovered_run_sum(instance.lengths, config.p, count)
        rows.append(EstimateRow("uncovered-run", n, config.p, t_or_c, a, report.value,
                                report.ln_value, method=report.method))
    return rows


def _asymptotic_rows(config: ExperimentConfig) -> list[EstimateRow]:
    c, a = config.schedule
    n = config.source.n
    count = TraceCount.exponential(c, n, a)
    if config.source.kind == "repeat":
        params = ThresholdParams(r=len(config.source.pattern), ell=config.source.ell, p=config.p)
        report = prob_no_pattern_witness_asymptotic(params, c, count)
        return [EstimateRow("no-pattern-witness", n, config.p, c, a, report.value,
                            report.ln_value, method=report.method)]
    fractions = config.source.run_fractions()
    report = prob_uncovered_run_asymptotic(fractions, config.p, c, count)
    return [EstimateRow("uncovered-run", n, config.p, c, a, report.value,
                        report.ln_value, method=report.method)]


def _regime(c: float, c_star: float) -> str:
    if abs(c - c_star) <= 1e-9 * max(1.0, abs(c_star)):
        return "at"
    return "below" if c < c_star else "above"


def sweep_threshold(config: ExperimentConfig) -> tuple[list[EstimateRow], list[str]]:
    """Exact and asymptotic probabilities over the (c, n) grid, each row
    labeled by its position against the critical rate.  Formula evaluation
    on real-valued copy counts and run lengths, not rounded instances."""
    source = config.source
    a = config.sweep_a
    rows: list[EstimateRow] = []
    regimes: list[str] = []
    if source.kind == "repeat":
        r = len(source.pattern)
        c_star = critical_rate(r, source.ell, config.p)
        params = ThresholdParams(r=r, ell=source.ell, p=config.p)
        for c in config.c_grid:
            for n in config.n_grid:
                count = TraceCount.exponential(c, n, a)
                label = _regime(c, c_star)
                exact = prob_no_pattern_witness_exact(r, source.ell * n**source.copy_exponent,
                                                      config.p, count)
                rows.append(EstimateRow("no-pattern-witness", n, config.p, c, a,
                                        exact.value, exact.ln_value, method=exact.method))
                regimes.append(label)
                asym = prob_no_pattern_witness_asymptotic(params, c, count)
                rows.append(EstimateRow("no-pattern-witness", n, config.p, c, a,
                                        asym.value, asym.ln_value, method=asym.method))
                regimes.append(label)
        return rows, regimes
    fractions = source.run_fractions()
    c_star = critical_rate(1, max(fractions), config.p)
    for c in config.c_grid:
        for n in config.n_grid:
            count = TraceCount.exponential(c, n, a)
            label = _regime(c, c_star)
            lengths = [frac * n for frac in fractions]
            exact = prob_uncovered_run_mgf(lengths, config.p, count)
            rows.append(EstimateRow("uncovered-run", n, config.p, c, a,
                                    exact.value, exact.ln_value, method=exact.method))
            regimes.append(label)
            asym = prob_uncovered_run_asymptotic(fractions, config.p, c, count)
            rows.append(EstimateRow("uncovered-run", n, config.p, c, a,
                                    asym.value, asym.ln_value, method=asym.method))
            regimes.append(label)
    return rows, regimes


def _generate_text(config: ExperimentConfig) -> str:
    instance = config.source.instance()
    lines = [str(instance.s)]
    for span in instance.spans:
        lines.append(f"span offset={span.offset} period={span.period} copies={span.copies}")
    lines.append(
        "runs first_bit=%d lengths=%s" % (instance.first_bit, ",".join(map(str, instance.lengths)))
    )
    return "\n".join(lines) + "\n"


def run_mode(config: ExperimentConfig) -> int:
    """Execute a parsed config end to end; returns the process exit code."""
    if config.mode == "generate":
        write_outputs(config, _generate_text(config))
        return 0
    if config.mode == "exact":
        write_outputs(config, rows_to_csv(_formula_rows(config)))
        return 0
    if config.mode == "asymptotic":
        write_outputs(config, rows_to_csv(_asymptotic_rows(config)))
        return 0
    if config.mode == "sweep":
        rows, regimes = sweep_threshold(config)
        write_outputs(config, rows_to_csv(rows, regimes))
        return 0
    if config.mode == "montecarlo":
        wanted = _simulation_estimators(config)
        stats = _run_trials(config, need=set(wanted))
        n = config.source.n
        rows = []
        for name in wanted:
            if name == "difficulty":
                rows.append(_mc_row(config, "difficulty", stats.insufficient, n=n))
            elif name == "no-pattern-witness":
                rows.append(_mc_row(config, "no-pattern-witness", stats.span_events[0], n=n))
            elif name == "uncovered-run":
                rows.append(_mc_row(config, "uncovered-run", stats.uncovered, n=n))
            else:
                rows.append(_mc_row(config, "reconstruction-error", stats.mr_errors, n=n))
        write_outputs(config, rows_to_csv(rows))
        return 0
    report = audit_implications(config)
    write_outputs(config, rows_to_csv(report.rows))
    print(report.summary(), end="")
    return 0 if report.ok else 4
