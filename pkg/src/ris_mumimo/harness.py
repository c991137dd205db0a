"""Monte-Carlo driver, empirical CDF statistics and result files.

Trial ``t`` of a run with master seed ``s`` uses the channel seed
``mix(s, t)`` (see :mod:`ris_mumimo.seeding`), and every scheme of that trial
is evaluated on the same realization.  Results therefore do not depend on how
trials are distributed over worker processes.

Output directory layout::

    samples.csv        scheme,trial,sum_rate_bps_hz,selected_user,flag
    cdf_<SCHEME>.dat   "rate_bps_hz cdf" per line, ascending
    summary.json       percentiles per scheme plus the RunSpec that produced them
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import ScenarioConfig, generate_realization
from .errors import InvalidInputError
from .schemes import ALL_SCHEMES, RateSample, SchemeId, SdrParams, evaluate
from .seeding import MASK64, mix

log = logging.getLogger(__name__)

PERCENTILES = {"p05": 0.05, "p25": 0.25, "p50": 0.50, "p75": 0.75, "p95": 0.95}
PERCENTILE_CONVENTION = "lower empirical quantile: smallest sample x with F_n(x) >= p"
CSV_HEADER = ("scheme", "trial", "sum_rate_bps_hz", "selected_user", "flag")

# (smaller, larger) pairs that must hold on every trial
PAIRWISE_ORDER = (
    (SchemeId.DC, SchemeId.JT_UPPER),
    (SchemeId.FDMA, SchemeId.FDMA_US),
    (SchemeId.FDMA_US, SchemeId.TDMA),
    (SchemeId.TDMA, SchemeId.JT_UPPER),
    (SchemeId.JT, SchemeId.JT_UPPER),
    (SchemeId.OT, SchemeId.JT_UPPER),
    (SchemeId.TDMA, SchemeId.OT),
)
# absolute slack, in bit/s/Hz, for rounding in the pairwise checks
ORDER_SLACK = 1e-9


@dataclass(frozen=True)
class RunSpec:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    schemes: tuple = ALL_SCHEMES
    n_trials: int = 1000
    master_seed: int = 0
    sdr: SdrParams = field(default_factory=SdrParams)
    output_dir: str = "results"

    def __post_init__(self):
        schemes = tuple(SchemeId.parse(s) if isinstance(s, str) else SchemeId(s) for s in self.schemes)
        if not schemes:
            raise InvalidInputError("at least one scheme is required")
        if len(set(schemes)) != len(schemes):
            raise InvalidInputError("schemes must not repeat")
        if self.n_trials < 1:
            raise InvalidInputError("n_trials must be >= 1")
        object.__setattr__(self, "schemes", schemes)
        object.__setattr__(self, "master_seed", int(self.master_seed) & MASK64)
        object.__setattr__(self, "output_dir", str(self.output_dir))

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "schemes": [s.value for s in self.schemes],
            "n_trials": self.n_trials,
            "master_seed": self.master_seed,
            "sdr": dataclasses.asdict(self.sdr),
            "output_dir": self.output_dir,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunSpec":
        return cls(
            scenario=ScenarioConfig.from_dict(data["scenario"]),
            schemes=tuple(data["schemes"]),
            n_trials=data["n_trials"],
            master_seed=data["master_seed"],
            sdr=SdrParams(**data["sdr"]),
            output_dir=data["output_dir"],
        )


@dataclass(frozen=True)
class CdfSummary:
    scheme: SchemeId
    sorted_samples: np.ndarray
    percentiles: dict

    @property
    def median(self) -> float:
        return self.percentiles["p50"]


def trial_seed(master_seed: int, trial: int) -> int:
    return mix(master_seed, trial)


def run_trial(spec: RunSpec, trial: int) -> list[RateSample]:
    seed = trial_seed(spec.master_seed, trial)
    realization = generate_realization(spec.scenario, seed)
    power, noise = spec.scenario.ue_power_watts, spec.scenario.noise_power
    return [evaluate(s, realization, power, noise, seed, spec.sdr, trial) for s in spec.schemes]


def _run_chunk(args):
    spec, trials = args
    return [run_trial(spec, t) for t in trials]


def run_monte_carlo(spec: RunSpec, workers: int = 1, progress=None) -> list[RateSample]:
    """Evaluate every scheme on ``spec.n_trials`` paired realizations.

    Samples come back ordered by trial, then by the order of
    ``spec.schemes``.  ``workers > 1`` spreads trials over processes.
    """
    trials = range(spec.n_trials)
    out: list[RateSample] = []
    if workers <= 1:
        for t in trials:
            out.extend(run_trial(spec, t))
            if progress:
                progress(t + 1, spec.n_trials)
        return out
    chunk = max(1, math.ceil(spec.n_trials / (workers * 8)))
    jobs = [(spec, list(trials[i:i + chunk])) for i in range(0, spec.n_trials, chunk)]
    done = 0
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for block in pool.map(_run_chunk, jobs):
            for samples in block:
                out.extend(samples)
            done += len(block)
            if progress:
                progress(done, spec.n_trials)
    return out


def lower_quantile(sorted_samples: np.ndarray, p: float) -> float:
    """Smallest sample whose empirical CDF value ``i/n`` is at least ``p``."""
    n = len(sorted_samples)
    # tolerate p*n landing a hair above an integer
    i = max(1, math.ceil(p * n - 1e-9))
    return float(sorted_samples[i - 1])


def compute_cdf(samples, scheme: SchemeId | str = SchemeId.DC) -> CdfSummary:
    values = np.sort(np.asarray(
        [s.sum_rate_bps_hz if isinstance(s, RateSample) else s for s in samples], dtype=float
    ))
    if values.size == 0:
        raise InvalidInputError("cannot build a CDF from zero samples")
    pct = {name: lower_quantile(values, p) for name, p in PERCENTILES.items()}
    return CdfSummary(SchemeId(scheme), values, pct)


def summarize(samples: list[RateSample], schemes) -> dict:
    by_scheme = defaultdict(list)
    for s in samples:
        by_scheme[s.scheme].append(s.sum_rate_bps_hz)
    return {SchemeId(k): compute_cdf(by_scheme[SchemeId(k)], k) for k in schemes if by_scheme[SchemeId(k)]}


def samples_to_csv(samples: list[RateSample]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for s in samples:
        writer.writerow([
            s.scheme.value,
            s.trial,
            repr(float(s.sum_rate_bps_hz)),
            "" if s.selected_user is None else s.selected_user,
            s.flag,
        ])
    return buf.getvalue()


def read_samples(path) -> list[RateSample]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise InvalidInputError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            RateSample(
                SchemeId(row["scheme"]),
                int(row["trial"]),
                float(row["sum_rate_bps_hz"]),
                int(row["selected_user"]) if row["selected_user"] else None,
                row["flag"],
            )
            for row in reader
        ]


def cdf_lines(summary: CdfSummary) -> str:
    n = summary.sorted_samples.size
    rows = [f"{float(x)!r} {(i + 1) / n!r}" for i, x in enumerate(summary.sorted_samples)]
    return "# rate_bps_hz cdf\n" + "\n".join(rows) + "\n"


def summary_document(summaries: dict, spec: RunSpec, samples=None) -> dict:
    doc = {
        "percentile_convention": PERCENTILE_CONVENTION,
        "schemes": {
            k.value: {"n": int(v.sorted_samples.size), **v.percentiles} for k, v in summaries.items()
        },
        "run_spec": spec.to_dict(),
    }
    if samples is not None:
        doc["uncertified_samples"] = sum(1 for s in samples if s.flag)
    return doc


def emit_outputs(samples: list[RateSample], summaries: dict, spec: RunSpec) -> Path:
    out = Path(spec.output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "samples.csv").write_text(samples_to_csv(samples))
        for scheme, summary in summaries.items():
            (out / f"cdf_{scheme.value}.dat").write_text(cdf_lines(summary))
        doc = summary_document(summaries, spec, samples)
        (out / "summary.json").write_text(json.dumps(doc, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {out}: {exc}") from exc
    return out


def load_summary(path) -> dict:
    return json.loads(Path(path).read_text())


def order_violations(samples: list[RateSample], slack: float = ORDER_SLACK) -> list[str]:
    """Human-readable list of pairwise ordering violations, empty when all hold."""
    table = defaultdict(dict)
    for s in samples:
        table[s.trial][s.scheme] = s.sum_rate_bps_hz
    bad = []
    for trial in sorted(table):
        rates = table[trial]
        for lo, hi in PAIRWISE_ORDER:
            if lo in rates and hi in rates and rates[lo] > rates[hi] + slack:
                bad.append(f"trial {trial}: {lo.value}={rates[lo]!r} > {hi.value}={rates[hi]!r}")
        for name, rate in rates.items():
            if not (math.isfinite(rate) and rate >= 0):
                bad.append(f"trial {trial}: {name.value} rate {rate!r} is not finite and >= 0")
    return bad


def verify_output_dir(path) -> list[str]:
    """Re-check a results directory: pairwise order, CDF files, percentiles."""
    out = Path(path)
    samples = read_samples(out / "samples.csv")
    problems = order_violations(samples)
    summary = load_summary(out / "summary.json")
    for scheme, cdf in summarize(samples, {s.scheme for s in samples}).items():
        expected = summary["schemes"].get(scheme.value)
        if expected is None:
            problems.append(f"summary.json lacks {scheme.value}")
            continue
        for name, value in cdf.percentiles.items():
            if expected[name] != value:
                problems.append(f"{scheme.value} {name}: summary {expected[name]} != samples {value}")
        vals = [expected[k] for k in PERCENTILES]
        if any(a > b for a, b in zip(vals, vals[1:])):
            problems.append(f"{scheme.value}: percentiles not monotone")
        dat = out / f"cdf_{scheme.value}.dat"
        if not dat.exists():
            problems.append(f"missing {dat.name}")
            continue
        rows = np.loadtxt(dat, ndmin=2)
        if np.any(np.diff(rows[:, 0]) < 0) or np.any(np.diff(rows[:, 1]) <= 0) or rows[-1, 1] != 1.0:
            problems.append(f"{dat.name}: not a valid empirical CDF")
    return problems
