"""Seeded Monte Carlo experiments over a dimension grid, with trend and
distribution checks against the asymptotic predictions.

A plan fixes the model, noise law, (d, n) grid, replicate count, and seed;
the run produces per-(grid point, metric) summaries plus the raw samples
needed for distributional tests.  Aggregation order is fixed by the plan, so
identical plans serialize byte-for-byte identically.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from io import StringIO

import numpy as np
from scipy.special import gammainc

from .asymptotics import (
    ChiSqOverN,
    EigenvalueLimit,
    RegimeVerdict,
    SpikeStructure,
    SUBSPACE_CONSISTENT,
    STRONGLY_INCONSISTENT,
    CONSISTENT,
    TailConstant,
    spike_structure_from_model,
)
from .dual import (
    angle,
    dual_decompose,
    inner_products,
    recover_directions,
    scaled_dual_deviation,
    subspace_angle,
)
from .errors import ConfigError, ExperimentError, InsufficientDataError, RankDeficiencyError
from .sampling import NoiseSpec, SeedSpec, distance_stats, sample_z, synthesize_x
from .spectra import CovarianceModel

SPEC_VERSION = "1"

METRIC_ANGLES = "angles"
METRIC_SUBSPACE = "subspace_angles"
METRIC_EIGRATIOS = "eigenvalue_ratios"
METRIC_DEVIATION = "dual_deviation"
METRIC_DISTANCES = "distance_stats"
ALL_METRICS = frozenset(
    (METRIC_ANGLES, METRIC_SUBSPACE, METRIC_EIGRATIOS, METRIC_DEVIATION, METRIC_DISTANCES)
)

TO_ZERO = "to_zero"
TO_RIGHT_ANGLE = "to_right_angle"
FLAT = "flat"
INCONCLUSIVE = "inconclusive"

TARGET_ZERO = "zero"
TARGET_RIGHT_ANGLE = "right_angle"

KS_LEVEL = 0.01
_KS_C001 = 1.628  # asymptotic critical coefficient at level 0.01

CSV_HEADER = "d,metric,q05,q25,q50,q75,q95,mean,sd,n_rep,failures"

_MAX_FAILURE_RATE = 0.05


@dataclass(frozen=True)
class ExperimentPlan:
    """Monte Carlo configuration over a d-grid (and optionally an n-grid)."""

    model: CovarianceModel
    noise: NoiseSpec
    n: tuple[int, ...]
    d_grid: tuple[int, ...]
    replicates: int
    seed: SeedSpec
    metrics: frozenset[str]
    tracked_groups: tuple[tuple[int, ...], ...] = ()
    angle_indices: tuple[int, ...] = ()
    angle_ceiling_deg: float = 10.0
    right_angle_floor_deg: float = 80.0
    deviation_ceiling: float = 0.1
    flat_band_deg: float = 2.0

    def __post_init__(self):
        n = (int(self.n),) if isinstance(self.n, (int, np.integer)) else tuple(int(v) for v in self.n)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "d_grid", tuple(int(d) for d in self.d_grid))
        object.__setattr__(self, "metrics", frozenset(self.metrics))
        object.__setattr__(
            self, "tracked_groups", tuple(tuple(int(j) for j in g) for g in self.tracked_groups)
        )
        object.__setattr__(self, "angle_indices", tuple(int(i) for i in self.angle_indices))

        if not self.n or any(v < 2 for v in self.n):
            raise ConfigError("sample sizes must all be >= 2")
        if any(a >= b for a, b in zip(self.n, self.n[1:])):
            raise ConfigError("n grid must be strictly increasing")
        if not self.d_grid or any(a >= b for a, b in zip(self.d_grid, self.d_grid[1:])):
            raise ConfigError("d_grid must be nonempty and strictly increasing")
        if max(self.n) >= min(self.d_grid):
            raise ConfigError("HDLSS experiments need max(n) < min(d_grid)")
        if self.replicates < 0:
            raise ConfigError("replicates must be nonnegative")
        unknown = self.metrics - ALL_METRICS
        if unknown:
            raise ConfigError(f"unknown metrics {sorted(unknown)}")
        if METRIC_ANGLES in self.metrics and not self.angle_indices:
            object.__setattr__(self, "angle_indices", tuple(range(1, min(5, min(self.n)) + 1)))
        if any(i < 1 or i > min(self.n) for i in self.angle_indices):
            raise ConfigError("angle indices must lie in 1..min(n)")
        for g in self.tracked_groups:
            if not g or any(j < 1 or j > min(self.n) for j in g):
                raise ConfigError("tracked groups must be nonempty within 1..min(n)")
        if METRIC_SUBSPACE in self.metrics and not self.tracked_groups:
            raise ConfigError("subspace_angles metric needs tracked_groups")

    @property
    def n_grid(self) -> tuple[int, ...]:
        return self.n

    def directions_needed(self) -> int:
        needed = list(self.angle_indices)
        for g in self.tracked_groups:
            needed.extend(g)
        return max(needed, default=0)

    def metric_label(self, metric: str, n: int) -> str:
        return f"{metric}[n={n}]" if len(self.n) > 1 else metric


@dataclass(frozen=True)
class ReportRow:
    d: int
    n: int
    metric: str
    label: str
    q05: float
    q25: float
    q50: float
    q75: float
    q95: float
    mean: float
    sd: float
    n_rep: int
    failures: int


@dataclass(frozen=True)
class AggregateReport:
    """Per-(grid point, metric) summaries plus retained raw samples."""

    d_grid: tuple[int, ...]
    n_grid: tuple[int, ...]
    replicates: int
    rows: tuple[ReportRow, ...]
    failures: dict
    samples: dict = field(repr=False)

    def row(self, d: int, metric: str, n: int | None = None) -> ReportRow:
        n = n if n is not None else self.n_grid[0]
        for r in self.rows:
            if r.d == d and r.n == n and r.metric == metric:
                return r
        raise KeyError(f"no report cell for d={d}, n={n}, metric={metric!r}")

    def median_series(self, metric: str, n: int | None = None) -> np.ndarray:
        """Median of a metric across the d-grid at fixed n."""
        return np.array([self.row(d, metric, n).q50 for d in self.d_grid])

    def median_over_n(self, metric: str, d: int) -> np.ndarray:
        return np.array([self.row(d, metric, n).q50 for n in self.n_grid])

    def sample(self, d: int, metric: str, n: int | None = None) -> np.ndarray:
        n = n if n is not None else self.n_grid[0]
        return self.samples[(d, n, metric)]

    def to_csv_text(self) -> str:
        out = StringIO()
        out.write(CSV_HEADER + "\n")
        for r in self.rows:
            stats = ",".join(
                _fmt(v) for v in (r.q05, r.q25, r.q50, r.q75, r.q95, r.mean, r.sd)
            )
            out.write(f"{r.d},{r.label},{stats},{r.n_rep},{r.failures}\n")
        return out.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv_text())

    def to_json_dict(self) -> dict:
        return {
            "spec_version": SPEC_VERSION,
            "d_grid": list(self.d_grid),
            "n_grid": list(self.n_grid),
            "replicates": self.replicates,
            "rows": [
                {
                    "d": r.d,
                    "n": r.n,
                    "metric": r.metric,
                    "q05": r.q05,
                    "q25": r.q25,
                    "q50": r.q50,
                    "q75": r.q75,
                    "q95": r.q95,
                    "mean": r.mean,
                    "sd": r.sd,
                    "n_rep": r.n_rep,
                    "failures": r.failures,
                }
                for r in self.rows
            ],
            "failures": {f"d={d},n={n}": c for (d, n), c in sorted(self.failures.items())},
        }


def _fmt(v: float) -> str:
    return f"{v:.12g}"


def _metric_names(plan: ExperimentPlan, structure: SpikeStructure | None, n: int) -> list[str]:
    names = []
    if METRIC_ANGLES in plan.metrics:
        names.extend(f"angle_u{i}" for i in plan.angle_indices)
    if METRIC_SUBSPACE in plan.metrics:
        for li, group in enumerate(plan.tracked_groups, start=1):
            names.extend(f"subspace_angle_g{li}_u{i}" for i in group)
    if METRIC_EIGRATIOS in plan.metrics and structure is not None:
        for members in structure.group_index_sets():
            for i in members:
                names.append(f"spike_ratio_{i}")
                names.append(f"pop_ratio_{i}")
        names.extend(f"tail_ratio_{i}" for i in range(structure.kappa + 1, n + 1))
    if METRIC_DEVIATION in plan.metrics:
        names.append("dual_deviation")
    if METRIC_DISTANCES in plan.metrics:
        names.extend(("scaled_norm", "scaled_pairdist"))
    return names


def _run_cell(plan: ExperimentPlan, d: int, n: int) -> tuple[dict, int]:
    """All replicates for one (d, n) grid point; returns samples and failures."""
    structure = None
    if METRIC_EIGRATIOS in plan.metrics:
        structure = spike_structure_from_model(plan.model, n)
    names = _metric_names(plan, structure, n)
    acc: dict[str, list] = {name: [] for name in names}
    spectrum = plan.model.eigenvalues(d)
    exponents = {}
    if structure is not None:
        for group, members in zip(structure.groups, structure.group_index_sets()):
            for i in members:
                exponents[i] = group.alpha

    r_needed = plan.directions_needed()
    tracked = sorted(
        set(plan.angle_indices) | {j for g in plan.tracked_groups for j in g}
    )
    failures = 0
    for rep in range(plan.replicates):
        try:
            z = sample_z(plan.noise, d, n, plan.seed, replicate=rep)
            x = synthesize_x(plan.model, z)
            dual = dual_decompose(x)
            if r_needed:
                dirs = recover_directions(x, dual, r_needed)
                rows = inner_products(dirs, plan.model, d, tracked)
        except (RankDeficiencyError, np.linalg.LinAlgError):
            failures += 1
            continue

        if METRIC_ANGLES in plan.metrics:
            for i in plan.angle_indices:
                acc[f"angle_u{i}"].append(np.degrees(angle(rows.row(i)[i - 1])))
        if METRIC_SUBSPACE in plan.metrics:
            for li, group in enumerate(plan.tracked_groups, start=1):
                for i in group:
                    acc[f"subspace_angle_g{li}_u{i}"].append(
                        np.degrees(subspace_angle(rows, i, group))
                    )
        if METRIC_EIGRATIOS in plan.metrics:
            w = dual.eigenvalues
            for i, alpha in exponents.items():
                acc[f"spike_ratio_{i}"].append(w[i - 1] / float(d) ** alpha)
                acc[f"pop_ratio_{i}"].append(w[i - 1] / spectrum.value(i))
            for i in range(structure.kappa + 1, n + 1):
                acc[f"tail_ratio_{i}"].append(w[i - 1] / d)
        if METRIC_DEVIATION in plan.metrics:
            acc["dual_deviation"].append(scaled_dual_deviation(dual))
        if METRIC_DISTANCES in plan.metrics:
            stats = distance_stats(x)
            acc["scaled_norm"].extend(stats.scaled_norms)
            acc["scaled_pairdist"].extend(stats.scaled_pair_distances)

    if plan.replicates and failures / plan.replicates > _MAX_FAILURE_RATE:
        raise ExperimentError(
            f"{failures}/{plan.replicates} replicates failed at d={d}, n={n}"
        )
    return {name: np.asarray(vals) for name, vals in acc.items()}, failures


def run_experiment(plan: ExperimentPlan, jobs: int = 1, progress=None) -> AggregateReport:
    """Execute the plan: per replicate sample Z, synthesize X, dual-decompose,
    recover directions, and record the requested metrics.

    Replicate streams are derived from (replicate, column) keys, so results do
    not depend on execution order or on ``jobs``.  Failed replicates
    (rank-deficient draws) are excluded with accounting; more than 5% failures
    at any grid point aborts the experiment.  ``progress(d, n, failures)`` is
    called as each grid point completes, in plan order.
    """
    cells = [(d, n) for d in plan.d_grid for n in plan.n_grid]
    results: dict[tuple[int, int], tuple[dict, int]] = {}
    if jobs > 1 and len(cells) > 1 and plan.replicates > 0:
        with ProcessPoolExecutor(max_workers=min(jobs, len(cells))) as pool:
            futures = {cell: pool.submit(_run_cell, plan, *cell) for cell in cells}
            for cell in cells:
                results[cell] = futures[cell].result()
                if progress is not None:
                    progress(*cell, results[cell][1])
    else:
        for cell in cells:
            results[cell] = _run_cell(plan, *cell)
            if progress is not None:
                progress(*cell, results[cell][1])

    rows: list[ReportRow] = []
    samples: dict = {}
    failures: dict = {}
    for d in plan.d_grid:
        labelled: list[tuple[str, int, str]] = []
        for n in plan.n_grid:
            acc, failed = results[(d, n)]
            failures[(d, n)] = failed
            for metric, vals in acc.items():
                samples[(d, n, metric)] = vals
                labelled.append((plan.metric_label(metric, n), n, metric))
        for label, n, metric in sorted(labelled):
            vals = samples[(d, n, metric)]
            if vals.size == 0:
                continue
            q = np.quantile(vals, [0.05, 0.25, 0.5, 0.75, 0.95])
            rows.append(
                ReportRow(
                    d=d,
                    n=n,
                    metric=metric,
                    label=label,
                    q05=float(q[0]),
                    q25=float(q[1]),
                    q50=float(q[2]),
                    q75=float(q[3]),
                    q95=float(q[4]),
                    mean=float(vals.mean()),
                    sd=float(vals.std(ddof=1)) if vals.size > 1 else 0.0,
                    n_rep=plan.replicates - failures[(d, n)],
                    failures=failures[(d, n)],
                )
            )
    return AggregateReport(
        d_grid=plan.d_grid,
        n_grid=plan.n_grid,
        replicates=plan.replicates,
        rows=tuple(rows),
        failures=failures,
        samples=samples,
    )


# ---------------------------------------------------------------------------
# Kolmogorov-Smirnov
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KsResult:
    statistic: float
    critical_value: float
    rejected: bool
    kind: str
    level: float = KS_LEVEL

    @property
    def consistent_with_reference(self) -> bool:
        return not self.rejected


def ks_statistic(samples, reference) -> KsResult:
    """One-sample KS against chi-square(n)/n, or two-sample KS against a
    reference sample, with the asymptotic level-0.01 critical value."""
    x = np.sort(np.asarray(samples, dtype=float))
    m = x.size
    if m < 30:
        raise InsufficientDataError(f"need at least 30 samples, got {m}")
    if isinstance(reference, ChiSqOverN):
        cdf = gammainc(reference.n / 2.0, np.maximum(x / reference.scale, 0.0) * reference.n / 2.0)
        grid = np.arange(1, m + 1) / m
        d_stat = float(np.max(np.maximum(grid - cdf, cdf - (grid - 1.0 / m))))
        crit = _KS_C001 / np.sqrt(m)
        return KsResult(d_stat, crit, d_stat > crit, kind="one_sample")
    y = np.sort(np.asarray(reference, dtype=float))
    m2 = y.size
    if m2 < 30:
        raise InsufficientDataError(f"need at least 30 reference samples, got {m2}")
    allv = np.concatenate([x, y])
    cdf1 = np.searchsorted(x, allv, side="right") / m
    cdf2 = np.searchsorted(y, allv, side="right") / m2
    d_stat = float(np.max(np.abs(cdf1 - cdf2)))
    crit = _KS_C001 * np.sqrt((m + m2) / (m * m2))
    return KsResult(d_stat, crit, d_stat > crit, kind="two_sample")


# ---------------------------------------------------------------------------
# trend decisions and prediction verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrendDecision:
    metric: str
    direction: str
    evidence: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "direction": self.direction,
            "evidence": list(self.evidence),
        }


def trend_verdict(
    median_series,
    target: str = TARGET_ZERO,
    *,
    ceiling: float = 10.0,
    floor: float = 80.0,
    flat_band: float = 2.0,
    metric: str = "",
) -> TrendDecision:
    """Finite-grid reading of a limit statement.

    ToZero needs a strictly decreasing median series ending below the ceiling;
    ToRightAngle symmetrically toward the floor; Flat means the series stays
    within the flat band of its median; anything else is inconclusive.
    """
    s = np.asarray(median_series, dtype=float)
    if s.size < 3:
        raise ConfigError("median series must cover at least 3 grid points")
    if target not in (TARGET_ZERO, TARGET_RIGHT_ANGLE):
        raise ConfigError(f"unknown target {target!r}")
    diffs = np.diff(s)
    if np.all(diffs < 0) and s[-1] < ceiling:
        direction = TO_ZERO
    elif np.all(diffs > 0) and s[-1] > floor:
        direction = TO_RIGHT_ANGLE
    elif np.max(np.abs(s - np.median(s))) < flat_band:
        direction = FLAT
    else:
        direction = INCONCLUSIVE
    return TrendDecision(metric=metric, direction=direction, evidence=tuple(float(v) for v in s))


@dataclass(frozen=True)
class CheckResult:
    name: str
    requirement: str
    observed: str
    passed: bool

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "requirement": self.requirement,
            "observed": self.observed,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {
            "spec_version": SPEC_VERSION,
            "passed": self.passed,
            "checks": [c.to_json() for c in self.checks],
        }


def _series_repr(series) -> str:
    return "[" + ", ".join(f"{v:.4g}" for v in series) + "]"


def verify_prediction(
    plan: ExperimentPlan,
    report: AggregateReport,
    verdict: RegimeVerdict,
    limits: tuple[EigenvalueLimit, ...] | None = None,
) -> VerificationReport:
    """Check the empirical trends and distributions against the predictions.

    Consistent directions must trend to zero angle, strongly inconsistent ones
    to the right angle, subspace-consistent groups to zero subspace angle
    (per-vector angles exempt); eigenvalue scalings must stabilize across the
    top decade, Gaussian singleton spikes must pass the chi-square KS check,
    and tail eigenvalues must land within 20% of their limit constant.
    """
    if len(verdict.directions) != max(plan.n_grid):
        raise ConfigError(
            f"verdict covers {len(verdict.directions)} directions, plan has n={max(plan.n_grid)}"
        )
    checks: list[CheckResult] = []
    n_ref = plan.n_grid[-1]
    multi_n = len(plan.n_grid) > 1
    d_max = plan.d_grid[-1]
    trend_metrics = {METRIC_DEVIATION, METRIC_ANGLES, METRIC_SUBSPACE} & plan.metrics
    if trend_metrics and not multi_n and len(plan.d_grid) >= 3:
        if plan.d_grid[-1] < 100 * plan.d_grid[0]:
            raise ConfigError("trend checks need a d_grid spanning at least two decades")
    kw = dict(
        ceiling=plan.angle_ceiling_deg,
        floor=plan.right_angle_floor_deg,
        flat_band=plan.flat_band_deg,
    )

    if METRIC_DEVIATION in plan.metrics and len(plan.d_grid) >= 3:
        series = report.median_series("dual_deviation", n=n_ref)
        dec = trend_verdict(series, TARGET_ZERO, ceiling=plan.deviation_ceiling,
                            floor=plan.right_angle_floor_deg, flat_band=np.inf,
                            metric="dual_deviation")
        checks.append(
            CheckResult(
                name="dual_deviation_to_zero",
                requirement=f"strictly decreasing, final < {plan.deviation_ceiling}",
                observed=f"{dec.direction} {_series_repr(series)}",
                passed=dec.direction == TO_ZERO,
            )
        )

    if METRIC_ANGLES in plan.metrics and not multi_n and len(plan.d_grid) >= 3:
        for i in plan.angle_indices:
            dv = verdict.by_index(i)
            series = report.median_series(f"angle_u{i}", n=n_ref)
            if dv.kind == CONSISTENT:
                dec = trend_verdict(series, TARGET_ZERO, metric=f"angle_u{i}", **kw)
                checks.append(
                    CheckResult(
                        name=f"angle_u{i}_to_zero",
                        requirement=f"strictly decreasing, final < {plan.angle_ceiling_deg} deg",
                        observed=f"{dec.direction} {_series_repr(series)}",
                        passed=dec.direction == TO_ZERO,
                    )
                )
            elif dv.kind == STRONGLY_INCONSISTENT:
                dec = trend_verdict(series, TARGET_RIGHT_ANGLE, metric=f"angle_u{i}", **kw)
                checks.append(
                    CheckResult(
                        name=f"angle_u{i}_to_right_angle",
                        requirement=f"strictly increasing, final > {plan.right_angle_floor_deg} deg",
                        observed=f"{dec.direction} {_series_repr(series)}",
                        passed=dec.direction == TO_RIGHT_ANGLE,
                    )
                )
            # subspace-consistent directions: per-vector angles are exempt

    if METRIC_SUBSPACE in plan.metrics and not multi_n and len(plan.d_grid) >= 3:
        for li, group in enumerate(plan.tracked_groups, start=1):
            for i in group:
                dv = verdict.by_index(i)
                if dv.kind not in (CONSISTENT, SUBSPACE_CONSISTENT) or tuple(dv.group) != group:
                    raise ConfigError(
                        f"tracked group {group} does not match the verdict group for direction {i}"
                    )
                series = report.median_series(f"subspace_angle_g{li}_u{i}", n=n_ref)
                dec = trend_verdict(series, TARGET_ZERO, metric=f"subspace_angle_g{li}_u{i}", **kw)
                checks.append(
                    CheckResult(
                        name=f"subspace_g{li}_u{i}_to_zero",
                        requirement=f"strictly decreasing, final < {plan.angle_ceiling_deg} deg",
                        observed=f"{dec.direction} {_series_repr(series)}",
                        passed=dec.direction == TO_ZERO,
                    )
                )

    if METRIC_EIGRATIOS in plan.metrics and limits is not None:
        by_index = {lim.i: lim for lim in limits}
        for i, lim in sorted(by_index.items()):
            if isinstance(lim.law, TailConstant):
                continue
            if len(plan.d_grid) >= 2:
                top = report.row(plan.d_grid[-1], f"spike_ratio_{i}", n=n_ref).q50
                prev = report.row(plan.d_grid[-2], f"spike_ratio_{i}", n=n_ref).q50
                ratio = top / prev if prev > 0 else np.inf
                checks.append(
                    CheckResult(
                        name=f"spike_ratio_{i}_stable",
                        requirement="top-decade median ratio in [0.5, 2]",
                        observed=f"medians {prev:.4g} -> {top:.4g}, ratio {ratio:.3g}",
                        passed=bool(0.5 <= ratio <= 2.0),
                    )
                )
            if isinstance(lim.law, ChiSqOverN):
                samples = report.sample(d_max, f"pop_ratio_{i}", n=n_ref)
                # distributional checks need >= 30 replicates by contract
                ks = ks_statistic(samples, ChiSqOverN(scale=1.0, n=n_ref))
                checks.append(
                    CheckResult(
                        name=f"pop_ratio_{i}_ks",
                        requirement=f"KS vs chi2({n_ref})/{n_ref} not rejected at level {KS_LEVEL}",
                        observed=f"D = {ks.statistic:.4f}, critical {ks.critical_value:.4f}",
                        passed=not ks.rejected,
                    )
                )
        tail_limits = [lim for lim in limits if isinstance(lim.law, TailConstant)]
        for lim in tail_limits:
            if lim.law.value <= 0:
                continue
            med = report.row(d_max, f"tail_ratio_{lim.i}", n=n_ref).q50
            rel = abs(med - lim.law.value) / lim.law.value
            checks.append(
                CheckResult(
                    name=f"tail_ratio_{lim.i}_near_limit",
                    requirement=f"median within 20% of K = {lim.law.value:.4g}",
                    observed=f"median {med:.4g}, relative error {rel:.3g}",
                    passed=bool(rel <= 0.2),
                )
            )

    if multi_n and METRIC_ANGLES in plan.metrics:
        for i in plan.angle_indices:
            dv = verdict.by_index(i)
            if not dv.growing_n_consistent:
                continue
            series = report.median_over_n(f"angle_u{i}", d=d_max)
            decreasing = bool(np.all(np.diff(series) < 0))
            checks.append(
                CheckResult(
                    name=f"angle_u{i}_decreasing_in_n",
                    requirement="median angle strictly decreasing along the n grid",
                    observed=_series_repr(series),
                    passed=decreasing,
                )
            )

    if not checks:
        raise ConfigError("no checks could be derived from the plan and verdict")
    return VerificationReport(checks=tuple(checks))


def bimodal_split(samples) -> tuple[float, float, float]:
    """Split samples at the largest sorted gap: (low mean, high mean, separation)."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size < 4:
        raise InsufficientDataError("need at least 4 samples to split")
    gaps = np.diff(x)
    cut = int(np.argmax(gaps)) + 1
    lo, hi = x[:cut], x[cut:]
    return float(lo.mean()), float(hi.mean()), float(hi.mean() - lo.mean())
