"""Asymptotic regime classification for spiked covariance spectra.

Given the spike bookkeeping (rates, limit constants, group sizes, tail
regularity) this module predicts, per sample PC direction, whether it is
consistent, subspace-consistent with its group span, or strongly
inconsistent as d grows at fixed n, together with the convergence mode,
the growing-n refinement, and the limiting law of each sample eigenvalue.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BoundaryUnsupportedError,
    ConfigError,
    UnsupportedStructureError,
)
from .spectra import (
    ANALYTIC,
    HOLDS,
    BlockEquicorrelation,
    ConditionVerdict,
    CovarianceModel,
    Equicorrelation,
    ExponentialDecay,
    GrowingSpikes,
    Identity,
    MultiSpikeGroups,
    PolynomialDecay,
    PowerLawRho,
    SingleSpike,
)

CONSISTENT = "consistent"
SUBSPACE_CONSISTENT = "subspace_consistent"
STRONGLY_INCONSISTENT = "strongly_inconsistent"

IN_PROBABILITY = "in_probability"
ALMOST_SURE = "almost_sure"

RHO_MIXING_BOUNDED4TH = "rho_mixing_bounded4th"
INDEPENDENT_BOUNDED8TH = "independent_bounded8th"
Z_ASSUMPTIONS = (RHO_MIXING_BOUNDED4TH, INDEPENDENT_BOUNDED8TH)


@dataclass(frozen=True)
class SpikeGroup:
    """A block of spike eigenvalues sharing one growth rate."""

    alpha: float
    c: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        if not self.c:
            raise ConfigError("spike group needs at least one limit constant")
        if any(x <= 0 for x in self.c):
            raise ConfigError("limit constants must be positive")
        if any(a < b for a, b in zip(self.c, self.c[1:])):
            raise ConfigError("limit constants within a group must be nonincreasing")

    @property
    def size(self) -> int:
        return len(self.c)

    @property
    def distinct(self) -> bool:
        return all(a > b for a, b in zip(self.c, self.c[1:]))


@dataclass(frozen=True)
class TailSpec:
    """Regularity of the non-spike eigenvalues."""

    epsilon_verdict: ConditionVerdict
    trace_linear: bool
    tail_limit: float  # K = lim (d n)^-1 * sum of tail eigenvalues

    def __post_init__(self):
        if self.tail_limit < 0:
            raise ConfigError("tail limit K must be nonnegative")


@dataclass(frozen=True)
class SpikeStructure:
    """Spike groups at strictly decreasing rates > 1, plus tail and noise facts."""

    groups: tuple[SpikeGroup, ...]
    tail: TailSpec
    n: int
    z_assumption: str = INDEPENDENT_BOUNDED8TH

    def __post_init__(self):
        object.__setattr__(self, "groups", tuple(self.groups))
        if self.n < 2:
            raise ConfigError("need n >= 2")
        if self.z_assumption not in Z_ASSUMPTIONS:
            raise ConfigError(f"unknown z assumption {self.z_assumption!r}")
        for g in self.groups:
            if g.alpha == 1.0:
                raise BoundaryUnsupportedError(
                    "spike rate exactly 1 sits on the consistency boundary and is unsupported"
                )
            if g.alpha < 1.0:
                raise UnsupportedStructureError(
                    f"spike rate {g.alpha} <= 1: fold this spike into the tail and "
                    "re-verify the tail epsilon-condition"
                )
        alphas = [g.alpha for g in self.groups]
        if any(a <= b for a, b in zip(alphas, alphas[1:])):
            raise UnsupportedStructureError(
                "group rates must be strictly decreasing; merge equal-rate spikes into one group"
            )
        if self.kappa >= self.n:
            raise ConfigError(f"total spike count {self.kappa} must stay below n={self.n}")

    @property
    def kappa(self) -> int:
        return sum(g.size for g in self.groups)

    def group_index_sets(self) -> list[tuple[int, ...]]:
        """J_l: consecutive 1-based index blocks, one per group."""
        sets, start = [], 1
        for g in self.groups:
            sets.append(tuple(range(start, start + g.size)))
            start += g.size
        return sets


@dataclass(frozen=True)
class DirectionVerdict:
    """Predicted asymptotic behavior of one sample PC direction."""

    i: int
    kind: str
    group: tuple[int, ...]
    growing_n_consistent: bool = False


@dataclass(frozen=True)
class RegimeVerdict:
    directions: tuple[DirectionVerdict, ...]
    mode: str

    def by_index(self, i: int) -> DirectionVerdict:
        return self.directions[i - 1]

    def to_json(self) -> dict:
        rows = []
        for dv in self.directions:
            row = {"i": dv.i, "verdict": dv.kind, "group": list(dv.group)}
            if dv.growing_n_consistent:
                row["growing_n_refinement"] = CONSISTENT
            rows.append(row)
        return {"directions": rows, "mode": self.mode}


def classify(structure: SpikeStructure) -> RegimeVerdict:
    """Per-direction consistency taxonomy for the given spike structure.

    Directions in singleton groups are consistent, members of larger groups
    converge to their group span, and everything past the spikes is strongly
    inconsistent.  Almost-sure convergence needs independent components with
    bounded eighth moments and an analytically certified strong tail
    condition; otherwise the mode stays in-probability.
    """
    tail = structure.tail
    if tail.epsilon_verdict.epsilon_condition != HOLDS:
        raise UnsupportedStructureError(
            "the tail epsilon-condition must hold for the regime taxonomy to apply"
        )
    if not tail.trace_linear:
        raise UnsupportedStructureError("the tail trace must grow at most linearly in d")

    directions: list[DirectionVerdict] = []
    for group, members in zip(structure.groups, structure.group_index_sets()):
        kind = CONSISTENT if group.size == 1 else SUBSPACE_CONSISTENT
        for i in members:
            directions.append(
                DirectionVerdict(
                    i=i, kind=kind, group=members, growing_n_consistent=group.distinct
                )
            )
    for i in range(structure.kappa + 1, structure.n + 1):
        directions.append(DirectionVerdict(i=i, kind=STRONGLY_INCONSISTENT, group=()))

    almost_sure = (
        structure.z_assumption == INDEPENDENT_BOUNDED8TH
        and tail.epsilon_verdict.strong_epsilon_condition == HOLDS
        and tail.epsilon_verdict.basis == ANALYTIC
    )
    return RegimeVerdict(
        directions=tuple(directions),
        mode=ALMOST_SURE if almost_sure else IN_PROBABILITY,
    )


# ---------------------------------------------------------------------------
# limiting eigenvalue laws
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledWishartEigen:
    """lambda-hat_i / d**exponent converges to the order-th largest eigenvalue
    of n^-1 C^(1/2) Z Z' C^(1/2); exactly Wishart(n, C)/n under Gaussian noise."""

    group: int
    order: int
    c_diag: tuple[float, ...]
    n: int
    gaussian: bool

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        k = len(self.c_diag)
        root = np.sqrt(np.asarray(self.c_diag))
        g = rng.standard_normal((size, k, self.n)) * root[None, :, None]
        mats = g @ np.swapaxes(g, 1, 2) / self.n
        eigs = np.linalg.eigvalsh(mats)  # ascending
        return eigs[:, k - self.order]


@dataclass(frozen=True)
class ChiSqOverN:
    """lambda-hat_i / lambda_i converges to chi-square(n)/n; as a d**alpha scale
    the limit is scale * chi-square(n)/n."""

    scale: float
    n: int

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self.scale * rng.chisquare(self.n, size=size) / self.n

    def cdf(self, x) -> np.ndarray:
        from scipy.special import gammainc

        x = np.asarray(x, dtype=float) / self.scale
        return gammainc(self.n / 2.0, np.maximum(x, 0.0) * self.n / 2.0)


@dataclass(frozen=True)
class TailConstant:
    """lambda-hat_i / d converges in probability to the constant K."""

    value: float


@dataclass(frozen=True)
class EigenvalueLimit:
    """Limiting law of the i-th sample eigenvalue under its natural scaling."""

    i: int
    exponent: float  # scaling d**exponent (1.0 for the tail block)
    law: ScaledWishartEigen | ChiSqOverN | TailConstant


def predict_eigenvalue_limits(
    structure: SpikeStructure, gaussian: bool = True
) -> tuple[EigenvalueLimit, ...]:
    """Limiting eigenvalue laws per index: group spikes scale like d**alpha_l with
    a Wishart-type eigenvalue limit (chi-square/n for Gaussian singletons), the
    remaining n - kappa eigenvalues scale like d with constant limit K."""
    limits: list[EigenvalueLimit] = []
    for gi, (group, members) in enumerate(
        zip(structure.groups, structure.group_index_sets()), start=1
    ):
        for order, i in enumerate(members, start=1):
            if gaussian and group.size == 1:
                law = ChiSqOverN(scale=group.c[0], n=structure.n)
            else:
                law = ScaledWishartEigen(
                    group=gi,
                    order=order,
                    c_diag=group.c,
                    n=structure.n,
                    gaussian=gaussian,
                )
            limits.append(EigenvalueLimit(i=i, exponent=group.alpha, law=law))
    for i in range(structure.kappa + 1, structure.n + 1):
        limits.append(
            EigenvalueLimit(i=i, exponent=1.0, law=TailConstant(structure.tail.tail_limit))
        )
    return tuple(limits)


def limits_to_json(limits) -> list[dict]:
    rows = []
    for lim in limits:
        law = lim.law
        if isinstance(law, ChiSqOverN):
            desc = {"law": "chi_sq_over_n", "scale": law.scale, "n": law.n}
        elif isinstance(law, ScaledWishartEigen):
            desc = {
                "law": "wishart_eigenvalue",
                "group": law.group,
                "order": law.order,
                "c_diag": list(law.c_diag),
                "n": law.n,
                "gaussian": law.gaussian,
            }
        else:
            desc = {"law": "tail_constant", "value": law.value}
        rows.append({"i": lim.i, "exponent": lim.exponent, **desc})
    return rows


# ---------------------------------------------------------------------------
# the four-way two-block regime table
# ---------------------------------------------------------------------------

TWO_BLOCK_LABELS = {
    1: "both_consistent",
    2: "both_subspace_consistent",
    3: "first_consistent_second_strongly_inconsistent",
    4: "both_strongly_inconsistent",
}


@dataclass(frozen=True)
class TwoBlockRegime:
    case: int
    label: str


def two_block_regime(rho1: PowerLawRho, rho2: PowerLawRho) -> TwoBlockRegime:
    """Regime of the two-block equicorrelation family from its power-law rules.

    Decay exponents are compared against the d**(-1/2) threshold and against
    each other; an exponent exactly 1/2 is a boundary the theory leaves open.
    """
    # ordering rho2 <= rho1 must hold eventually: rho1 decays no faster, and
    # at equal decay the scales must be ordered
    if rho1.gamma > rho2.gamma:
        raise ConfigError("rho1 must dominate rho2 for large d: need gamma1 <= gamma2")
    if rho1.gamma == rho2.gamma and rho2.r > rho1.r:
        raise ConfigError("equal decay exponents need r2 <= r1")
    for g in (rho1.gamma, rho2.gamma):
        if g == 0.5:
            raise BoundaryUnsupportedError(
                "decay exponent exactly 1/2 sits on the threshold and is unsupported"
            )
    g1, g2 = rho1.gamma, rho2.gamma
    if g1 > 0.5:
        case = 4
    elif g2 > 0.5:
        case = 3
    elif g1 == g2:
        case = 2
    else:
        case = 1
    return TwoBlockRegime(case=case, label=TWO_BLOCK_LABELS[case])


# ---------------------------------------------------------------------------
# Weyl eigenvalue sandwich (proof tool turned test oracle)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeylReport:
    passed: bool
    worst_violation: float
    tolerance: float


def weyl_check(a, b, tol_scale: float = 1e-10) -> WeylReport:
    """Verify every Weyl bound phi_{k+j}(A) + phi_{m-j}(B) <= phi_k(A+B) <=
    phi_{k-j}(A) + phi_{1+j}(B) for symmetric A, B of equal size m <= 16."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need equal square shapes, got {a.shape} and {b.shape}")
    m = a.shape[0]
    if m > 16:
        raise ValueError("weyl_check is limited to size <= 16")
    phi_a = np.sort(np.linalg.eigvalsh((a + a.T) / 2.0))[::-1]
    phi_b = np.sort(np.linalg.eigvalsh((b + b.T) / 2.0))[::-1]
    phi_s = np.sort(np.linalg.eigvalsh((a + b + a.T + b.T) / 2.0))[::-1]

    worst = 0.0
    for k in range(1, m + 1):
        mid = phi_s[k - 1]
        for j in range(0, m - k + 1):
            lower = phi_a[k + j - 1] + phi_b[m - j - 1]
            worst = max(worst, lower - mid)
        for j in range(0, k):
            upper = phi_a[k - j - 1] + phi_b[j]
            worst = max(worst, mid - upper)
    norm_a = max(abs(phi_a[0]), abs(phi_a[-1]))
    norm_b = max(abs(phi_b[0]), abs(phi_b[-1]))
    tol = tol_scale * (norm_a + norm_b)
    return WeylReport(passed=worst <= tol, worst_violation=worst, tolerance=tol)


# ---------------------------------------------------------------------------
# model -> structure derivation
# ---------------------------------------------------------------------------


def _tail_verdict_for(model: CovarianceModel, kappa: int) -> ConditionVerdict:
    verdict = model.analytic_condition(kappa + 1)
    if verdict is None:
        raise UnsupportedStructureError(
            f"{model.family} has no analytic tail classification"
        )
    return verdict


def spike_structure_from_model(
    model: CovarianceModel,
    n: int,
    noise_z_assumption: str = INDEPENDENT_BOUNDED8TH,
) -> SpikeStructure:
    """Derive the spike bookkeeping of a model family at sample size n.

    Spikes with rate below 1 are folded into the tail (with the tail
    condition re-derived for the enlarged tail); a rate exactly 1 is a
    boundary error.  Families whose spike count grows with d have no valid
    structure.
    """
    if isinstance(model, Identity):
        return SpikeStructure(
            groups=(),
            tail=TailSpec(_tail_verdict_for(model, 0), True, 1.0 / n),
            n=n,
            z_assumption=noise_z_assumption,
        )

    if isinstance(model, SingleSpike):
        groups = _keep_or_fold([(model.alpha, (model.c1,))])
        kappa = sum(len(c) for _, c in groups)
        return SpikeStructure(
            groups=tuple(SpikeGroup(a, c) for a, c in groups),
            tail=TailSpec(_tail_verdict_for(model, kappa), True, model.base / n),
            n=n,
            z_assumption=noise_z_assumption,
        )

    if isinstance(model, MultiSpikeGroups):
        groups = _keep_or_fold(list(model.groups))
        kappa = sum(len(c) for _, c in groups)
        return SpikeStructure(
            groups=tuple(SpikeGroup(a, c) for a, c in groups),
            tail=TailSpec(_tail_verdict_for(model, kappa), True, model.base / n),
            n=n,
            z_assumption=noise_z_assumption,
        )

    if isinstance(model, Equicorrelation):
        alpha = model.spike_exponent()
        groups = _keep_or_fold([(alpha, (model.rho.r**2,))])
        kappa = sum(len(c) for _, c in groups)
        k_tail = (1.0 - model.rho.limit) ** 2 / n
        return SpikeStructure(
            groups=tuple(SpikeGroup(a, c) for a, c in groups),
            tail=TailSpec(_tail_verdict_for(model, kappa), True, k_tail),
            n=n,
            z_assumption=noise_z_assumption,
        )

    if isinstance(model, BlockEquicorrelation):
        a1, a2 = model.spike_exponents()
        # ambient d is twice the block size; the block spike (m rho)^2 reads as
        # (r^2 / 4^(1-gamma)) * d^(2(1-gamma)) in ambient dimension
        c1 = model.rho1.r**2 / 4.0 ** (1.0 - model.rho1.gamma)
        c2 = model.rho2.r**2 / 4.0 ** (1.0 - model.rho2.gamma)
        if a1 == a2:
            raw = [(a1, (max(c1, c2), min(c1, c2)))]
        else:
            raw = [(a1, (c1,)), (a2, (c2,))]
        groups = _keep_or_fold(raw)
        kappa = sum(len(c) for _, c in groups)
        k_tail = ((1.0 - model.rho1.limit) ** 2 + (1.0 - model.rho2.limit) ** 2) / (2.0 * n)
        return SpikeStructure(
            groups=tuple(SpikeGroup(a, c) for a, c in groups),
            tail=TailSpec(_tail_verdict_for(model, kappa), True, k_tail),
            n=n,
            z_assumption=noise_z_assumption,
        )

    if isinstance(model, PolynomialDecay):
        k_tail = 1.0 / n if model.beta == 0.0 else 0.0
        return SpikeStructure(
            groups=(),
            tail=TailSpec(_tail_verdict_for(model, 0), True, k_tail),
            n=n,
            z_assumption=noise_z_assumption,
        )

    if isinstance(model, ExponentialDecay):
        # trace converges, so the epsilon-condition fails; classify() will refuse
        return SpikeStructure(
            groups=(),
            tail=TailSpec(_tail_verdict_for(model, 0), True, 0.0),
            n=n,
            z_assumption=noise_z_assumption,
        )

    if isinstance(model, GrowingSpikes):
        raise UnsupportedStructureError(
            "growing_spikes has a spike count that grows with d; no fixed spike structure exists"
        )

    raise UnsupportedStructureError(f"{model.family} has no spike structure")


def _keep_or_fold(raw_groups):
    """Keep groups with rate > 1, fold rate < 1 into the tail, reject rate 1."""
    kept = []
    for alpha, c in raw_groups:
        if alpha == 1.0:
            raise BoundaryUnsupportedError(
                "spike rate exactly 1 sits on the consistency boundary and is unsupported"
            )
        if alpha > 1.0:
            kept.append((alpha, tuple(c)))
    return kept
