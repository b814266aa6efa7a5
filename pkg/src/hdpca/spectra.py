"""Covariance spectrum families and sphericity-based regularity checks.

Each model family describes a d-indexed sequence of population covariance
spectra with closed-form eigenvalues and, where the family is not diagonal,
closed-form leading eigenvectors plus a deterministic orthonormal tail
completion.  Spectra are kept in a compact run-length form so that sums over
the tail are O(number of runs) regardless of d.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    InvalidDimensionError,
    InvalidIndexError,
    UndefinedSphericityError,
    UnsupportedEigenvectorError,
)

# mixing attribute of the sphered components (analytic metadata, not enforced)
INDEPENDENT = "independent_components"
RHO_MIXING = "rho_mixing_under_permutation"
NOT_RHO_MIXING = "not_rho_mixing"
MIXING_VALUES = (INDEPENDENT, RHO_MIXING, NOT_RHO_MIXING)

HOLDS = "holds"
FAILS = "fails"
UNKNOWN = "unknown"

ANALYTIC = "analytic"
NUMERIC_TREND = "numeric_trend"

_UNIT_NORM_TOL = 1e-8


@dataclass(frozen=True)
class PowerLawRho:
    """Correlation rule rho(d) = r * d**(-gamma); gamma = 0 gives a constant."""

    r: float
    gamma: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.r):
            raise ConfigError(f"power-law rho needs r > 0, got r={self.r}")
        if self.gamma < 0.0:
            raise ConfigError(f"power-law rho needs gamma >= 0, got {self.gamma}")

    def __call__(self, d: int) -> float:
        rho = self.r * float(d) ** (-self.gamma)
        if not (0.0 < rho < 1.0):
            raise InvalidDimensionError(
                f"rho(d={d}) = {rho} is outside (0, 1) for rule r={self.r}, gamma={self.gamma}"
            )
        return rho

    @property
    def limit(self) -> float:
        """lim rho(d) as d grows: r when constant, 0 otherwise."""
        return self.r if self.gamma == 0.0 else 0.0

    def to_config(self) -> dict:
        return {"r": self.r, "gamma": self.gamma}


class EigenSpectrum:
    """Nonincreasing population eigenvalues at a fixed dimension d.

    Stored as an explicit head plus run-length encoded flat tail blocks, so a
    single-spike model at d = 10**6 costs O(1) memory and tail sums are exact
    closed forms.
    """

    __slots__ = ("_head", "_tail", "_d")

    def __init__(self, head, tail=()):
        head = np.array(head, dtype=float)
        if head.ndim != 1:
            raise ValueError("head must be one-dimensional")
        tail = tuple((float(v), int(c)) for v, c in tail if int(c) > 0)
        d = head.size + sum(c for _, c in tail)
        if d < 1:
            raise ValueError("spectrum must contain at least one eigenvalue")
        tail_vals = [v for v, _ in tail]
        if (head.size and (np.any(head < 0) or np.any(np.diff(head) > 0))) or any(
            v < 0 for v in tail_vals
        ):
            raise ValueError("eigenvalues must be nonnegative and nonincreasing")
        joins = ([head[-1]] if head.size else []) + tail_vals
        if any(a < b for a, b in zip(joins, joins[1:])):
            raise ValueError("eigenvalues must be nonincreasing")
        if not ((head.size and head[0] > 0) or (tail_vals and tail_vals[0] > 0)):
            raise ValueError("at least one eigenvalue must be positive")
        head.flags.writeable = False
        self._head = head
        self._tail = tail
        self._d = d

    @property
    def d(self) -> int:
        return self._d

    def __len__(self) -> int:
        return self._d

    @property
    def values(self) -> np.ndarray:
        """Full materialized eigenvalue vector (length d)."""
        parts = [self._head] + [np.full(c, v) for v, c in self._tail]
        return np.concatenate(parts) if len(parts) > 1 else self._head.copy()

    def top(self, r: int) -> np.ndarray:
        """Leading r eigenvalues."""
        if not 0 <= r <= self._d:
            raise InvalidIndexError(f"r={r} outside 0..{self._d}")
        if r <= self._head.size:
            return self._head[:r].copy()
        out = list(self._head)
        for v, c in self._tail:
            take = min(c, r - len(out))
            out.extend([v] * take)
            if len(out) == r:
                break
        return np.asarray(out)

    def value(self, i: int) -> float:
        """Eigenvalue lambda_i (1-based)."""
        if not 1 <= i <= self._d:
            raise InvalidIndexError(f"index {i} outside 1..{self._d}")
        if i <= self._head.size:
            return float(self._head[i - 1])
        i -= self._head.size
        for v, c in self._tail:
            if i <= c:
                return v
            i -= c
        raise AssertionError("unreachable")

    def sum_from(self, k: int = 1) -> float:
        """Sum of lambda_k..lambda_d (1-based k)."""
        return self._tail_sum(k, power=1)

    def sum_sq_from(self, k: int = 1) -> float:
        """Sum of lambda_i**2 over i = k..d."""
        return self._tail_sum(k, power=2)

    @property
    def trace(self) -> float:
        return self.sum_from(1)

    def _tail_sum(self, k: int, power: int) -> float:
        if not 1 <= k <= self._d:
            raise InvalidIndexError(f"k={k} outside 1..{self._d}")
        total = float(np.sum(self._head[k - 1 :] ** power)) if k <= self._head.size else 0.0
        skip = max(0, k - 1 - self._head.size)
        for v, c in self._tail:
            use = c - min(skip, c)
            skip = max(0, skip - c)
            total += (v**power) * use
        return total


@dataclass(frozen=True)
class SphericityReport:
    """Sphericity of the eigenvalue tail starting at index k."""

    k: int
    epsilon_k: float
    d_epsilon_k: float
    sqrtd_epsilon_k: float


@dataclass(frozen=True)
class ConditionVerdict:
    """Classification of the epsilon- and strong-epsilon conditions at index k."""

    epsilon_condition: str
    strong_epsilon_condition: str
    k: int
    basis: str


def sphericity(spectrum: EigenSpectrum, k: int = 1) -> SphericityReport:
    """Sphericity of {lambda_k, ..., lambda_d}: (sum lambda)^2 / (d * sum lambda^2).

    The ambient dimension d (not the tail length) sits in the denominator, so
    epsilon_1 ranges over [1/d, 1] with 1 attained exactly at equal eigenvalues.
    """
    d = spectrum.d
    if not 1 <= k <= d:
        raise InvalidIndexError(f"k={k} outside 1..{d}")
    s1 = spectrum.sum_from(k)
    s2 = spectrum.sum_sq_from(k)
    if s2 <= 0.0:
        raise UndefinedSphericityError(f"all eigenvalues from index {k} are zero")
    eps = s1 * s1 / (d * s2)
    return SphericityReport(
        k=k, epsilon_k=eps, d_epsilon_k=d * eps, sqrtd_epsilon_k=math.sqrt(d) * eps
    )


class CovarianceModel(abc.ABC):
    """A d-indexed family of population covariance spectra.

    Subclasses provide the analytic spectrum at any supported dimension, the
    tracked eigenvector inner products, and (where the catalog covers them)
    the analytic epsilon-condition classification.
    """

    family: str = ""

    # -- spectrum ---------------------------------------------------------
    def eigenvalues(self, d: int) -> EigenSpectrum:
        """Population spectrum at dimension d, sorted nonincreasing."""
        self._check_dimension(d)
        return self._spectrum(d)

    def _check_dimension(self, d: int) -> None:
        if d < self.min_dimension(d):
            raise InvalidDimensionError(
                f"{self.family}: dimension {d} below family minimum {self.min_dimension(d)}"
            )

    def min_dimension(self, d: int) -> int:
        return 2

    @abc.abstractmethod
    def _spectrum(self, d: int) -> EigenSpectrum:
        ...

    # -- structure hints ---------------------------------------------------
    def fixed_spike_count(self) -> int | None:
        """Number of leading spike eigenvalues, or None if it grows with d."""
        return 0

    # -- eigenvectors -------------------------------------------------------
    def eigvec_inner(self, d: int, j: int, v, coords: str = "ambient") -> float:
        """Inner product u_j' v with the tracked population eigenvector u_j.

        ``coords`` names the coordinate system of ``v``: "ambient" uses the
        family's analytic eigenvector formulas, "eigen" treats v as already
        expressed in the population eigenbasis (u_j = e_j).  No d x d matrix
        is ever formed.
        """
        self._check_dimension(d)
        v = np.asarray(v, dtype=float)
        if v.shape != (d,):
            raise ValueError(f"v must have shape ({d},), got {v.shape}")
        if abs(np.linalg.norm(v) - 1.0) > _UNIT_NORM_TOL:
            raise ValueError("v must be a unit vector within 1e-8")
        if not 1 <= j <= d:
            raise UnsupportedEigenvectorError(f"{self.family}: index {j} outside 1..{d}")
        if coords == "eigen":
            return float(v[j - 1])
        if coords != "ambient":
            raise ValueError(f"coords must be 'ambient' or 'eigen', got {coords!r}")
        return self._ambient_inner(d, j, v)

    def _ambient_inner(self, d: int, j: int, v: np.ndarray) -> float:
        # diagonal families: the eigenbasis is the coordinate basis
        return float(v[j - 1])

    # -- condition catalog ---------------------------------------------------
    def analytic_condition(self, k: int) -> ConditionVerdict | None:
        """Closed-form condition classification, or None when unavailable."""
        return None

    # -- serialization --------------------------------------------------------
    @abc.abstractmethod
    def params(self) -> dict:
        ...

    def to_config(self) -> dict:
        return {"family": self.family, "params": self.params(), "mixing": self.mixing}

    def __repr__(self) -> str:  # pragma: no cover - debugging nicety
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"


def _flat_tail_verdict(k: int, spike_alphas: tuple[float, ...]) -> ConditionVerdict:
    """Catalog rule for finitely many spikes over a flat tail.

    The epsilon_k-condition fails exactly when a spike with rate >= 1 survives
    past index k; the strong condition always holds because some fixed l past
    the last spike leaves a flat tail.
    """
    remaining = spike_alphas[k - 1 :] if k - 1 < len(spike_alphas) else ()
    eps = FAILS if any(a >= 1.0 for a in remaining) else HOLDS
    return ConditionVerdict(eps, HOLDS, k, ANALYTIC)


@dataclass(frozen=True)
class Identity(CovarianceModel):
    """All eigenvalues one: the null, perfectly spherical case."""

    mixing: str = INDEPENDENT
    family = "identity"

    def _spectrum(self, d):
        return EigenSpectrum(head=(), tail=((1.0, d),))

    def analytic_condition(self, k):
        return ConditionVerdict(HOLDS, HOLDS, k, ANALYTIC)

    def params(self):
        return {}


@dataclass(frozen=True)
class SingleSpike(CovarianceModel):
    """lambda_1 = c1 * d**alpha over a flat tail at ``base``.

    ``base = 0`` gives the singular family where only the spike is nonzero.
    """

    alpha: float
    c1: float = 1.0
    base: float = 1.0
    mixing: str = INDEPENDENT
    family = "single_spike"

    def __post_init__(self):
        if self.alpha <= 0 or self.c1 <= 0 or self.base < 0:
            raise ConfigError("single_spike needs alpha, c1 > 0 and base >= 0")

    def _spectrum(self, d):
        spike = self.c1 * float(d) ** self.alpha
        if spike < self.base:
            raise InvalidDimensionError(
                f"single_spike: spike {spike} below tail {self.base} at d={d}"
            )
        return EigenSpectrum(head=(spike,), tail=((self.base, d - 1),))

    def fixed_spike_count(self):
        return 1

    def analytic_condition(self, k):
        if self.base == 0.0:
            # singular case: all the mass sits on one eigenvalue
            return ConditionVerdict(FAILS, FAILS, k, ANALYTIC)
        return _flat_tail_verdict(k, (self.alpha,))

    def params(self):
        return {"alpha": self.alpha, "c1": self.c1, "base": self.base}


@dataclass(frozen=True)
class MultiSpikeGroups(CovarianceModel):
    """Spike groups (alpha_l, c_list) at strictly decreasing rates over a flat tail."""

    groups: tuple[tuple[float, tuple[float, ...]], ...]
    base: float = 1.0
    mixing: str = INDEPENDENT
    family = "multi_spike_groups"

    def __post_init__(self):
        groups = tuple(
            (float(a), tuple(float(c) for c in cs)) for a, cs in self.groups
        )
        object.__setattr__(self, "groups", groups)
        if not groups:
            raise ConfigError("multi_spike_groups needs at least one group")
        alphas = [a for a, _ in groups]
        if any(a <= 0 for a in alphas):
            raise ConfigError("spike rates must be positive")
        if any(a1 <= a2 for a1, a2 in zip(alphas, alphas[1:])):
            raise ConfigError("group rates must be strictly decreasing")
        for _, cs in groups:
            if not cs or any(c <= 0 for c in cs):
                raise ConfigError("each group needs positive scale constants")
            if any(a < b for a, b in zip(cs, cs[1:])):
                raise ConfigError("scale constants within a group must be nonincreasing")
        if self.base <= 0:
            raise ConfigError("tail base must be positive")

    @property
    def kappa(self) -> int:
        return sum(len(cs) for _, cs in self.groups)

    def min_dimension(self, d):
        return self.kappa + 1

    def _spectrum(self, d):
        head = np.concatenate(
            [np.asarray(cs) * float(d) ** a for a, cs in self.groups]
        )
        if np.any(np.diff(head) > 0) or head[-1] < self.base:
            raise InvalidDimensionError(
                f"multi_spike_groups: spike ordering breaks at d={d}"
            )
        return EigenSpectrum(head=head, tail=((self.base, d - self.kappa),))

    def fixed_spike_count(self):
        return self.kappa

    def analytic_condition(self, k):
        alphas = tuple(a for a, cs in self.groups for _ in cs)
        return _flat_tail_verdict(k, alphas)

    def params(self):
        return {
            "groups": [{"alpha": a, "c_list": list(cs)} for a, cs in self.groups],
            "base": self.base,
        }


@dataclass(frozen=True)
class PolynomialDecay(CovarianceModel):
    """lambda_i = i**(-beta)."""

    beta: float
    mixing: str = INDEPENDENT
    family = "polynomial_decay"

    def __post_init__(self):
        if self.beta < 0:
            raise ConfigError("polynomial_decay needs beta >= 0")

    def _spectrum(self, d):
        return EigenSpectrum(head=np.arange(1, d + 1, dtype=float) ** (-self.beta))

    def analytic_condition(self, k):
        # thresholds: strong holds for beta < 3/4; epsilon holds through beta = 1
        if self.beta < 0.75:
            return ConditionVerdict(HOLDS, HOLDS, k, ANALYTIC)
        if self.beta <= 1.0:
            return ConditionVerdict(HOLDS, FAILS, k, ANALYTIC)
        return ConditionVerdict(FAILS, FAILS, k, ANALYTIC)

    def params(self):
        return {"beta": self.beta}


@dataclass(frozen=True)
class ExponentialDecay(CovarianceModel):
    """lambda_i = c**(-i) for c > 1; both power sums converge."""

    c: float
    mixing: str = INDEPENDENT
    family = "exponential_decay"

    def __post_init__(self):
        if self.c <= 1:
            raise ConfigError("exponential_decay needs c > 1")

    def _spectrum(self, d):
        with np.errstate(under="ignore"):
            vals = float(self.c) ** (-np.arange(1, d + 1, dtype=float))
        return EigenSpectrum(head=vals)

    def analytic_condition(self, k):
        return ConditionVerdict(FAILS, FAILS, k, ANALYTIC)

    def params(self):
        return {"c": self.c}


@dataclass(frozen=True)
class GrowingSpikes(CovarianceModel):
    """floor(d**beta) spikes at C1 * d**alpha over a flat tail at C2.

    Classified by the catalog thresholds on 2*alpha + beta; see the trend
    check for the finite-d behavior.
    """

    alpha: float
    beta: float
    c1: float = 1.0
    c2: float = 1.0
    mixing: str = INDEPENDENT
    family = "growing_spikes"

    def __post_init__(self):
        if not 0 < self.beta < 1:
            raise ConfigError("growing_spikes needs beta in (0, 1)")
        if self.alpha < 0 or self.c1 <= 0 or self.c2 <= 0:
            raise ConfigError("growing_spikes needs alpha >= 0 and C1, C2 > 0")

    def spike_count_at(self, d: int) -> int:
        return int(math.floor(float(d) ** self.beta))

    def _spectrum(self, d):
        m = self.spike_count_at(d)
        spike = self.c1 * float(d) ** self.alpha
        if m >= d:
            raise InvalidDimensionError(f"growing_spikes: m={m} >= d={d}")
        if spike < self.c2:
            raise InvalidDimensionError(
                f"growing_spikes: spike {spike} below tail {self.c2} at d={d}"
            )
        return EigenSpectrum(head=(), tail=((spike, m), (self.c2, d - m)))

    def fixed_spike_count(self):
        return None

    def analytic_condition(self, k):
        s = 2 * self.alpha + self.beta
        if s < 1.5:
            return ConditionVerdict(HOLDS, HOLDS, k, ANALYTIC)
        if s < 2.0:
            return ConditionVerdict(HOLDS, FAILS, k, ANALYTIC)
        return ConditionVerdict(FAILS, FAILS, k, ANALYTIC)

    def params(self):
        return {"alpha": self.alpha, "beta": self.beta, "c1": self.c1, "c2": self.c2}


def _helmert_inner(v: np.ndarray, t: int, offset: int = 0) -> float:
    """Inner product of v with the t-th Helmert direction (t >= 2) on a block.

    The Helmert vectors are the deterministic orthonormal completion of the
    constant vector on the block starting at ``offset``.
    """
    s = float(np.sum(v[offset : offset + t - 1]))
    return (s - (t - 1) * float(v[offset + t - 1])) / math.sqrt((t - 1) * t)


@dataclass(frozen=True)
class Equicorrelation(CovarianceModel):
    """Squared equicorrelation factor: lambda_1 = (d rho + 1 - rho)^2, flat tail (1-rho)^2.

    The leading eigenvector is the normalized constant vector; the tail
    completion is the Helmert basis orthogonal to it.
    """

    rho: PowerLawRho
    mixing: str = INDEPENDENT
    family = "equicorrelation"

    def _spectrum(self, d):
        rho = self.rho(d)
        lead = (d * rho + 1.0 - rho) ** 2
        return EigenSpectrum(head=(lead,), tail=(((1.0 - rho) ** 2, d - 1),))

    def fixed_spike_count(self):
        return 1

    def spike_exponent(self) -> float:
        """Growth rate of lambda_1: (d rho_d)^2 with rho_d = r d^-gamma gives 2(1-gamma)."""
        return 2.0 * (1.0 - self.rho.gamma)

    def analytic_condition(self, k):
        return _flat_tail_verdict(k, (self.spike_exponent(),))

    def _ambient_inner(self, d, j, v):
        if j == 1:
            return float(np.sum(v)) / math.sqrt(d)
        return _helmert_inner(v, j)

    def params(self):
        return {"rho": self.rho.to_config()}


@dataclass(frozen=True)
class BlockEquicorrelation(CovarianceModel):
    """Two independent equicorrelation blocks of size d/2 with rho1 >= rho2.

    At ambient dimension d (even, block size m = d/2) the sorted spectrum is
    the two spikes (m rho_i + 1 - rho_i)^2 followed by the block-2 then
    block-1 flat tails.  Tracked eigenvectors: index 1 and 2 are the
    per-block constant vectors, the rest the per-block Helmert completions.
    """

    rho1: PowerLawRho
    rho2: PowerLawRho
    mixing: str = INDEPENDENT
    family = "block_equicorrelation"

    def min_dimension(self, d):
        return 4

    def _check_dimension(self, d):
        super()._check_dimension(d)
        if d % 2 != 0:
            raise InvalidDimensionError("block_equicorrelation needs an even dimension")
        m = d // 2
        if not self.rho2(m) <= self.rho1(m):
            raise InvalidDimensionError(f"rho2 > rho1 at block size {m}")

    def _spectrum(self, d):
        m = d // 2
        r1, r2 = self.rho1(m), self.rho2(m)
        s1 = (m * r1 + 1.0 - r1) ** 2
        s2 = (m * r2 + 1.0 - r2) ** 2
        return EigenSpectrum(
            head=(s1, s2),
            tail=(((1.0 - r2) ** 2, m - 1), ((1.0 - r1) ** 2, m - 1)),
        )

    def fixed_spike_count(self):
        return 2

    def spike_exponents(self) -> tuple[float, float]:
        return (2.0 * (1.0 - self.rho1.gamma), 2.0 * (1.0 - self.rho2.gamma))

    def analytic_condition(self, k):
        return _flat_tail_verdict(k, self.spike_exponents())

    def _ambient_inner(self, d, j, v):
        m = d // 2
        if j == 1:
            return float(np.sum(v[:m])) / math.sqrt(m)
        if j == 2:
            return float(np.sum(v[m:])) / math.sqrt(m)
        if j <= m + 1:  # block-2 tail, Helmert index j-1 in 2..m
            return _helmert_inner(v, j - 1, offset=m)
        return _helmert_inner(v, j - m, offset=0)  # block-1 tail

    def params(self):
        return {"rho1": self.rho1.to_config(), "rho2": self.rho2.to_config()}


@dataclass(frozen=True)
class ExplicitDiagonal(CovarianceModel):
    """A fixed, explicitly listed spectrum at a single dimension."""

    values: tuple[float, ...]
    mixing: str = INDEPENDENT
    family = "explicit_diagonal"

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        EigenSpectrum(head=np.asarray(vals))  # validates ordering/sign

    def min_dimension(self, d):
        return len(self.values)

    def _check_dimension(self, d):
        if d != len(self.values):
            raise InvalidDimensionError(
                f"explicit_diagonal stores {len(self.values)} eigenvalues, got d={d}"
            )

    def _spectrum(self, d):
        return EigenSpectrum(head=np.asarray(self.values))

    def params(self):
        return {"values": list(self.values)}


# ---------------------------------------------------------------------------
# condition check
# ---------------------------------------------------------------------------


def _trend_direction(series: np.ndarray) -> str:
    """Factor-2 trend rule on a positive series along a decade-spaced grid.

    Holds when every step at least doubles; a series pinned inside a single
    factor-2 band reads as bounded, which for d*eps (always >= 1) is the
    signature of failure; anything else is unresolved.
    """
    ratios = series[1:] / series[:-1]
    if np.all(ratios >= 2.0):
        return HOLDS
    if np.all(ratios <= 0.5) or (series.max() / series.min() < 2.0):
        return FAILS
    return UNKNOWN


def condition_check(
    model: CovarianceModel,
    k: int,
    d_grid,
    method: str = "auto",
) -> ConditionVerdict:
    """Classify the epsilon_k- and strong epsilon_k-conditions for a model.

    Closed-form families are classified from the analytic catalog; otherwise
    (or with ``method="trend"``) the products d*eps_k and sqrt(d)*eps_l are
    evaluated along ``d_grid`` and judged by the factor-2 trend rule.  The
    strong condition scans the admissible fixed start indices l in
    k..(spike count + 1) and holds if any of them does.
    """
    d_grid = tuple(int(d) for d in d_grid)
    if len(d_grid) < 3 or any(a >= b for a, b in zip(d_grid, d_grid[1:])):
        raise ConfigError("d_grid must be strictly increasing with length >= 3")
    if k < 1 or k > d_grid[0]:
        raise InvalidIndexError(f"k={k} exceeds smallest grid dimension {d_grid[0]}")
    if method not in ("auto", "analytic", "trend"):
        raise ConfigError(f"unknown method {method!r}")

    if method in ("auto", "analytic"):
        verdict = model.analytic_condition(k)
        if verdict is not None:
            return verdict
        if method == "analytic":
            raise ConfigError(f"{model.family} has no analytic classification")

    kappa = model.fixed_spike_count()
    l_candidates = range(k, k + 2) if kappa is None else range(k, max(k, kappa + 1) + 1)

    d_eps = []
    strong_series = {l: [] for l in l_candidates}
    dead = set()  # an all-zero tail can never satisfy a divergence condition
    for d in d_grid:
        spec = model.eigenvalues(d)
        try:
            d_eps.append(sphericity(spec, k).d_epsilon_k)
        except UndefinedSphericityError:
            return ConditionVerdict(FAILS, FAILS, k, NUMERIC_TREND)
        for l in l_candidates:
            try:
                strong_series[l].append(sphericity(spec, l).sqrtd_epsilon_k)
            except UndefinedSphericityError:
                dead.add(l)

    eps_verdict = _trend_direction(np.asarray(d_eps))
    strong_votes = [
        FAILS if l in dead else _trend_direction(np.asarray(s))
        for l, s in strong_series.items()
    ]
    if HOLDS in strong_votes:
        strong_verdict = HOLDS
    elif all(v == FAILS for v in strong_votes):
        strong_verdict = FAILS
    else:
        strong_verdict = UNKNOWN
    return ConditionVerdict(eps_verdict, strong_verdict, k, NUMERIC_TREND)


# ---------------------------------------------------------------------------
# public eigenvector helper and serialization
# ---------------------------------------------------------------------------


def population_eigvec_inner(
    model: CovarianceModel, d: int, j: int, v, coords: str = "ambient"
) -> float:
    """Inner product u_j' v with the family's tracked eigenvector u_j."""
    return model.eigvec_inner(d, j, v, coords=coords)


_FAMILIES: dict[str, type] = {
    cls.family: cls
    for cls in (
        Identity,
        SingleSpike,
        MultiSpikeGroups,
        PolynomialDecay,
        ExponentialDecay,
        GrowingSpikes,
        Equicorrelation,
        BlockEquicorrelation,
        ExplicitDiagonal,
    )
}


def _rho_from_config(obj, where: str) -> PowerLawRho:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected a table with keys r, gamma")
    unknown = set(obj) - {"r", "gamma"}
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    if "r" not in obj:
        raise ConfigError(f"{where}: missing key 'r'")
    return PowerLawRho(r=float(obj["r"]), gamma=float(obj.get("gamma", 0.0)))


def model_from_config(config: dict) -> CovarianceModel:
    """Build a model from the JSON/TOML document {"family", "params", "mixing"}.

    Unknown keys anywhere are errors; nothing is silently ignored.
    """
    if not isinstance(config, dict):
        raise ConfigError("model config must be a mapping")
    unknown = set(config) - {"family", "params", "mixing"}
    if unknown:
        raise ConfigError(f"model: unknown keys {sorted(unknown)}")
    family = config.get("family")
    if family not in _FAMILIES:
        raise ConfigError(
            f"unknown family {family!r}; expected one of {sorted(_FAMILIES)}"
        )
    mixing = config.get("mixing", INDEPENDENT)
    if mixing not in MIXING_VALUES:
        raise ConfigError(f"unknown mixing attribute {mixing!r}")
    params = dict(config.get("params", {}))

    try:
        if family == "identity":
            _require_keys(params, set(), family)
            return Identity(mixing=mixing)
        if family == "single_spike":
            _require_keys(params, {"alpha"}, family, optional={"c1", "base"})
            return SingleSpike(
                alpha=float(params["alpha"]),
                c1=float(params.get("c1", 1.0)),
                base=float(params.get("base", 1.0)),
                mixing=mixing,
            )
        if family == "multi_spike_groups":
            _require_keys(params, {"groups"}, family, optional={"base"})
            groups = []
            for g in params["groups"]:
                extra = set(g) - {"alpha", "c_list"}
                if extra:
                    raise ConfigError(f"multi_spike_groups group: unknown keys {sorted(extra)}")
                groups.append((float(g["alpha"]), tuple(float(c) for c in g["c_list"])))
            return MultiSpikeGroups(
                groups=tuple(groups), base=float(params.get("base", 1.0)), mixing=mixing
            )
        if family == "polynomial_decay":
            _require_keys(params, {"beta"}, family)
            return PolynomialDecay(beta=float(params["beta"]), mixing=mixing)
        if family == "exponential_decay":
            _require_keys(params, {"c"}, family)
            return ExponentialDecay(c=float(params["c"]), mixing=mixing)
        if family == "growing_spikes":
            _require_keys(params, {"alpha", "beta"}, family, optional={"c1", "c2"})
            return GrowingSpikes(
                alpha=float(params["alpha"]),
                beta=float(params["beta"]),
                c1=float(params.get("c1", 1.0)),
                c2=float(params.get("c2", 1.0)),
                mixing=mixing,
            )
        if family == "equicorrelation":
            _require_keys(params, {"rho"}, family)
            return Equicorrelation(rho=_rho_from_config(params["rho"], "rho"), mixing=mixing)
        if family == "block_equicorrelation":
            _require_keys(params, {"rho1", "rho2"}, family)
            return BlockEquicorrelation(
                rho1=_rho_from_config(params["rho1"], "rho1"),
                rho2=_rho_from_config(params["rho2"], "rho2"),
                mixing=mixing,
            )
        if family == "explicit_diagonal":
            _require_keys(params, {"values"}, family)
            return ExplicitDiagonal(values=tuple(params["values"]), mixing=mixing)
    except KeyError as exc:  # missing required key inside a group table
        raise ConfigError(f"{family}: missing parameter {exc}") from exc
    raise AssertionError("unreachable")


def _require_keys(params: dict, required: set, family: str, optional: set = frozenset()):
    missing = required - set(params)
    if missing:
        raise ConfigError(f"{family}: missing parameters {sorted(missing)}")
    unknown = set(params) - required - set(optional)
    if unknown:
        raise ConfigError(f"{family}: unknown parameters {sorted(unknown)}")
