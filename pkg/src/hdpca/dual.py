"""Dual (Gram-matrix) PCA and angle diagnostics against population eigenvectors.

The n x n dual covariance X'X/n shares its nonzero spectrum with the d x d
sample covariance, so all sample eigenvalues and the leading sample PC
directions are recovered from an n x n eigensolve regardless of d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidIndexError, InvalidMatrixError, RankDeficiencyError, UnsupportedEigenvectorError
from .sampling import DataMatrix
from .spectra import CovarianceModel

RANK_RTOL = 1e-12           # dual eigenvalue below this (relative) is treated as zero
TIE_RTOL = 1e-10            # adjacent eigenvalues closer than this are a tied block
_SYMMETRY_RTOL = 1e-12


@dataclass(frozen=True)
class DualDecomposition:
    """Eigensystem of the dual covariance plus the identity-limit scaling constant."""

    dual_matrix: np.ndarray          # n x n, symmetrized
    eigenvalues: np.ndarray          # descending, length n
    eigenvectors: np.ndarray         # columns v_i, orthonormal
    c_d: float                       # population trace / n

    @property
    def n(self) -> int:
        return self.dual_matrix.shape[0]

    def rank(self, rtol: float = RANK_RTOL) -> int:
        top = self.eigenvalues[0]
        if top <= 0:
            return 0
        return int(np.sum(self.eigenvalues > rtol * top))

    def tie_groups(self, rtol: float = TIE_RTOL) -> list[tuple[int, ...]]:
        """Maximal runs of indices (1-based) whose eigenvalues tie within rtol.

        Per-direction angles inside a tied block are not identifiable; only
        subspace angles are meaningful there.
        """
        groups, current = [], [1]
        w = self.eigenvalues
        scale = max(abs(w[0]), 1e-300)
        for i in range(1, len(w)):
            if abs(w[i - 1] - w[i]) <= rtol * scale:
                current.append(i + 1)
            else:
                groups.append(tuple(current))
                current = [i + 1]
        groups.append(tuple(current))
        return groups


@dataclass(frozen=True)
class PrimalDirections:
    """Leading sample PC directions in eigenbasis coordinates, one per column."""

    directions: np.ndarray           # d x r, orthonormal columns
    eigenvalues: np.ndarray          # matching lambda-hats, length r

    @property
    def r(self) -> int:
        return self.directions.shape[1]

    @property
    def d(self) -> int:
        return self.directions.shape[0]


@dataclass(frozen=True)
class InnerProductRows:
    """Rows p_j = (u_j' u-hat_1, ..., u_j' u-hat_r) of the inner-product matrix."""

    rows: dict[int, np.ndarray]
    r: int

    def row(self, j: int) -> np.ndarray:
        if j not in self.rows:
            raise UnsupportedEigenvectorError(f"index {j} was not tracked")
        return self.rows[j]


def _as_matrix(x) -> np.ndarray:
    if isinstance(x, DataMatrix):
        return x.x
    a = np.asarray(x, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def dual_covariance(x) -> np.ndarray:
    """Dual sample covariance X'X / n, symmetrized by averaging with its transpose."""
    a = _as_matrix(x)
    n = a.shape[1]
    if n < 2:
        raise ValueError("need at least two columns")
    s = a.T @ a / n
    return (s + s.T) / 2.0


def eigendecompose(a) -> tuple[np.ndarray, np.ndarray]:
    """Full spectral decomposition of a symmetric matrix, eigenvalues descending.

    Output is deterministic for identical input: each eigenvector's
    largest-magnitude coordinate is made positive.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidMatrixError(f"expected a square matrix, got shape {a.shape}")
    scale = np.max(np.abs(a)) or 1.0
    if np.max(np.abs(a - a.T)) > _SYMMETRY_RTOL * scale:
        raise InvalidMatrixError("matrix is not symmetric within tolerance")
    w, v = np.linalg.eigh((a + a.T) / 2.0)
    w = w[::-1]
    v = v[:, ::-1]
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[lead, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return w, v * signs


def dual_decompose(x: DataMatrix) -> DualDecomposition:
    """Dual covariance, its eigensystem, and c_d = (sum of population eigenvalues)/n."""
    s = dual_covariance(x)
    w, v = eigendecompose(s)
    c_d = x.model.eigenvalues(x.d).trace / x.n
    return DualDecomposition(dual_matrix=s, eigenvalues=w, eigenvectors=v, c_d=c_d)


def recover_directions(x, dual: DualDecomposition, r: int) -> PrimalDirections:
    """Primal directions u-hat_i = X v_i / ||X v_i|| for the top r dual eigenpairs."""
    a = _as_matrix(x)
    usable = dual.rank()
    if r < 1 or r > usable:
        raise RankDeficiencyError(
            f"requested {r} directions but only {usable} dual eigenvalues exceed the rank threshold"
        )
    proj = a @ dual.eigenvectors[:, :r]
    norms = np.linalg.norm(proj, axis=0)
    if np.any(norms <= 0):
        raise RankDeficiencyError("a projected direction has zero norm")
    return PrimalDirections(directions=proj / norms, eigenvalues=dual.eigenvalues[:r].copy())


def inner_products(
    dirs: PrimalDirections,
    model: CovarianceModel,
    d: int,
    tracked,
) -> InnerProductRows:
    """Rows p_{ji} = u_j' u-hat_i for tracked population indices j.

    Directions live in eigenbasis coordinates, so each entry comes from the
    model's tracked-eigenvector inner product in that basis; no d x d matrix
    is formed.
    """
    if dirs.d != d:
        raise ValueError(f"directions have dimension {dirs.d}, expected {d}")
    rows = {}
    for j in tracked:
        rows[int(j)] = np.array(
            [
                model.eigvec_inner(d, int(j), dirs.directions[:, i], coords="eigen")
                for i in range(dirs.r)
            ]
        )
    return InnerProductRows(rows=rows, r=dirs.r)


def angle(p: float) -> float:
    """Acute angle (radians) from an inner product; sign of either vector is ignored."""
    if abs(p) > 1.0 + 1e-10:
        raise ValueError(f"|inner product| = {abs(p)} exceeds 1 beyond tolerance")
    return float(np.arccos(min(abs(float(p)), 1.0)))


def subspace_angle(rows: InnerProductRows, i: int, group) -> float:
    """Angle (radians) between u-hat_i and span{u_j : j in group}."""
    group = tuple(group)
    if not group:
        raise InvalidIndexError("group must be nonempty")
    if not 1 <= i <= rows.r:
        raise InvalidIndexError(f"sample index {i} outside 1..{rows.r}")
    total = 0.0
    for j in group:
        total += float(rows.row(j)[i - 1]) ** 2
    return angle(np.sqrt(min(total, 1.0)))


def scaled_dual_deviation(dual: DualDecomposition) -> float:
    """Max entrywise deviation of S_D / c_d from the identity."""
    if not dual.c_d > 0:
        raise ValueError("c_d must be positive")
    n = dual.n
    return float(np.max(np.abs(dual.dual_matrix / dual.c_d - np.eye(n))))
