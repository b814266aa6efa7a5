"""Seeded generation of sphered component matrices and data matrices.

All sampling happens in the population eigenbasis: a data column is
Lambda^(1/2) z, never U Lambda^(1/2) z.  Every statistic downstream (dual
spectrum, angles to tracked population eigenvectors) is invariant under the
orthogonal change of basis, which removes all d x d linear algebra.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .spectra import CovarianceModel

GAUSSIAN = "gaussian"
RADEMACHER = "rademacher"
UNIFORM_STD = "uniform_std"
SCALE_MIXTURE = "scale_mixture"
NOISE_LAWS = (GAUSSIAN, RADEMACHER, UNIFORM_STD, SCALE_MIXTURE)

_SQRT3 = np.sqrt(3.0)


@dataclass(frozen=True)
class SeedSpec:
    """Master seed plus the (replicate, column) -> child stream derivation.

    Children are derived through numpy's SeedSequence spawn keys, so distinct
    index tuples give statistically independent streams and identical tuples
    reproduce identical draws.
    """

    master_seed: int

    def __post_init__(self):
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError("master_seed must fit in 64 bits")

    def generator(self, *key: int) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=int(self.master_seed), spawn_key=tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(seq))

    def child(self, replicate: int, column: int) -> np.random.Generator:
        return self.generator(replicate, column)

    def with_master(self, master_seed: int) -> "SeedSpec":
        return SeedSpec(master_seed=int(master_seed))


@dataclass(frozen=True)
class NoiseSpec:
    """Law of the sphered components: unit variance, mean zero per entry.

    gaussian / rademacher / uniform_std have i.i.d. entries with all moments
    bounded.  scale_mixture draws each column as a standard Gaussian vector
    scaled by 1 or sigma (equiprobable) and rescales by ((1+sigma^2)/2)^(-1/2),
    so entries stay unit-variance and uncorrelated while the column is not
    mixing under any permutation.
    """

    law: str = GAUSSIAN
    sigma: float | None = None

    def __post_init__(self):
        if self.law not in NOISE_LAWS:
            raise ConfigError(f"unknown noise law {self.law!r}; expected one of {NOISE_LAWS}")
        if self.law == SCALE_MIXTURE:
            if self.sigma is None or not self.sigma > 1.0:
                raise ConfigError("scale_mixture needs sigma > 1")
        elif self.sigma is not None:
            raise ConfigError(f"{self.law} takes no sigma parameter")

    def draw_column(self, rng: np.random.Generator, d: int) -> np.ndarray:
        if self.law == GAUSSIAN:
            return rng.standard_normal(d)
        if self.law == RADEMACHER:
            return 2.0 * rng.integers(0, 2, size=d).astype(float) - 1.0
        if self.law == UNIFORM_STD:
            return rng.uniform(-_SQRT3, _SQRT3, size=d)
        # scale mixture: coin first, then one Gaussian vector
        scale = self.sigma if rng.integers(0, 2) else 1.0
        norm = np.sqrt((1.0 + self.sigma**2) / 2.0)
        return (scale / norm) * rng.standard_normal(d)

    def to_config(self) -> dict:
        out = {"law": self.law}
        if self.sigma is not None:
            out["sigma"] = self.sigma
        return out


def noise_from_config(config: dict) -> NoiseSpec:
    if not isinstance(config, dict):
        raise ConfigError("noise config must be a mapping")
    unknown = set(config) - {"law", "sigma"}
    if unknown:
        raise ConfigError(f"noise: unknown keys {sorted(unknown)}")
    return NoiseSpec(law=config.get("law", GAUSSIAN), sigma=config.get("sigma"))


@dataclass(frozen=True)
class DataMatrix:
    """d x n data matrix in population-eigenbasis coordinates."""

    x: np.ndarray
    model: CovarianceModel

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        if x.ndim != 2:
            raise ValueError(f"data matrix must be 2-d, got shape {x.shape}")
        x.flags.writeable = False
        object.__setattr__(self, "x", x)

    @property
    def d(self) -> int:
        return self.x.shape[0]

    @property
    def n(self) -> int:
        return self.x.shape[1]


def sample_z(
    noise: NoiseSpec,
    d: int,
    n: int,
    seed: SeedSpec,
    replicate: int = 0,
) -> np.ndarray:
    """d x n sphered component matrix; column j uses the (replicate, j) stream."""
    if d < 2 or n < 2:
        raise ValueError(f"need d >= 2 and n >= 2, got d={d}, n={n}")
    z = np.empty((d, n))
    for j in range(n):
        z[:, j] = noise.draw_column(seed.child(replicate, j), d)
    return z


def synthesize_x(model: CovarianceModel, z: np.ndarray) -> DataMatrix:
    """Scale row i of z by sqrt(lambda_i): the data matrix in eigenbasis coordinates."""
    z = np.asarray(z, dtype=float)
    if z.ndim != 2:
        raise ValueError(f"z must be 2-d, got shape {z.shape}")
    spectrum = model.eigenvalues(z.shape[0])  # validates the dimension
    scale = np.sqrt(spectrum.values)
    return DataMatrix(x=scale[:, None] * z, model=model)


@dataclass(frozen=True)
class DistanceStats:
    """Scaled norms ||x_j||/sqrt(tr) and pairwise distances ||x_j - x_k||/sqrt(2 tr)."""

    scaled_norms: np.ndarray
    scaled_pair_distances: np.ndarray


def distance_stats(x: DataMatrix) -> DistanceStats:
    """Concentration statistics behind the geometric representation of the data."""
    if x.n < 2:
        raise ValueError("need at least two columns")
    trace = x.model.eigenvalues(x.d).trace
    cols = x.x
    norms = np.linalg.norm(cols, axis=0) / np.sqrt(trace)
    pairs = []
    for j in range(x.n):
        diff = cols[:, j + 1 :] - cols[:, [j]]
        pairs.append(np.linalg.norm(diff, axis=0))
    dists = np.concatenate(pairs) / np.sqrt(2.0 * trace)
    return DistanceStats(scaled_norms=norms, scaled_pair_distances=dists)


def dump_data_matrix(x: DataMatrix, path) -> None:
    """Debug dump: 16-byte header (d, n as u64 little-endian) + row-major f64."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<QQ", x.d, x.n))
        fh.write(np.ascontiguousarray(x.x, dtype="<f8").tobytes())


def load_data_matrix(path) -> np.ndarray:
    """Read back a binary dump; returns the raw d x n array."""
    with open(path, "rb") as fh:
        d, n = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != d * n:
        raise ValueError(f"corrupt dump: expected {d * n} values, got {data.size}")
    return data.reshape(d, n).copy()
