"""Dense small-matrix numerics shared by the whole package.

Vectors and matrices are float64 numpy arrays. Shape and finiteness are
validated at the public boundaries; the kernels (LU determinant, row-reduction
rank) assume clean inputs and are written for the desk-scale sizes this
package targets (dimensions up to a few dozen).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionMismatch",
    "Tolerance",
    "DEFAULT_TOL",
    "SpaceConfig",
    "as_vector",
    "as_square_matrix",
    "inner",
    "metric_length",
    "hadamard_scale",
    "gram_matrix",
    "determinant",
    "rank",
]


class DimensionMismatch(ValueError):
    """An input does not fit the ambient space; carries expected vs actual."""

    def __init__(self, what: str, expected, actual):
        self.what = what
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected {expected}, got {actual}")


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds used across the package.

    zero: absolute threshold for treating a scalar as zero (scaled by input
        magnitude where the operation says so).
    rel: threshold for relative comparisons.
    sym: threshold for symmetry checks on matrices.
    """

    zero: float = 1e-9
    rel: float = 1e-9
    sym: float = 1e-12

    def __post_init__(self):
        for name in ("zero", "rel", "sym"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"tolerance {name!r} must be finite and > 0, got {value}")


DEFAULT_TOL = Tolerance()


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float array, optionally of a fixed length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatch("vector ndim", 1, v.ndim)
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatch("vector length", dim, v.shape[0])
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    return v


def as_square_matrix(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite square 2-D float array."""
    m = np.asarray(x, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch("matrix shape", "square", m.shape)
    if dim is not None and m.shape[0] != dim:
        raise DimensionMismatch("matrix size", dim, m.shape[0])
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


@dataclass(frozen=True)
class SpaceConfig:
    """Ambient space: dimension d, norm arity n <= d, and an SPD metric.

    metric=None means the standard dot product (identity metric).
    """

    dim: int
    arity: int
    metric: np.ndarray | None = None
    tol: Tolerance = DEFAULT_TOL

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if not 1 <= self.arity <= self.dim:
            raise ValueError(f"arity must satisfy 1 <= arity <= dim, got arity={self.arity}, dim={self.dim}")
        if self.metric is not None:
            m = as_square_matrix(self.metric, self.dim).copy()
            if np.max(np.abs(m - m.T)) > self.tol.sym:
                raise ValueError("metric is not symmetric")
            # positive definite <=> every leading principal minor is positive
            for k in range(1, self.dim + 1):
                if determinant(m[:k, :k]) <= 0.0:
                    raise ValueError("metric is not positive definite")
            m.flags.writeable = False
            object.__setattr__(self, "metric", m)

    def metric_matrix(self) -> np.ndarray:
        return np.eye(self.dim) if self.metric is None else self.metric


def inner(cfg: SpaceConfig, a, b) -> float:
    """Inner product a' M b under the config's metric."""
    a = as_vector(a, cfg.dim)
    b = as_vector(b, cfg.dim)
    if cfg.metric is None:
        return float(a @ b)
    # symmetrised evaluation so inner(a, b) == inner(b, a) bit-for-bit
    return float(0.5 * (a @ (cfg.metric @ b) + b @ (cfg.metric @ a)))


def metric_length(cfg: SpaceConfig, v) -> float:
    return math.sqrt(max(inner(cfg, v, v), 0.0))


def hadamard_scale(cfg: SpaceConfig, vs) -> float:
    """Product of the metric lengths of the vectors.

    This is the Hadamard upper bound for the Gram-volume of the tuple, and is
    the natural magnitude against which norm values and residuals are scaled.
    """
    scale = 1.0
    for v in vs:
        scale *= metric_length(cfg, v)
    return scale


def gram_matrix(cfg: SpaceConfig, vs) -> np.ndarray:
    """Matrix of pairwise inner products; symmetrised to kill rounding skew."""
    if len(vs) == 0:
        raise ValueError("gram_matrix needs at least one vector")
    rows = np.array([as_vector(v, cfg.dim) for v in vs])
    if cfg.metric is None:
        g = rows @ rows.T
    else:
        g = rows @ cfg.metric @ rows.T
    return 0.5 * (g + g.T)


def determinant(m) -> float:
    """Determinant by LU with partial pivoting.

    A zero pivot column short-circuits to an exact 0.0, so exactly singular
    integer-valued matrices (e.g. Gram matrices of repeated basis vectors)
    come out exactly zero rather than at rounding level.
    """
    a = as_square_matrix(m).copy()
    n = a.shape[0]
    det = 1.0
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        pivot = a[p, k]
        if pivot == 0.0:
            return 0.0
        if p != k:
            a[[k, p]] = a[[p, k]]
            det = -det
        det *= pivot
        mult = a[k + 1 :, k] / pivot
        a[k + 1 :, k + 1 :] -= np.outer(mult, a[k, k + 1 :])
    return det * a[n - 1, n - 1]


def rank(vs, tol: Tolerance = DEFAULT_TOL) -> int:
    """Numerical rank of a list of vectors by row reduction.

    The pivot threshold is tol.zero scaled by the largest absolute entry of
    the input, which makes the result invariant under rescaling the whole set.
    Pivots are chosen by complete pivoting (largest entry of the remaining
    submatrix): multipliers then never exceed 1, so rounding noise stays at
    machine level instead of being amplified through a small early pivot,
    and perturbations at 1e-12 of the entry scale classify as dependent.
    rank < len(vs) is the package-wide criterion for linear dependence.
    """
    if len(vs) == 0:
        raise ValueError("rank needs at least one vector")
    first = as_vector(vs[0])
    rows = np.array([as_vector(v, first.shape[0]) for v in vs])
    scale = float(np.max(np.abs(rows)))
    if scale == 0.0:
        return 0
    threshold = tol.zero * scale
    a = rows.copy()
    m, d = a.shape
    r = 0
    while r < min(m, d):
        sub = np.abs(a[r:, r:])
        i, j = np.unravel_index(int(np.argmax(sub)), sub.shape)
        if sub[i, j] <= threshold:
            break
        if i != 0:
            a[[r, r + i]] = a[[r + i, r]]
        if j != 0:
            a[:, [r, r + j]] = a[:, [r + j, r]]
        mult = a[r + 1 :, r] / a[r, r]
        a[r + 1 :, r:] -= np.outer(mult, a[r, r:])
        r += 1
    return r
