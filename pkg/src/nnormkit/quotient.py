"""Frames, index sets, class collections, and the quotient-space norms.

A frame is an ordered linearly independent set Y = {y_1, ..., y_n}. Removing
the frame vectors named by an index set s gives a quotient of the ambient
space; the norm of a coset with representative u is the sum over j in s of
the n-norm of (u, all frame vectors except y_j). Cosets are never
materialised: every operation takes a representative, and well-definedness
is enforced by the coset-invariance check.

All index sets are 1-based, here and in the JSON forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

import numpy as np

from .linalg import (
    DimensionMismatch,
    SpaceConfig,
    as_vector,
    determinant,
    gram_matrix,
    hadamard_scale,
    inner,
    metric_length,
    rank,
)
from .nnorm import Axiom, AxiomReport, NNorm, Witness

__all__ = [
    "IndexSet",
    "ClassCollection",
    "Frame",
    "QuotientFrame",
    "class_collection",
    "class1_norm",
    "classm_norm",
    "coset_invariance_check",
    "quotient_norm_axioms",
    "is_quotient_zero",
    "in_kept_span",
    "standard_frame",
    "random_frame",
    "SPAN_DECISION_REL",
]

#: relative threshold (against the Hadamard scale of the evaluated tuples)
#: below which a quotient-norm value is classified as zero. Sits midway, in
#: log scale, between the double-precision noise floor of Gram-determinant
#: square roots (~1e-8 on unit-scale input) and the smallest genuine values
#: the adversarial samplers produce (>= ~1e-6).
SPAN_DECISION_REL = 1e-7


@dataclass(frozen=True, order=True)
class IndexSet:
    """Strictly increasing 1-based indices naming removed frame vectors."""

    indices: tuple[int, ...]

    def __init__(self, indices):
        idx = tuple(int(i) for i in indices)
        if len(idx) == 0:
            raise ValueError("index set must be nonempty")
        if any(i < 1 for i in idx):
            raise ValueError(f"indices are 1-based, got {idx}")
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError(f"indices must be strictly increasing, got {idx}")
        object.__setattr__(self, "indices", idx)

    @property
    def m(self) -> int:
        return len(self.indices)

    def complement(self, n: int) -> tuple[int, ...]:
        return tuple(i for i in range(1, n + 1) if i not in self.indices)

    def validate_for(self, n: int) -> None:
        if self.indices[-1] > n:
            raise ValueError(f"index set {self.indices} exceeds arity {n}")

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, i) -> bool:
        return i in self.indices

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.indices) + "}"

    def to_json(self) -> list[int]:
        return list(self.indices)

    @classmethod
    def from_json(cls, obj) -> "IndexSet":
        return cls(obj)


@dataclass(frozen=True)
class ClassCollection:
    """All C(n, m) index sets of size m, in lexicographic order."""

    n: int
    m: int
    members: tuple[IndexSet, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "members": [s.to_json() for s in self.members]}

    @classmethod
    def from_json(cls, obj) -> "ClassCollection":
        built = class_collection(int(obj["n"]), int(obj["m"]))
        members = tuple(IndexSet.from_json(s) for s in obj["members"])
        if members != built.members:
            raise ValueError("members do not enumerate the class collection")
        return built


def class_collection(n: int, m: int) -> ClassCollection:
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    members = tuple(IndexSet(c) for c in combinations(range(1, n + 1), m))
    return ClassCollection(n=n, m=m, members=members)


@dataclass(frozen=True, eq=False)
class Frame:
    """Ordered linearly independent vectors anchoring the quotient norms."""

    space: SpaceConfig
    vectors: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.vectors, dtype=float)
        if rows.ndim != 2:
            raise DimensionMismatch("frame ndim", 2, rows.ndim)
        n, d = rows.shape
        if n != self.space.arity:
            raise DimensionMismatch("frame vector count", self.space.arity, n)
        if d != self.space.dim:
            raise DimensionMismatch("frame vector length", self.space.dim, d)
        if not np.all(np.isfinite(rows)):
            raise ValueError("frame has non-finite coordinates")
        if rank(rows, self.space.tol) < n:
            raise ValueError("frame vectors are linearly dependent")
        rows = rows.copy()
        rows.flags.writeable = False
        object.__setattr__(self, "vectors", rows)

    @property
    def n(self) -> int:
        return self.space.arity

    @property
    def dim(self) -> int:
        return self.space.dim

    def row(self, j: int) -> np.ndarray:
        """Frame vector y_j, 1-based."""
        if not 1 <= j <= self.n:
            raise ValueError(f"frame index must be in 1..{self.n}, got {j}")
        return self.vectors[j - 1]

    def without(self, j: int) -> list[np.ndarray]:
        """All frame vectors except y_j, in ascending index order."""
        if not 1 <= j <= self.n:
            raise ValueError(f"frame index must be in 1..{self.n}, got {j}")
        return [self.vectors[i] for i in range(self.n) if i != j - 1]

    def kept_vectors(self, s: IndexSet) -> list[np.ndarray]:
        """Frame vectors whose indices are NOT in s (the removed set)."""
        s.validate_for(self.n)
        return [self.vectors[i - 1] for i in s.complement(self.n)]

    def to_json(self) -> dict:
        out = {
            "dim": self.space.dim,
            "arity": self.space.arity,
            "vectors": self.vectors.tolist(),
        }
        if self.space.metric is not None:
            out["metric"] = self.space.metric.tolist()
        return out

    @classmethod
    def from_json(cls, obj) -> "Frame":
        cfg = SpaceConfig(dim=int(obj["dim"]), arity=int(obj["arity"]), metric=obj.get("metric"))
        return cls(space=cfg, vectors=np.array(obj["vectors"], dtype=float))


def standard_frame(cfg: SpaceConfig) -> Frame:
    """The first n standard basis vectors of R^d."""
    return Frame(space=cfg, vectors=np.eye(cfg.dim)[: cfg.arity])


def random_frame(cfg: SpaceConfig, rng: np.random.Generator, min_volume: float = 0.05, max_tries: int = 500) -> Frame:
    """A random unit-row frame whose spanning volume is bounded away from 0.

    The volume floor keeps quotient-norm values of generic vectors well
    separated from determinant rounding noise.
    """
    for _ in range(max_tries):
        rows = rng.uniform(-1.0, 1.0, (cfg.arity, cfg.dim))
        lengths = np.array([metric_length(cfg, r) for r in rows])
        if np.any(lengths == 0.0):
            continue
        rows = rows / lengths[:, None]
        vol = math.sqrt(max(determinant(gram_matrix(cfg, rows)), 0.0))
        if vol >= min_volume:
            return Frame(space=cfg, vectors=rows)
    raise ValueError(f"could not draw a frame with volume >= {min_volume} in {max_tries} tries")


def _check_compatible(frame: Frame, norm: NNorm) -> None:
    if norm.cfg.dim != frame.dim or norm.cfg.arity != frame.n:
        raise DimensionMismatch(
            "norm/frame space", (frame.n, frame.dim), (norm.cfg.arity, norm.cfg.dim)
        )


def class1_norm(frame: Frame, norm: NNorm, u, j: int) -> float:
    """Quotient norm of the coset of u after removing y_j: the n-norm of
    (u, y_1, ..., y_{j-1}, y_{j+1}, ..., y_n)."""
    _check_compatible(frame, norm)
    u = as_vector(u, frame.dim)
    return float(norm([u] + frame.without(j)))


def classm_norm(frame: Frame, norm: NNorm, u, s: IndexSet) -> float:
    """Quotient norm after removing the frame vectors named by s: by
    definition the sum of the class-1 norms over the indices of s."""
    s.validate_for(frame.n)
    u = as_vector(u, frame.dim)
    return sum(class1_norm(frame, norm, u, j) for j in s)


def _classm_scale(frame: Frame, u, s: IndexSet) -> float:
    """Sum of the Hadamard scales of the evaluated tuples; an upper bound
    for classm_norm(u, s) and the magnitude residuals are measured against."""
    cfg = frame.space
    u = as_vector(u, frame.dim)
    total = 0.0
    for j in s:
        total += hadamard_scale(cfg, [u] + frame.without(j))
    return total


def is_quotient_zero(frame: Frame, norm: NNorm, u, s: IndexSet) -> bool:
    """Classify a quotient-norm value as zero, at SPAN_DECISION_REL relative
    to the scale of the evaluated tuples."""
    value = classm_norm(frame, norm, u, s)
    return value <= SPAN_DECISION_REL * _classm_scale(frame, u, s)


def in_kept_span(frame: Frame, u, s: IndexSet) -> bool:
    """Rank-oracle test: is u in the span of the frame vectors NOT in s?

    This is membership of the coset of zero, i.e. the condition under which
    the quotient norm of u vanishes.
    """
    s.validate_for(frame.n)
    u = as_vector(u, frame.dim)
    kept = frame.kept_vectors(s)
    if not kept:
        return rank([u], frame.space.tol) == 0
    return rank(kept + [u], frame.space.tol) == len(kept)


def coset_invariance_check(frame: Frame, norm: NNorm, u, s: IndexSet, coeffs: Mapping[int, float]) -> tuple[bool, float]:
    """Well-definedness on cosets: shifting u by any combination of the KEPT
    frame vectors must not change the quotient norm.

    coeffs must be keyed by exactly the complement of s (1-based). Returns
    (passed, discrepancy) where the discrepancy is relative to the scale of
    the evaluated tuples.
    """
    _check_compatible(frame, norm)
    s.validate_for(frame.n)
    u = as_vector(u, frame.dim)
    complement = s.complement(frame.n)
    if set(coeffs.keys()) != set(complement):
        raise ValueError(f"coefficients must be indexed by {complement}, got {sorted(coeffs.keys())}")
    shifted = u.copy()
    for i in complement:
        shifted = shifted + float(coeffs[i]) * frame.row(i)
    base = classm_norm(frame, norm, u, s)
    moved = classm_norm(frame, norm, shifted, s)
    scale = max(_classm_scale(frame, u, s), _classm_scale(frame, shifted, s))
    gap = abs(base - moved) / max(base, moved, scale, 1e-300)
    return gap <= frame.space.tol.rel, gap


@dataclass(frozen=True)
class QuotientFrame:
    """A frame together with a removed index set and the norm to evaluate
    with; a convenience view of one quotient space."""

    frame: Frame
    removed: IndexSet
    norm: NNorm

    def __post_init__(self):
        self.removed.validate_for(self.frame.n)
        _check_compatible(self.frame, self.norm)

    def norm_of(self, u) -> float:
        return classm_norm(self.frame, self.norm, u, self.removed)


def _adversarial_member(frame: Frame, s: IndexSet, rng: np.random.Generator) -> np.ndarray:
    kept = frame.kept_vectors(s)
    if not kept:
        return np.zeros(frame.dim)
    coeffs = rng.uniform(-1.0, 1.0, len(kept))
    return np.array(kept).T @ coeffs


def _escape_direction(frame: Frame, s: IndexSet, rng: np.random.Generator) -> np.ndarray:
    """A unit vector whose quotient norm is guaranteed at frame-volume scale:
    orthogonal to the whole frame span when the dimension allows, otherwise
    along a removed frame vector."""
    cfg = frame.space
    if frame.dim > frame.n:
        rows = [frame.vectors[i] for i in range(frame.n)]
        g = gram_matrix(cfg, rows)
        for _ in range(200):
            w = rng.normal(size=frame.dim)
            b = np.array([inner(cfg, r, w) for r in rows])
            perp = w - np.array(rows).T @ np.linalg.solve(g, b)
            length = metric_length(cfg, perp)
            if length >= 0.1:
                return perp / length
    j = int(rng.choice(list(s)))
    y = frame.row(j)
    return y / metric_length(cfg, y)


def quotient_norm_axioms(frame: Frame, norm: NNorm, s: IndexSet, trials: int, seed: int) -> list[AxiomReport]:
    """Verify that u -> classm_norm(u, s) is a norm on the quotient:
    homogeneity, the triangle inequality, and definiteness in both
    directions against the rank membership oracle.

    Definiteness probes mix exact members of the kept span with perturbed
    ones at 1e-3 and 1e-6; resolving those reliably needs a reasonably
    conditioned frame (see random_frame's volume floor).
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    _check_compatible(frame, norm)
    s.validate_for(frame.n)
    cfg = frame.space
    tol = cfg.tol
    rng = np.random.default_rng(seed)
    reports = []

    worst = None
    for _ in range(trials):
        u = rng.uniform(-1.0, 1.0, frame.dim)
        alpha = float(rng.uniform(-10.0, 10.0))
        base = classm_norm(frame, norm, u, s)
        value = classm_norm(frame, norm, alpha * u, s)
        scale = abs(alpha) * _classm_scale(frame, u, s)
        gap = abs(value - abs(alpha) * base) / max(abs(alpha) * base, scale, 1e-300)
        if gap > tol.rel and (worst is None or gap > worst.discrepancy):
            worst = Witness((u,), {"alpha": alpha, "value": value, "base": base}, gap)
    reports.append(AxiomReport(Axiom.ABSOLUTE_HOMOGENEITY, worst is None, trials, worst))

    worst = None
    for _ in range(trials):
        u = rng.uniform(-1.0, 1.0, frame.dim)
        v = rng.uniform(-1.0, 1.0, frame.dim)
        lhs = classm_norm(frame, norm, u + v, s)
        rhs = classm_norm(frame, norm, u, s) + classm_norm(frame, norm, v, s)
        scale = max(_classm_scale(frame, u, s), _classm_scale(frame, v, s), _classm_scale(frame, u + v, s))
        violation = (lhs - rhs) / max(scale, 1e-300)
        if violation > tol.rel and (worst is None or violation > worst.discrepancy):
            worst = Witness((u, v), {"lhs": lhs, "rhs": rhs}, violation)
    reports.append(AxiomReport(Axiom.TRIANGLE_INEQUALITY, worst is None, trials, worst))

    # norm ~ 0 must imply membership of the kept span
    worst = None
    for t in range(trials):
        if t % 2 == 0:
            u = _adversarial_member(frame, s, rng)
        else:
            delta = 1e-6 if t % 4 == 1 else 1e-3
            u = _adversarial_member(frame, s, rng) + delta * _escape_direction(frame, s, rng)
        if is_quotient_zero(frame, norm, u, s) and not in_kept_span(frame, u, s):
            value = classm_norm(frame, norm, u, s)
            worst = Witness((u,), {"value": value}, math.inf)
    reports.append(AxiomReport(Axiom.DEFINITENESS_FORWARD, worst is None, trials, worst))

    # members of the kept span must evaluate to zero
    worst = None
    for _ in range(trials):
        u = _adversarial_member(frame, s, rng)
        if not is_quotient_zero(frame, norm, u, s):
            value = classm_norm(frame, norm, u, s)
            gap = value / max(_classm_scale(frame, u, s), 1e-300)
            if worst is None or gap > worst.discrepancy:
                worst = Witness((u,), {"value": value}, gap)
    reports.append(AxiomReport(Axiom.DEFINITENESS_BACKWARD, worst is None, trials, worst))

    return reports
