"""The Gram-determinant norm on n-tuples of vectors, and a seeded checker
for the defining axioms that works against any injected evaluator.

A value of the standard norm is sqrt(max(det(Gram), 0)); the clamp removes
the tiny negative determinants rounding can produce on dependent tuples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

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

__all__ = [
    "NNorm",
    "Axiom",
    "Witness",
    "AxiomReport",
    "standard_norm",
    "standard_nnorm",
    "check_axioms",
    "shift_invariance_check",
]

_TINY = 1e-300  # guards denominators; never meaningful as a norm value


def standard_norm(cfg: SpaceConfig, vs) -> float:
    """Standard n-norm: square root of the Gram determinant of the tuple.

    Requires exactly cfg.arity vectors of dimension cfg.dim. The value is the
    volume of the parallelepiped the vectors span, and is zero exactly when
    they are linearly dependent.

    The Gram matrix is equilibrated by the vector lengths before the
    determinant (value unchanged: det(D G' D) = det(G') * prod(lengths)^2),
    so rounding stays relative to the tuple's scale even when the vectors'
    magnitudes differ by orders of magnitude.
    """
    if len(vs) != cfg.arity:
        raise DimensionMismatch("vector count", cfg.arity, len(vs))
    vectors = [as_vector(v, cfg.dim) for v in vs]
    g = gram_matrix(cfg, vectors)
    lengths = np.sqrt(np.clip(np.diag(g), 0.0, None))
    if np.any(lengths == 0.0):
        return 0.0
    scaled = g / np.outer(lengths, lengths)
    volume = math.sqrt(max(determinant(scaled), 0.0))
    return float(np.prod(lengths)) * volume


@dataclass(frozen=True)
class NNorm:
    """An n-norm candidate: a total evaluator on cfg.arity vectors.

    Only the standard (Gram determinant) evaluator ships built in; custom
    evaluators can be injected so the axiom checker is reusable against
    deliberately broken or exotic norms.
    """

    cfg: SpaceConfig
    kind: str
    evaluator: Callable[[Sequence[np.ndarray]], float]

    def __call__(self, vs) -> float:
        return self.evaluator(vs)


def standard_nnorm(cfg: SpaceConfig) -> NNorm:
    return NNorm(cfg=cfg, kind="standard", evaluator=lambda vs: standard_norm(cfg, vs))


class Axiom(Enum):
    NONNEGATIVITY = "nonnegativity"
    DEFINITENESS_FORWARD = "definiteness_forward"  # norm ~ 0  =>  dependent
    DEFINITENESS_BACKWARD = "definiteness_backward"  # dependent  =>  norm ~ 0
    PERMUTATION_INVARIANCE = "permutation_invariance"
    ABSOLUTE_HOMOGENEITY = "absolute_homogeneity"
    TRIANGLE_INEQUALITY = "triangle_inequality"
    SHIFT_INVARIANCE = "shift_invariance"


@dataclass(frozen=True)
class Witness:
    """A concrete failing input: the tuple, any extra parameters, and the
    measured discrepancy that exceeded the tolerance."""

    vectors: tuple
    detail: dict
    discrepancy: float


@dataclass(frozen=True)
class AxiomReport:
    axiom: Axiom
    passed: bool
    trials: int
    witness: Witness | None = None

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("failing report must carry a witness")


class _Sampler:
    """Seeded tuple generator with control over (near-)dependence.

    Dependence probes are built from unit-length vectors whose spanning
    volume is kept away from zero, so the gap between "dependent up to
    rounding" and "independent at perturbation delta" stays several orders
    of magnitude wide in double precision.
    """

    #: perturbation sizes probing the tolerance boundary
    DEEP_DELTAS = (1e-3, 1e-6, 1e-12)
    #: largest perturbation only: relative comparisons at tol.rel cannot
    #: resolve anything smaller without drowning in determinant rounding
    MILD_DELTA = 1e-3
    MIN_VOLUME = 0.3
    MIN_PERP = 0.3

    def __init__(self, cfg: SpaceConfig, rng: np.random.Generator):
        self.cfg = cfg
        self.rng = rng

    def generic(self) -> list[np.ndarray]:
        return list(self.rng.uniform(-1.0, 1.0, (self.cfg.arity, self.cfg.dim)))

    def _unit(self, v: np.ndarray) -> np.ndarray:
        return v / metric_length(self.cfg, v)

    def _conditioned_units(self, count: int) -> list[np.ndarray]:
        if count == 0:
            return []
        for _ in range(200):
            rows = [self._unit(self.rng.normal(size=self.cfg.dim)) for _ in range(count)]
            vol = math.sqrt(max(determinant(gram_matrix(self.cfg, rows)), 0.0))
            if vol >= self.MIN_VOLUME:
                return rows
        return rows  # pathological metric; keep the last draw

    def _perp_part(self, rows: list[np.ndarray], w: np.ndarray) -> np.ndarray:
        if not rows:
            return w
        g = gram_matrix(self.cfg, rows)
        b = np.array([inner(self.cfg, r, w) for r in rows])
        coeffs = np.linalg.solve(g, b)
        return w - np.array(rows).T @ coeffs

    def _insert(self, rows: list[np.ndarray], special: np.ndarray) -> tuple[list[np.ndarray], int]:
        slot = int(self.rng.integers(0, len(rows) + 1))
        out = rows[:slot] + [special] + rows[slot:]
        return out, slot

    def dependent(self) -> list[np.ndarray]:
        n = self.cfg.arity
        kind = int(self.rng.integers(0, 3))
        if kind == 0 and n >= 2:  # exact combination of the others
            others = self._conditioned_units(n - 1)
            combo = np.array(others).T @ self.rng.uniform(-0.75, 0.75, n - 1)
            if metric_length(self.cfg, combo) > 1e-3:
                combo = self._unit(combo)
            tup, _ = self._insert(others, combo)
            return tup
        if kind == 1 and n >= 2:  # duplicated vector
            others = self._conditioned_units(n - 1)
            dup = others[int(self.rng.integers(0, n - 1))].copy()
            tup, _ = self._insert(others, dup)
            return tup
        # zero vector
        others = self._conditioned_units(n - 1)
        tup, _ = self._insert(others, np.zeros(self.cfg.dim))
        return tup

    def near_dependent(self, delta: float) -> list[np.ndarray]:
        n = self.cfg.arity
        if n == 1:
            return [delta * self._conditioned_units(1)[0]]
        others = self._conditioned_units(n - 1)
        combo = np.array(others).T @ self.rng.uniform(-0.75, 0.75, n - 1)
        if metric_length(self.cfg, combo) > 1e-3:
            combo = self._unit(combo)
        for _ in range(200):
            w = self._unit(self.rng.normal(size=self.cfg.dim))
            perp = self._perp_part(others, w)
            if metric_length(self.cfg, perp) >= self.MIN_PERP:
                break
        tup, _ = self._insert(others, combo + delta * w)
        return tup

    def equality_batch(self, trials: int) -> list[list[np.ndarray]]:
        """Tuples for value-comparison checks: generic plus mild perturbation."""
        out = []
        for t in range(trials):
            if t % 7 == 6:
                out.append(self.near_dependent(self.MILD_DELTA))
            else:
                out.append(self.generic())
        return out

    def boundary_batch(self, trials: int) -> list[tuple[list[np.ndarray], str]]:
        """Tuples for threshold checks, labelled by construction."""
        out = []
        for t in range(trials):
            r = t % 5
            if r == 0:
                out.append((self.dependent(), "dependent"))
            elif r == 1:
                out.append((self.generic(), "generic"))
            else:
                delta = self.DEEP_DELTAS[r - 2]
                out.append((self.near_dependent(delta), f"perturbed:{delta:g}"))
        return out


def _scale(cfg: SpaceConfig, vs) -> float:
    return hadamard_scale(cfg, vs)


def _check_nonnegativity(norm, sampler, trials):
    worst = None
    for vs, label in sampler.boundary_batch(trials):
        value = norm(vs)
        if not (math.isfinite(value) and value >= -norm.cfg.tol.zero):
            gap = -value if math.isfinite(value) else math.inf
            if worst is None or gap > worst.discrepancy:
                worst = Witness(tuple(vs), {"construction": label, "value": value}, gap)
    return worst


def _check_definiteness_forward(norm, sampler, trials):
    # whenever the value collapses to zero scale, the tuple must be dependent
    cfg = norm.cfg
    worst = None
    for vs, label in sampler.boundary_batch(trials):
        value = norm(vs)
        if value <= cfg.tol.zero * _scale(cfg, vs):
            if rank(vs, cfg.tol) == cfg.arity:
                witness = Witness(tuple(vs), {"construction": label, "value": value}, math.inf)
                worst = witness
    return worst


def _check_definiteness_backward(norm, sampler, trials):
    # dependent tuples must evaluate to zero at determinant precision; the
    # threshold is sqrt(tol.zero) because the norm is the root of the Gram
    # determinant, where tol.zero itself lives
    cfg = norm.cfg
    threshold_rel = math.sqrt(cfg.tol.zero)
    worst = None
    for _ in range(trials):
        vs = sampler.dependent()
        value = norm(vs)
        allowed = threshold_rel * _scale(cfg, vs)
        if value > allowed:
            gap = value - allowed
            if worst is None or gap > worst.discrepancy:
                worst = Witness(tuple(vs), {"construction": "dependent", "value": value}, gap)
    return worst


def _zero_band(cfg: SpaceConfig) -> float:
    # norm values are square roots of determinants, where tol.zero lives, so
    # values below sqrt(tol.zero) * scale are indistinguishable from zero
    return math.sqrt(cfg.tol.zero)


def _rel_gap(a: float, b: float, scale: float, band: float) -> float:
    """Relative discrepancy of two norm values of comparable scale.

    Values inside the zero band compare equal: on (near-)dependent tuples the
    computed norm is pure rounding noise, and the definiteness axiom says
    both sides vanish there anyway.
    """
    if max(abs(a), abs(b)) <= band * scale:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b), scale, _TINY)


def _check_permutation(norm, sampler, trials):
    cfg = norm.cfg
    n = cfg.arity
    band = _zero_band(cfg)
    worst = None
    for vs in sampler.equality_batch(trials):
        base = norm(vs)
        scale = _scale(cfg, vs)
        if n <= 4:
            perms = itertools.permutations(range(n))
        else:
            perms = [tuple(sampler.rng.permutation(n)) for _ in range(8)]
        for perm in perms:
            value = norm([vs[i] for i in perm])
            gap = _rel_gap(value, base, scale, band)
            if gap > cfg.tol.rel and (worst is None or gap > worst.discrepancy):
                worst = Witness(tuple(vs), {"permutation": perm, "value": value, "base": base}, gap)
    return worst


def _check_homogeneity(norm, sampler, trials):
    cfg = norm.cfg
    band = _zero_band(cfg)
    worst = None
    for vs in sampler.equality_batch(trials):
        base = norm(vs)
        alpha = float(sampler.rng.uniform(-10.0, 10.0))
        scaled = [alpha * vs[0]] + vs[1:]
        value = norm(scaled)
        gap = _rel_gap(value, abs(alpha) * base, abs(alpha) * _scale(cfg, vs), band)
        if gap > cfg.tol.rel and (worst is None or gap > worst.discrepancy):
            worst = Witness(tuple(vs), {"alpha": alpha, "value": value, "base": base}, gap)
    return worst


def _check_triangle(norm, sampler, trials):
    cfg = norm.cfg
    band = _zero_band(cfg)
    worst = None
    for vs in sampler.equality_batch(trials):
        first_alt = sampler.rng.uniform(-1.0, 1.0, cfg.dim)
        summed = [vs[0] + first_alt] + vs[1:]
        alt = [first_alt] + vs[1:]
        lhs = norm(summed)
        rhs = norm(vs) + norm(alt)
        scale = max(_scale(cfg, summed), _scale(cfg, vs), _scale(cfg, alt))
        if lhs <= band * scale:
            continue  # zero-class left side cannot violate the inequality
        violation = (lhs - rhs) / max(scale, _TINY)
        if violation > cfg.tol.rel and (worst is None or violation > worst.discrepancy):
            worst = Witness(tuple(vs), {"added": first_alt, "lhs": lhs, "rhs": rhs}, violation)
    return worst


def _check_shift(norm, sampler, trials):
    cfg = norm.cfg
    worst = None
    for vs in sampler.equality_batch(trials):
        alphas = sampler.rng.uniform(-5.0, 5.0, cfg.arity - 1) if cfg.arity > 1 else np.zeros(0)
        passed, gap = shift_invariance_check(norm, vs, alphas)
        if not passed and (worst is None or gap > worst.discrepancy):
            worst = Witness(tuple(vs), {"alphas": alphas}, gap)
    return worst


_CHECKS = [
    (Axiom.NONNEGATIVITY, _check_nonnegativity),
    (Axiom.DEFINITENESS_FORWARD, _check_definiteness_forward),
    (Axiom.DEFINITENESS_BACKWARD, _check_definiteness_backward),
    (Axiom.PERMUTATION_INVARIANCE, _check_permutation),
    (Axiom.ABSOLUTE_HOMOGENEITY, _check_homogeneity),
    (Axiom.TRIANGLE_INEQUALITY, _check_triangle),
    (Axiom.SHIFT_INVARIANCE, _check_shift),
]


def check_axioms(norm: NNorm, trials: int, seed: int) -> list[AxiomReport]:
    """Run all seven axiom/identity checks on `trials` seeded tuples each.

    Equality-style checks (permutation, homogeneity, triangle, shift) compare
    values at tol.rel, measured against the tuple's Hadamard scale so that
    rounding near the dependent locus cannot masquerade as a violation.
    Definiteness is wired to the `rank` oracle in both directions, and the
    sample mix includes adversarial near-dependent tuples at perturbations
    1e-3, 1e-6, and 1e-12. Deterministic for a given seed; failures are
    reported with witnesses rather than raised.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    reports = []
    for axiom, fn in _CHECKS:
        sampler = _Sampler(norm.cfg, np.random.default_rng(seed))
        witness = fn(norm, sampler, trials)
        reports.append(AxiomReport(axiom=axiom, passed=witness is None, trials=trials, witness=witness))
    return reports


def shift_invariance_check(norm: NNorm, vs, alphas) -> tuple[bool, float]:
    """Check that adding multiples of the later arguments to the first one
    leaves the norm unchanged. Returns (passed, relative discrepancy)."""
    cfg = norm.cfg
    if len(vs) != cfg.arity:
        raise DimensionMismatch("vector count", cfg.arity, len(vs))
    alphas = np.asarray(alphas, dtype=float)
    if alphas.ndim != 1 or alphas.shape[0] != cfg.arity - 1:
        raise DimensionMismatch("shift coefficient count", cfg.arity - 1, alphas.shape)
    vectors = [as_vector(v, cfg.dim) for v in vs]
    shifted_first = vectors[0] + sum(a * v for a, v in zip(alphas, vectors[1:]))
    base = norm(vectors)
    shifted = norm([shifted_first] + vectors[1:])
    scale = max(_scale(cfg, vectors), _scale(cfg, [shifted_first] + vectors[1:]))
    gap = _rel_gap(base, shifted, scale, _zero_band(cfg))
    return gap <= cfg.tol.rel, gap
