"""Sequences, verdicts, covering combinatorics, and the R^5 demonstration.

Convergence, boundedness, and Cauchy verdicts with respect to a selection of
quotient norms come in two flavours. For the closed-form sequence kinds the
per-subset norm trace has an explicit limit in the index k, so the verdict is
Analytic and exact. For tabulated data the verdict is Sampled and biased
toward Inconclusive: a finite window can support a conclusion but never
prove one.

Analytic verdicts reduce every subset question to the vector of class-1 norm
values of a handful of fixed vectors (the "profile"). Zero/nonzero
classification happens once per frame index, so verdicts derived from the
same profile can never disagree by rounding: the cross-class equivalences
hold through the same class-1 decomposition that makes them true.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .linalg import DimensionMismatch, SpaceConfig, as_vector, hadamard_scale
from .nnorm import NNorm, standard_nnorm
from .quotient import (
    SPAN_DECISION_REL,
    Frame,
    IndexSet,
    class1_norm,
    class_collection,
    classm_norm,
    standard_frame,
)

__all__ = [
    "SequenceKind",
    "SequenceSpec",
    "convergent_power",
    "divergent_linear",
    "oscillating",
    "constant",
    "custom_sequence",
    "eval_sequence",
    "natural_limit",
    "NormSelection",
    "full_selection",
    "Conclusion",
    "Method",
    "TracePoint",
    "Verdict",
    "converges_wrt",
    "is_cauchy_wrt",
    "is_bounded_wrt",
    "EquivalenceTable",
    "equivalence_matrix",
    "covering_check",
    "minimal_cover_size",
    "enumerate_minimal_covers",
    "closed_set_probe",
    "ClosedSetReport",
    "CounterexampleRecord",
    "counterexample_r5",
    "emit_trace_csv",
    "parse_trace_csv",
    "class1_profile",
    "zero_profile",
    "AnalyticTraces",
]

DEFAULT_EVIDENCE_KS = (1, 2, 5, 10, 100)


class SequenceKind(Enum):
    CONVERGENT_POWER = "convergent_power"  # x + c * k**(-p) * v
    DIVERGENT_LINEAR = "divergent_linear"  # k * v
    OSCILLATING = "oscillating"  # x + (-1)**k * c * v
    CONSTANT = "constant"  # x
    CUSTOM = "custom"  # finite table of (k, vector)


@dataclass(frozen=True, eq=False)
class SequenceSpec:
    """A parametric sequence family in R^d with exact per-k evaluation."""

    kind: SequenceKind
    base: np.ndarray | None = None
    direction: np.ndarray | None = None
    coefficient: float = 1.0
    exponent: float = 1.0
    table: tuple[tuple[int, np.ndarray], ...] = ()

    def __post_init__(self):
        if self.kind is SequenceKind.CUSTOM:
            if not self.table:
                raise ValueError("custom sequence needs a nonempty table")
            ks = [k for k, _ in self.table]
            if any(k < 1 for k in ks) or any(a >= b for a, b in zip(ks, ks[1:])):
                raise ValueError("table indices must be strictly increasing and >= 1")
            dim = len(as_vector(self.table[0][1]))
            frozen = tuple((int(k), as_vector(v, dim)) for k, v in self.table)
            object.__setattr__(self, "table", frozen)
            return
        if self.base is None and self.kind is not SequenceKind.DIVERGENT_LINEAR:
            raise ValueError(f"{self.kind.value} needs a base point")
        if self.base is not None:
            object.__setattr__(self, "base", as_vector(self.base))
        if self.kind is SequenceKind.CONSTANT:
            return
        if self.direction is None:
            raise ValueError(f"{self.kind.value} needs a direction vector")
        direction = as_vector(self.direction, None if self.base is None else self.base.shape[0])
        if not np.any(direction != 0.0):
            raise ValueError("direction vector must be nonzero")
        object.__setattr__(self, "direction", direction)
        if self.kind is SequenceKind.CONVERGENT_POWER and not self.exponent > 0.0:
            raise ValueError(f"exponent must be > 0, got {self.exponent}")

    @property
    def dim(self) -> int:
        if self.kind is SequenceKind.CUSTOM:
            return self.table[0][1].shape[0]
        if self.base is not None:
            return self.base.shape[0]
        return self.direction.shape[0]

    def to_json(self) -> dict:
        if self.kind is SequenceKind.CUSTOM:
            return {"kind": self.kind.value, "table": [[k, v.tolist()] for k, v in self.table]}
        out: dict = {"kind": self.kind.value}
        if self.base is not None:
            out["base"] = self.base.tolist()
        if self.direction is not None:
            out["direction"] = self.direction.tolist()
            out["coefficient"] = self.coefficient
        if self.kind is SequenceKind.CONVERGENT_POWER:
            out["exponent"] = self.exponent
        return out

    @classmethod
    def from_json(cls, obj) -> "SequenceSpec":
        kind = SequenceKind(obj["kind"])
        if kind is SequenceKind.CUSTOM:
            return custom_sequence([(int(k), np.array(v, dtype=float)) for k, v in obj["table"]])
        return cls(
            kind=kind,
            base=None if obj.get("base") is None else np.array(obj["base"], dtype=float),
            direction=None if obj.get("direction") is None else np.array(obj["direction"], dtype=float),
            coefficient=float(obj.get("coefficient", 1.0)),
            exponent=float(obj.get("exponent", 1.0)),
        )


def convergent_power(limit, direction, coefficient: float = 1.0, exponent: float = 1.0) -> SequenceSpec:
    """x_k = limit + coefficient * k**(-exponent) * direction."""
    return SequenceSpec(
        kind=SequenceKind.CONVERGENT_POWER,
        base=limit,
        direction=direction,
        coefficient=coefficient,
        exponent=exponent,
    )


def divergent_linear(direction) -> SequenceSpec:
    """x_k = k * direction."""
    return SequenceSpec(kind=SequenceKind.DIVERGENT_LINEAR, direction=direction)


def oscillating(center, direction, coefficient: float = 1.0) -> SequenceSpec:
    """x_k = center + (-1)**k * coefficient * direction."""
    return SequenceSpec(kind=SequenceKind.OSCILLATING, base=center, direction=direction, coefficient=coefficient)


def constant(point) -> SequenceSpec:
    return SequenceSpec(kind=SequenceKind.CONSTANT, base=point)


def custom_sequence(table) -> SequenceSpec:
    return SequenceSpec(kind=SequenceKind.CUSTOM, table=tuple((int(k), v) for k, v in table))


def eval_sequence(spec: SequenceSpec, k: int):
    """Exact value of the k-th term, k >= 1."""
    if k < 1:
        raise ValueError(f"sequences are indexed from k = 1, got {k}")
    if spec.kind is SequenceKind.CONVERGENT_POWER:
        return spec.base + spec.coefficient * float(k) ** (-spec.exponent) * spec.direction
    if spec.kind is SequenceKind.DIVERGENT_LINEAR:
        return float(k) * spec.direction
    if spec.kind is SequenceKind.OSCILLATING:
        return spec.base + (-1.0) ** k * spec.coefficient * spec.direction
    if spec.kind is SequenceKind.CONSTANT:
        return spec.base.copy()
    for kk, v in spec.table:
        if kk == k:
            return v.copy()
    raise ValueError(f"k={k} is not in the custom table")


def natural_limit(spec: SequenceSpec):
    """The limit of the sequence in R^d, or None if it does not converge.

    Convergence here is genuine (full-collection) convergence, which does not
    depend on any frame.
    """
    if spec.kind in (SequenceKind.CONVERGENT_POWER, SequenceKind.CONSTANT):
        return spec.base.copy()
    if spec.kind is SequenceKind.OSCILLATING and spec.coefficient == 0.0:
        return spec.base.copy()
    return None


@dataclass(frozen=True)
class NormSelection:
    """A chosen family of same-size index sets out of a class collection."""

    n: int
    subsets: tuple[IndexSet, ...]

    def __post_init__(self):
        if not self.subsets:
            raise ValueError("selection needs at least one index set")
        subsets = tuple(self.subsets)
        sizes = {s.m for s in subsets}
        if len(sizes) != 1:
            raise ValueError(f"selection mixes subset sizes {sorted(sizes)}")
        if len(set(subsets)) != len(subsets):
            raise ValueError("selection contains duplicate index sets")
        for s in subsets:
            s.validate_for(self.n)
        object.__setattr__(self, "subsets", subsets)

    @property
    def m(self) -> int:
        return self.subsets[0].m

    def union(self) -> set[int]:
        out: set[int] = set()
        for s in self.subsets:
            out |= set(s.indices)
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "subsets": [s.to_json() for s in self.subsets]}

    @classmethod
    def from_json(cls, obj) -> "NormSelection":
        return cls(n=int(obj["n"]), subsets=tuple(IndexSet.from_json(s) for s in obj["subsets"]))


def full_selection(n: int, m: int) -> NormSelection:
    """The whole class-m collection as a selection."""
    return NormSelection(n=n, subsets=class_collection(n, m).members)


class Conclusion(Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    CAUCHY = "cauchy"
    NOT_CAUCHY = "not_cauchy"
    INCONCLUSIVE = "inconclusive"


class Method(Enum):
    ANALYTIC = "analytic"
    SAMPLED = "sampled"


class TracePoint(NamedTuple):
    k: int
    subset: IndexSet
    value: float


@dataclass(frozen=True)
class Verdict:
    conclusion: Conclusion
    method: Method
    limit: np.ndarray | None = None
    bound: float | None = None
    evidence: tuple[TracePoint, ...] = ()
    window: tuple[int, int] | None = None

    def __post_init__(self):
        if self.method is Method.SAMPLED and self.window is None:
            raise ValueError("sampled verdicts must carry their window")


# ---------------------------------------------------------------------------
# class-1 profiles: the analytic backbone


def class1_profile(frame: Frame, norm: NNorm, w) -> np.ndarray:
    """Vector of the n class-1 norm values of w."""
    w = as_vector(w, frame.dim)
    return np.array([class1_norm(frame, norm, w, j) for j in range(1, frame.n + 1)])


def zero_profile(frame: Frame, norm: NNorm, w) -> np.ndarray:
    """Per-index zero classification of the class-1 values of w.

    Entry j-1 answers: is the coset of w trivial after removing y_j? The
    threshold is SPAN_DECISION_REL relative to each evaluated tuple's scale.
    """
    w = as_vector(w, frame.dim)
    cfg = frame.space
    values = class1_profile(frame, norm, w)
    flags = np.zeros(frame.n, dtype=bool)
    for j in range(1, frame.n + 1):
        scale = hadamard_scale(cfg, [w] + frame.without(j))
        flags[j - 1] = values[j - 1] <= SPAN_DECISION_REL * scale
    return flags


def _subset_zero(flags: np.ndarray, s: IndexSet) -> bool:
    # classm_norm is a sum of nonnegative class-1 terms: zero iff all are
    return bool(all(flags[j - 1] for j in s))


class AnalyticTraces:
    """Per-subset limiting behaviour of the norm traces of a closed-form
    sequence, relative to a candidate limit (where one is involved)."""

    def __init__(self, spec: SequenceSpec, frame: Frame, norm: NNorm, limit=None):
        if spec.kind is SequenceKind.CUSTOM:
            raise ValueError("analytic traces need a closed-form sequence")
        if spec.dim != frame.dim:
            raise DimensionMismatch("sequence dimension", frame.dim, spec.dim)
        self.spec = spec
        self.frame = frame
        self.norm = norm
        self.limit = None if limit is None else as_vector(limit, frame.dim)
        kind = spec.kind
        if kind in (SequenceKind.CONSTANT, SequenceKind.CONVERGENT_POWER):
            if self.limit is not None:
                self._w_flags = zero_profile(frame, norm, spec.base - self.limit)
                self._w_values = class1_profile(frame, norm, spec.base - self.limit)
        elif kind is SequenceKind.OSCILLATING:
            if self.limit is not None:
                w = spec.base - self.limit
                cv = spec.coefficient * spec.direction
                self._plus_flags = zero_profile(frame, norm, w + cv)
                self._minus_flags = zero_profile(frame, norm, w - cv)
                self._plus_values = class1_profile(frame, norm, w + cv)
                self._minus_values = class1_profile(frame, norm, w - cv)
            self._v_flags = zero_profile(frame, norm, spec.coefficient * spec.direction)
        elif kind is SequenceKind.DIVERGENT_LINEAR:
            self._v_flags = zero_profile(frame, norm, spec.direction)
            if self.limit is not None:
                self._l_flags = zero_profile(frame, norm, self.limit)

    def trace_limit_zero(self, s: IndexSet) -> bool:
        """Does classm_norm(x_k - limit, s) tend to zero?"""
        kind = self.spec.kind
        if kind in (SequenceKind.CONSTANT, SequenceKind.CONVERGENT_POWER):
            return _subset_zero(self._w_flags, s)
        if kind is SequenceKind.OSCILLATING:
            return _subset_zero(self._plus_flags, s) and _subset_zero(self._minus_flags, s)
        # divergent linear: the kv part must lie in the kept span, after
        # which the trace is constantly the norm of the (negated) limit
        return _subset_zero(self._v_flags, s) and _subset_zero(self._l_flags, s)

    def cauchy_on(self, s: IndexSet) -> bool:
        """Does classm_norm(x_k - x_l, s) tend to zero as k, l -> oo?"""
        kind = self.spec.kind
        if kind in (SequenceKind.CONSTANT, SequenceKind.CONVERGENT_POWER):
            return True
        if kind is SequenceKind.OSCILLATING:
            return self.spec.coefficient == 0.0 or _subset_zero(self._v_flags, s)
        return _subset_zero(self._v_flags, s)

    def bounded_on(self, s: IndexSet) -> tuple[bool, float]:
        """Is sup_k classm_norm(x_k, s) finite, and an analytic bound for it."""
        spec, frame, norm = self.spec, self.frame, self.norm
        kind = spec.kind
        if kind is SequenceKind.CONSTANT:
            return True, classm_norm(frame, norm, spec.base, s)
        if kind is SequenceKind.CONVERGENT_POWER:
            # k >= 1 so |c| k**-p <= |c|
            bound = classm_norm(frame, norm, spec.base, s) + abs(spec.coefficient) * classm_norm(
                frame, norm, spec.direction, s
            )
            return True, bound
        if kind is SequenceKind.OSCILLATING:
            cv = spec.coefficient * spec.direction
            bound = max(
                classm_norm(frame, norm, spec.base + cv, s),
                classm_norm(frame, norm, spec.base - cv, s),
            )
            return True, bound
        if _subset_zero(self._v_flags, s):
            # kv stays in the kept span, so every coset is the zero coset
            return True, 0.0
        return False, math.inf


def _difference_trace(spec: SequenceSpec, frame: Frame, norm: NNorm, limit, k: int, s: IndexSet) -> float:
    w = eval_sequence(spec, k) if limit is None else eval_sequence(spec, k) - limit
    return classm_norm(frame, norm, w, s)


def _evidence_for(spec, frame, norm, limit, selection, ks) -> tuple[TracePoint, ...]:
    points = []
    for s in selection.subsets:
        for k in ks:
            try:
                value = _difference_trace(spec, frame, norm, limit, int(k), s)
            except ValueError:
                continue  # outside a custom table window
            points.append(TracePoint(int(k), s, value))
    return tuple(points)


def _validate_selection(frame: Frame, selection: NormSelection) -> None:
    if selection.n != frame.n:
        raise DimensionMismatch("selection arity", frame.n, selection.n)


def _zero_floor(frame: Frame, norm: NNorm, w, s: IndexSet) -> float:
    cfg = frame.space
    scale = sum(hadamard_scale(cfg, [as_vector(w, frame.dim)] + frame.without(j)) for j in s)
    return SPAN_DECISION_REL * scale


def converges_wrt(
    spec: SequenceSpec,
    frame: Frame,
    norm: NNorm,
    selection: NormSelection,
    candidate_limit,
    evidence_ks: Sequence[int] = DEFAULT_EVIDENCE_KS,
) -> Verdict:
    """Does the sequence converge to the candidate limit with respect to the
    selected quotient norms?

    Closed-form kinds get an exact Analytic verdict from the per-subset trace
    limits; note that a selection violating the covering condition can
    genuinely declare a divergent sequence convergent (that is the point of
    the covering analysis, not a defect). Custom tables get a Sampled verdict:
    Converges only when every subset trace is nonincreasing and decays to a
    quarter of its starting value (or sits at zero scale); otherwise
    Inconclusive.
    """
    _validate_selection(frame, selection)
    limit = as_vector(candidate_limit, frame.dim)
    if spec.kind is not SequenceKind.CUSTOM:
        traces = AnalyticTraces(spec, frame, norm, limit)
        ok = all(traces.trace_limit_zero(s) for s in selection.subsets)
        evidence = _evidence_for(spec, frame, norm, limit, selection, evidence_ks)
        if ok:
            return Verdict(Conclusion.CONVERGES, Method.ANALYTIC, limit=limit, evidence=evidence)
        return Verdict(Conclusion.DIVERGES, Method.ANALYTIC, evidence=evidence)

    ks = [k for k, _ in spec.table]
    window = (ks[0], ks[-1])
    all_good = True
    evidence = []
    for s in selection.subsets:
        values = []
        floor = 0.0
        for k in ks:
            w = eval_sequence(spec, k) - limit
            values.append(classm_norm(frame, norm, w, s))
            floor = max(floor, _zero_floor(frame, norm, w, s))
        evidence.extend(TracePoint(k, s, v) for k, v in zip(ks, values))
        if all(v <= floor for v in values):
            continue
        nonincreasing = all(a >= b - floor for a, b in zip(values, values[1:]))
        decayed = values[-1] <= 0.25 * values[0] or values[-1] <= floor
        if not (nonincreasing and decayed and len(values) >= 3):
            all_good = False
    if all_good:
        return Verdict(Conclusion.CONVERGES, Method.SAMPLED, limit=limit, evidence=tuple(evidence), window=window)
    return Verdict(Conclusion.INCONCLUSIVE, Method.SAMPLED, evidence=tuple(evidence), window=window)


def is_cauchy_wrt(
    spec: SequenceSpec,
    frame: Frame,
    norm: NNorm,
    selection: NormSelection,
    evidence_ks: Sequence[int] = DEFAULT_EVIDENCE_KS,
) -> Verdict:
    """Cauchy verdict with respect to the selected quotient norms.

    Evidence rows sample the doubled-index differences x_{2k} - x_k, which
    expose both decay and linear growth. For custom tables the verdict is
    Sampled: Cauchy when the tail diameters shrink, otherwise Inconclusive.
    """
    _validate_selection(frame, selection)
    if spec.kind is not SequenceKind.CUSTOM:
        traces = AnalyticTraces(spec, frame, norm)
        ok = all(traces.cauchy_on(s) for s in selection.subsets)
        evidence = []
        for s in selection.subsets:
            for k in evidence_ks:
                diff = eval_sequence(spec, 2 * int(k)) - eval_sequence(spec, int(k))
                evidence.append(TracePoint(int(k), s, classm_norm(frame, norm, diff, s)))
        conclusion = Conclusion.CAUCHY if ok else Conclusion.NOT_CAUCHY
        return Verdict(conclusion, Method.ANALYTIC, evidence=tuple(evidence))

    ks = [k for k, _ in spec.table]
    window = (ks[0], ks[-1])
    values = {k: v for k, v in spec.table}
    all_good = True
    evidence = []
    for s in selection.subsets:
        diameters = []
        # only tails with at least two points say anything about a diameter
        for t in range(len(ks) - 1):
            tail = ks[t:]
            diam = max(
                classm_norm(frame, norm, values[a] - values[b], s) for a in tail for b in tail
            )
            diameters.append(diam)
            evidence.append(TracePoint(tail[0], s, diam))
        if not diameters:
            all_good = False
            continue
        floor = _zero_floor(frame, norm, values[ks[0]], s)
        if all(d <= floor for d in diameters):
            continue
        nonincreasing = all(a >= b - floor for a, b in zip(diameters, diameters[1:]))
        decayed = diameters[-1] <= 0.25 * diameters[0] or diameters[-1] <= floor
        if not (nonincreasing and decayed and len(diameters) >= 3):
            all_good = False
    if all_good:
        return Verdict(Conclusion.CAUCHY, Method.SAMPLED, evidence=tuple(evidence), window=window)
    return Verdict(Conclusion.INCONCLUSIVE, Method.SAMPLED, evidence=tuple(evidence), window=window)


def is_bounded_wrt(
    points_or_spec,
    frame: Frame,
    norm: NNorm,
    selection: NormSelection,
    evidence_ks: Sequence[int] = DEFAULT_EVIDENCE_KS,
) -> Verdict:
    """Boundedness verdict for a finite point set or a sequence spec.

    Finite point sets are always Bounded, with witness M equal to the exact
    maximum over points and subsets. Closed-form specs get an Analytic
    verdict from the trace formula.
    """
    _validate_selection(frame, selection)
    if isinstance(points_or_spec, SequenceSpec):
        spec = points_or_spec
        if spec.kind is SequenceKind.CUSTOM:
            points = [v for _, v in spec.table]
            ks = [k for k, _ in spec.table]
            evidence, best = _max_over_points(points, frame, norm, selection, ks)
            return Verdict(
                Conclusion.BOUNDED,
                Method.SAMPLED,
                bound=best,
                evidence=evidence,
                window=(ks[0], ks[-1]),
            )
        traces = AnalyticTraces(spec, frame, norm)
        bounds = []
        for s in selection.subsets:
            ok, bound = traces.bounded_on(s)
            if not ok:
                evidence = _evidence_for(spec, frame, norm, None, selection, evidence_ks)
                return Verdict(Conclusion.UNBOUNDED, Method.ANALYTIC, evidence=evidence)
            bounds.append(bound)
        evidence = _evidence_for(spec, frame, norm, None, selection, evidence_ks)
        return Verdict(Conclusion.BOUNDED, Method.ANALYTIC, bound=max(bounds), evidence=evidence)

    points = [as_vector(p, frame.dim) for p in points_or_spec]
    if not points:
        raise ValueError("boundedness needs a nonempty point set")
    evidence, best = _max_over_points(points, frame, norm, selection, range(1, len(points) + 1))
    return Verdict(
        Conclusion.BOUNDED,
        Method.SAMPLED,
        bound=best,
        evidence=evidence,
        window=(1, len(points)),
    )


def _max_over_points(points, frame, norm, selection, ks):
    best = 0.0
    evidence = []
    for k, p in zip(ks, points):
        for s in selection.subsets:
            value = classm_norm(frame, norm, p, s)
            evidence.append(TracePoint(int(k), s, value))
            best = max(best, value)
    return tuple(evidence), best


@dataclass(frozen=True)
class EquivalenceRow:
    m: int
    convergence: Verdict
    boundedness: Verdict
    cauchy: Verdict


@dataclass(frozen=True)
class EquivalenceTable:
    rows: tuple[EquivalenceRow, ...]

    def conclusions(self, which: str) -> list[Conclusion]:
        return [getattr(row, which).conclusion for row in self.rows]

    def agrees(self) -> bool:
        return all(
            len(set(self.conclusions(which))) == 1
            for which in ("convergence", "boundedness", "cauchy")
        )


def equivalence_matrix(spec: SequenceSpec, frame: Frame, norm: NNorm, candidate_limit) -> EquivalenceTable:
    """Convergence, boundedness, and Cauchy verdicts against the FULL class-m
    collection for every m = 1..n. The cross-class equivalences require each
    column to agree across rows; the test suite asserts exactly that."""
    if spec.kind is SequenceKind.CUSTOM:
        raise ValueError("equivalence matrix needs a closed-form sequence")
    rows = []
    for m in range(1, frame.n + 1):
        sel = full_selection(frame.n, m)
        rows.append(
            EquivalenceRow(
                m=m,
                convergence=converges_wrt(spec, frame, norm, sel, candidate_limit, evidence_ks=(1, 10)),
                boundedness=is_bounded_wrt(spec, frame, norm, sel, evidence_ks=(1, 10)),
                cauchy=is_cauchy_wrt(spec, frame, norm, sel, evidence_ks=(1, 10)),
            )
        )
    return EquivalenceTable(rows=tuple(rows))


# ---------------------------------------------------------------------------
# covering combinatorics


def covering_check(selection: NormSelection) -> bool:
    """Does the union of the selected index sets cover {1..n}?"""
    return selection.union() >= set(range(1, selection.n + 1))


def minimal_cover_size(n: int, m: int) -> int:
    """Least number of size-m subsets whose union can cover {1..n}."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    return -(-n // m)


ENUMERATION_LIMIT = 7


def enumerate_minimal_covers(n: int, m: int) -> list[NormSelection]:
    """All families of exactly minimal_cover_size(n, m) size-m subsets whose
    union covers {1..n}, deduplicated up to family order. Guarded to n <= 7:
    beyond that the family space explodes."""
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration is guarded to n <= {ENUMERATION_LIMIT}, got n={n}")
    size = minimal_cover_size(n, m)
    members = class_collection(n, m).members
    out = []
    for family in combinations(members, size):
        union: set[int] = set()
        for s in family:
            union |= set(s.indices)
        if union >= set(range(1, n + 1)):
            out.append(NormSelection(n=n, subsets=family))
    return out


# ---------------------------------------------------------------------------
# closed-set probe


@dataclass(frozen=True)
class ClosedSetEntry:
    spec: SequenceSpec
    limit: np.ndarray
    limit_in_set: bool


@dataclass(frozen=True)
class ClosedSetReport:
    entries: tuple[ClosedSetEntry, ...]
    sampled_ks: tuple[int, ...]

    @property
    def witnesses(self) -> tuple[ClosedSetEntry, ...]:
        """Entries whose limit escaped the set: each one falsifies closedness."""
        return tuple(e for e in self.entries if not e.limit_in_set)

    @property
    def all_limits_inside(self) -> bool:
        return not self.witnesses


def closed_set_probe(
    specs: Sequence[SequenceSpec],
    membership: Callable[[np.ndarray], bool],
    sample_ks: Sequence[int] = tuple(range(1, 51)),
) -> ClosedSetReport:
    """Sampled falsification probe for closedness of a set K given by a
    membership predicate.

    Every spec must converge (closed form) and have all sampled terms inside
    K; the report then says, per spec, whether the limit stayed in K. A
    failing entry is a witness that K is not closed; an all-clear is never a
    proof of closedness.
    """
    entries = []
    ks = tuple(int(k) for k in sample_ks)
    for spec in specs:
        limit = natural_limit(spec)
        if limit is None:
            raise ValueError(f"sequence kind {spec.kind.value} does not converge; the probe needs limits")
        for k in ks:
            if not membership(eval_sequence(spec, k)):
                raise ValueError(f"sequence term k={k} is outside the set; the probe samples inside K")
        entries.append(ClosedSetEntry(spec=spec, limit=limit, limit_in_set=bool(membership(limit))))
    return ClosedSetReport(entries=tuple(entries), sampled_ks=ks)


# ---------------------------------------------------------------------------
# the R^5 demonstration


@dataclass(frozen=True)
class CounterexampleRecord:
    """Trace table and paired verdicts for the sequence x_k = k e_5 in R^5.

    Removing {1,2} or {3,4} keeps e_5 in the kept span, so those traces are
    identically zero and the two-norm selection wrongly reports convergence;
    the {1,5} trace equals k and exposes the divergence once added.
    """

    k_max: int
    rows: tuple[tuple[int, float, float, float], ...]  # (k, value_12, value_34, value_15)
    noncovering_selection: NormSelection
    covering_selection: NormSelection
    noncovering_covers: bool
    covering_covers: bool
    noncovering_verdict: Verdict
    covering_verdict: Verdict

    @property
    def traces(self) -> tuple[TracePoint, ...]:
        s12, s34 = self.noncovering_selection.subsets
        s15 = self.covering_selection.subsets[-1]
        points = []
        for k, v12, v34, v15 in self.rows:
            points.append(TracePoint(k, s12, v12))
            points.append(TracePoint(k, s34, v34))
            points.append(TracePoint(k, s15, v15))
        return tuple(points)


def counterexample_r5(k_max: int = 100, frame: Frame | None = None) -> CounterexampleRecord:
    """Reproduce the R^5 demonstration: x_k = (0,0,0,0,k) against the
    standard basis frame, identity metric."""
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    if frame is None:
        frame = standard_frame(SpaceConfig(dim=5, arity=5))
    if frame.n != 5 or frame.dim != 5:
        raise DimensionMismatch("counterexample space", (5, 5), (frame.n, frame.dim))
    if frame.space.metric is not None:
        raise ValueError("counterexample needs the identity metric")
    if not np.array_equal(frame.vectors, np.eye(5)):
        raise ValueError("counterexample needs the standard basis frame")
    norm = standard_nnorm(frame.space)
    spec = divergent_linear(np.eye(5)[4])
    s12, s34, s15 = IndexSet((1, 2)), IndexSet((3, 4)), IndexSet((1, 5))
    noncovering = NormSelection(n=5, subsets=(s12, s34))
    covering = NormSelection(n=5, subsets=(s12, s34, s15))
    zero = np.zeros(5)
    rows = []
    for k in range(1, k_max + 1):
        x_k = eval_sequence(spec, k)
        rows.append(
            (
                k,
                classm_norm(frame, norm, x_k, s12),
                classm_norm(frame, norm, x_k, s34),
                classm_norm(frame, norm, x_k, s15),
            )
        )
    return CounterexampleRecord(
        k_max=k_max,
        rows=tuple(rows),
        noncovering_selection=noncovering,
        covering_selection=covering,
        noncovering_covers=covering_check(noncovering),
        covering_covers=covering_check(covering),
        noncovering_verdict=converges_wrt(spec, frame, norm, noncovering, zero, evidence_ks=(1, k_max)),
        covering_verdict=converges_wrt(spec, frame, norm, covering, zero, evidence_ks=(1, k_max)),
    )


# ---------------------------------------------------------------------------
# trace CSV round-trip


def emit_trace_csv(points: Sequence[TracePoint]) -> str:
    """CSV with columns (k, subset, value); values use repr so parsing them
    back recovers the floats exactly."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["k", "subset", "value"])
    for p in points:
        writer.writerow([p.k, ",".join(str(i) for i in p.subset.indices), repr(p.value)])
    return buf.getvalue()


def parse_trace_csv(text: str) -> tuple[TracePoint, ...]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["k", "subset", "value"]:
        raise ValueError(f"unexpected trace header: {header}")
    out = []
    for row in reader:
        if not row:
            continue
        k, subset, value = row
        out.append(TracePoint(int(k), IndexSet(int(i) for i in subset.split(",")), float(value)))
    return tuple(out)
