"""Command-line front door: compute norms, run verification suites, and
reproduce the R^5 demonstration, with deterministic JSON/CSV reports.

Exit codes: 0 success, 1 property failure (witnesses printed), 2 usage or
config error. Reports contain no timestamps and are byte-identical for
identical config + seed. The environment variable NNORMKIT_SEED overrides
the seed (and only the seed).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOL, SpaceConfig, Tolerance
from .nnorm import check_axioms, standard_nnorm, standard_norm
from .quotient import (
    Frame,
    IndexSet,
    class1_norm,
    classm_norm,
    coset_invariance_check,
    quotient_norm_axioms,
    random_frame,
    standard_frame,
)
from .topology import (
    Conclusion,
    NormSelection,
    constant,
    convergent_power,
    counterexample_r5,
    covering_check,
    divergent_linear,
    emit_trace_csv,
    enumerate_minimal_covers,
    equivalence_matrix,
    minimal_cover_size,
    oscillating,
)

SEED_ENV_VAR = "NNORMKIT_SEED"
VERIFY_SUITES = ("axioms", "quotient", "convergence", "boundedness", "cauchy", "covering", "all")


class UsageError(Exception):
    """Malformed input or config; maps to exit code 2."""


def fmt(value: float, tol: Tolerance = DEFAULT_TOL) -> str:
    """Human-readable float: 12 significant digits, residual noise as 0."""
    if abs(value) < tol.zero:
        return "0"
    return f"{value:.12g}"


@dataclass
class RunConfig:
    space: SpaceConfig
    frame: Frame
    seed: int
    trials: int
    raw: dict

    @classmethod
    def from_file(cls, path: str | None, fallback_dim: int | None = None, fallback_arity: int | None = None):
        raw: dict = {}
        if path is not None:
            try:
                with open(path, encoding="utf-8") as fh:
                    raw = json.load(fh)
            except OSError as exc:
                raise UsageError(f"cannot read config {path}: {exc}") from exc
            except json.JSONDecodeError as exc:
                raise UsageError(f"config {path} is not valid JSON: {exc}") from exc
        try:
            space_raw = raw.get("space", {})
            dim = int(space_raw.get("dim", fallback_dim if fallback_dim is not None else 3))
            arity = int(space_raw.get("arity", fallback_arity if fallback_arity is not None else min(2, dim)))
            tol_raw = raw.get("tolerances", {})
            tol = Tolerance(
                zero=float(tol_raw.get("zero", DEFAULT_TOL.zero)),
                rel=float(tol_raw.get("rel", DEFAULT_TOL.rel)),
                sym=float(tol_raw.get("sym", DEFAULT_TOL.sym)),
            )
            space = SpaceConfig(dim=dim, arity=arity, metric=space_raw.get("metric"), tol=tol)
            frame_raw = raw.get("frame", "standard-basis")
            if frame_raw == "standard-basis":
                frame = standard_frame(space)
            else:
                frame = Frame(space=space, vectors=np.array(frame_raw, dtype=float))
            seed = int(raw.get("seed", 0))
            trials = int(raw.get("trials", 200))
        except UsageError:
            raise
        except (ValueError, TypeError, KeyError) as exc:
            raise UsageError(f"bad config: {exc}") from exc
        return cls(space=space, frame=frame, seed=seed, trials=trials, raw=raw)


def _resolve_seed(args, config: RunConfig) -> int:
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from exc
    if getattr(args, "seed", None) is not None:
        return args.seed
    return config.seed


def _digest(payload) -> str:
    blob = json.dumps(payload, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def report_json(command: str, inputs: dict, results, failures) -> str:
    doc = {
        "command": command,
        "digest": _digest({"command": command, "inputs": inputs}),
        "inputs": inputs,
        "results": results,
        "failures": failures,
    }
    return json.dumps(doc, sort_keys=True, indent=2, default=str) + "\n"


def _write_output(args, text: str) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_vector(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise UsageError(f"cannot parse vector {text!r}; expected comma-separated numbers") from exc


def _parse_indices(text: str) -> IndexSet:
    try:
        return IndexSet(int(part) for part in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad index set {text!r}: {exc}") from exc


def _parse_selection(text: str, n: int) -> NormSelection:
    try:
        subsets = tuple(_parse_indices(part) for part in text.split(";"))
        return NormSelection(n=n, subsets=subsets)
    except ValueError as exc:
        raise UsageError(f"bad selection {text!r}: {exc}") from exc


def _kv_csv(rows: list[tuple[str, object]]) -> str:
    return "key,value\n" + "".join(f"{k},{v!r}\n" for k, v in rows)


def cmd_norm(args) -> int:
    vectors = [_parse_vector(v) for v in args.vector]
    if not vectors:
        raise UsageError("norm needs at least one vector")
    dims = {len(v) for v in vectors}
    if len(dims) != 1:
        raise UsageError(f"vectors have mixed lengths {sorted(dims)}")
    config = RunConfig.from_file(args.config, fallback_dim=len(vectors[0]), fallback_arity=len(vectors))
    cfg = config.space
    try:
        value = standard_norm(cfg, vectors)
        from .linalg import gram_matrix

        gram = gram_matrix(cfg, vectors)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(f"standard {cfg.arity}-norm = {fmt(value, cfg.tol)}")
    print("gram matrix:")
    for row in gram:
        print("  " + "  ".join(fmt(x, cfg.tol) for x in row))
    inputs = {"config": config.raw, "vectors": vectors}
    results = {"norm": value, "gram": gram.tolist()}
    if args.format == "csv":
        _write_output(args, _kv_csv([("norm", value)] + [(f"gram[{i}][{j}]", gram[i, j]) for i in range(len(gram)) for j in range(len(gram))]))
    else:
        _write_output(args, report_json("norm", inputs, results, []))
    return 0


def cmd_quotient(args) -> int:
    config = RunConfig.from_file(args.config)
    frame, cfg = config.frame, config.space
    u = _parse_vector(args.vector)
    if len(u) != cfg.dim:
        raise UsageError(f"vector length {len(u)} does not match dimension {cfg.dim}")
    s = _parse_indices(args.indices)
    try:
        s.validate_for(frame.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    norm = standard_nnorm(cfg)
    per_class1 = {j: class1_norm(frame, norm, u, j) for j in s}
    total = classm_norm(frame, norm, u, s)
    residual = total - sum(per_class1.values())
    print(f"quotient norm, removed {s} = {fmt(total, cfg.tol)}")
    for j, v in per_class1.items():
        print(f"  class-1 term j={j}: {fmt(v, cfg.tol)}")
    print(f"decomposition residual = {fmt(residual, cfg.tol)}")
    inputs = {"config": config.raw, "vector": u, "indices": s.to_json()}
    results = {
        "classm_norm": total,
        "class1_terms": {str(j): v for j, v in per_class1.items()},
        "residual": residual,
    }
    if args.format == "csv":
        rows = [("classm_norm", total)] + [(f"class1[{j}]", v) for j, v in per_class1.items()] + [("residual", residual)]
        _write_output(args, _kv_csv(rows))
    else:
        _write_output(args, report_json("quotient", inputs, results, []))
    return 0


def cmd_cover(args) -> int:
    n, m = args.n, args.m
    if not 1 <= m <= n:
        raise UsageError(f"need 1 <= m <= n, got n={n}, m={m}")
    size = minimal_cover_size(n, m)
    print(f"least number of class-{m} norms for n={n}: {size}")
    results: dict = {"n": n, "m": m, "minimal_cover_size": size}
    if args.selection:
        selection = _parse_selection(args.selection, n)
        if selection.m != m:
            raise UsageError(f"selection subsets have size {selection.m}, expected {m}")
        covers = covering_check(selection)
        print(f"selection {args.selection} covers {{1..{n}}}: {covers}")
        results["selection"] = selection.to_json()
        results["covers"] = covers
    if args.enumerate:
        try:
            families = enumerate_minimal_covers(n, m)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        print(f"minimal covering families: {len(families)}")
        for fam in families:
            print("  " + " ".join(str(s) for s in fam.subsets))
        results["minimal_families"] = [f.to_json() for f in families]
    _write_output(args, report_json("cover", {"n": n, "m": m}, results, []))
    return 0


def _failure_entry(kind: str, detail: str) -> dict:
    return {"check": kind, "witness": detail}


def _suite_axioms(config: RunConfig, seed: int, trials: int) -> list[dict]:
    failures = []
    cfg = config.space
    grid = [(cfg.arity, cfg.dim)]
    if config.raw.get("space") is None:
        grid = [(n, d) for n in (2, 3) for d in (n, n + 2)]
    for n, d in grid:
        space = SpaceConfig(dim=d, arity=n, tol=cfg.tol)
        for report in check_axioms(standard_nnorm(space), trials=trials, seed=seed):
            if not report.passed:
                failures.append(
                    _failure_entry(
                        f"axiom:{report.axiom.value}",
                        f"n={n} d={d} discrepancy={report.witness.discrepancy:.3e}",
                    )
                )
    return failures


def _suite_quotient(config: RunConfig, seed: int, trials: int) -> list[dict]:
    failures = []
    frame, cfg = config.frame, config.space
    norm = standard_nnorm(cfg)
    rng = np.random.default_rng(seed)
    n = frame.n
    index_sets = [IndexSet((j,)) for j in range(1, n + 1)]
    if n >= 2:
        index_sets.append(IndexSet((1, n)))
    index_sets.append(IndexSet(tuple(range(1, n + 1))))
    for s in index_sets:
        for report in quotient_norm_axioms(frame, norm, s, trials=trials, seed=seed):
            if not report.passed:
                failures.append(
                    _failure_entry(
                        f"quotient:{report.axiom.value}",
                        f"s={s} discrepancy={report.witness.discrepancy:.3e}",
                    )
                )
        for _ in range(trials):
            u = rng.uniform(-1, 1, cfg.dim)
            coeffs = {i: float(rng.uniform(-5, 5)) for i in s.complement(n)}
            passed, gap = coset_invariance_check(frame, norm, u, s, coeffs)
            if not passed:
                failures.append(_failure_entry("quotient:coset_invariance", f"s={s} discrepancy={gap:.3e}"))
    return failures


def _mini_corpus(cfg: SpaceConfig, rng: np.random.Generator) -> list:
    d = cfg.dim
    specs = []
    for _ in range(4):
        x = rng.uniform(-1, 1, d)
        v = rng.uniform(-1, 1, d)
        v[int(rng.integers(0, d))] += 1.0  # keep directions away from zero
        specs.append(convergent_power(x, v, coefficient=float(rng.uniform(0.5, 2.0)), exponent=float(rng.uniform(0.5, 2.0))))
        specs.append(divergent_linear(v))
        specs.append(oscillating(x, v, coefficient=float(rng.uniform(0.25, 2.0))))
        specs.append(constant(x))
    return specs


def _suite_equivalence(config: RunConfig, seed: int, which: str) -> list[dict]:
    failures = []
    cfg = config.space
    norm = standard_nnorm(cfg)
    rng = np.random.default_rng(seed)
    frames = [config.frame] + [random_frame(cfg, rng) for _ in range(2)]
    for spec in _mini_corpus(cfg, rng):
        limit = spec.base if spec.base is not None else np.zeros(cfg.dim)
        for fi, frame in enumerate(frames):
            table = equivalence_matrix(spec, frame, norm, limit)
            conclusions = table.conclusions(which)
            if len(set(conclusions)) != 1:
                failures.append(
                    _failure_entry(
                        f"{which}:cross_class",
                        f"spec={spec.kind.value} frame#{fi} verdicts={[c.value for c in conclusions]}",
                    )
                )
            if which == "cauchy":
                for row in table.rows:
                    if row.convergence.conclusion is Conclusion.CONVERGES and row.cauchy.conclusion is not Conclusion.CAUCHY:
                        failures.append(
                            _failure_entry(
                                "cauchy:convergent_implies_cauchy",
                                f"spec={spec.kind.value} frame#{fi} m={row.m}",
                            )
                        )
    return failures


def _suite_covering(config: RunConfig, seed: int) -> list[dict]:
    failures = []
    for n in range(1, 7):
        for m in range(1, n + 1):
            expected = -(-n // m)
            if minimal_cover_size(n, m) != expected:
                failures.append(_failure_entry("covering:minimal_size", f"n={n} m={m}"))
            try:
                families = enumerate_minimal_covers(n, m)
            except ValueError:
                continue
            if not families:
                failures.append(_failure_entry("covering:no_minimal_family", f"n={n} m={m}"))
            if any(not covering_check(f) for f in families):
                failures.append(_failure_entry("covering:family_does_not_cover", f"n={n} m={m}"))
    record = counterexample_r5(k_max=20)
    if record.noncovering_verdict.conclusion is not Conclusion.CONVERGES:
        failures.append(_failure_entry("covering:counterexample", "two-norm selection should report convergence"))
    if record.covering_verdict.conclusion is not Conclusion.DIVERGES:
        failures.append(_failure_entry("covering:counterexample", "three-norm selection should report divergence"))
    return failures


def cmd_verify(args) -> int:
    config = RunConfig.from_file(args.config)
    seed = _resolve_seed(args, config)
    trials = args.trials if args.trials is not None else config.trials
    if trials < 1:
        raise UsageError(f"trials must be >= 1, got {trials}")
    suite = args.suite
    failures: list[dict] = []
    ran: list[str] = []
    if suite in ("axioms", "all"):
        failures += _suite_axioms(config, seed, trials)
        ran.append("axioms")
    if suite in ("quotient", "all"):
        failures += _suite_quotient(config, seed, max(1, trials // 4))
        ran.append("quotient")
    if suite in ("convergence", "all"):
        failures += _suite_equivalence(config, seed, "convergence")
        ran.append("convergence")
    if suite in ("boundedness", "all"):
        failures += _suite_equivalence(config, seed, "boundedness")
        ran.append("boundedness")
    if suite in ("cauchy", "all"):
        failures += _suite_equivalence(config, seed, "cauchy")
        ran.append("cauchy")
    if suite in ("covering", "all"):
        failures += _suite_covering(config, seed)
        ran.append("covering")
        print(f"minimal cover size for n=5, m=2: {minimal_cover_size(5, 2)}")
    for failure in failures:
        print(f"FAIL {failure['check']}: {failure['witness']}")
    print(f"verify {suite}: {len(failures)} failure(s) across {', '.join(ran)} (seed={seed}, trials={trials})")
    inputs = {"config": config.raw, "suite": suite, "seed": seed, "trials": trials}
    _write_output(args, report_json("verify", inputs, {"suites": ran, "failure_count": len(failures)}, failures))
    return 1 if failures else 0


def cmd_demo_counterexample(args) -> int:
    if args.k < 1:
        raise UsageError(f"--k must be >= 1, got {args.k}")
    record = counterexample_r5(k_max=args.k)
    tol = DEFAULT_TOL
    print("sequence x_k = (0,0,0,0,k) in R^5, standard basis frame")
    print("k   |.|*{1,2}  |.|*{3,4}  |.|*{1,5}")
    for k, v12, v34, v15 in record.rows:
        print(f"{k:<3d} {fmt(v12, tol):>9} {fmt(v34, tol):>9} {fmt(v15, tol):>9}")
    nc = record.noncovering_verdict.conclusion.value
    cv = record.covering_verdict.conclusion.value
    print(f"selection {{1,2}},{{3,4}} covers: {record.noncovering_covers} -> verdict {nc} (false conclusion)")
    print(f"selection {{1,2}},{{3,4}},{{1,5}} covers: {record.covering_covers} -> verdict {cv}")
    if args.format == "csv":
        _write_output(args, emit_trace_csv(record.traces))
    else:
        inputs = {"k": args.k}
        results = {
            "rows": [list(r) for r in record.rows],
            "noncovering": {"covers": record.noncovering_covers, "verdict": nc},
            "covering": {"covers": record.covering_covers, "verdict": cv},
        }
        _write_output(args, report_json("demo.counterexample", inputs, results, []))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nnormkit", description=__doc__.splitlines()[0])

    def add_common(p, with_trials=False):
        p.add_argument("--config", help="JSON config with space/frame/tolerances/seed/trials")
        p.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
        if with_trials:
            p.add_argument("--trials", type=int, default=None, help="samples per randomized check")
        p.add_argument("--output", help="write the report to this path")
        p.add_argument("--format", choices=("json", "csv"), default="json", help="report format")

    sub = parser.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", help="standard n-norm of the given vectors")
    p_norm.add_argument("vector", nargs="+", help="comma-separated coordinates, e.g. 2,0,0")
    add_common(p_norm)

    p_quot = sub.add_parser("quotient", help="quotient norm of a vector for a removed index set")
    p_quot.add_argument("--vector", "-u", required=True, help="comma-separated coordinates")
    p_quot.add_argument("--indices", "-s", required=True, help="removed indices, e.g. 1,2 (1-based)")
    add_common(p_quot)

    p_cover = sub.add_parser("cover", help="covering condition and minimal cover families")
    p_cover.add_argument("--n", type=int, required=True)
    p_cover.add_argument("--m", type=int, required=True)
    p_cover.add_argument("--selection", help="semicolon-separated index sets, e.g. 1,2;3,4")
    p_cover.add_argument("--enumerate", action="store_true", help="list all minimal covering families")
    add_common(p_cover)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=VERIFY_SUITES)
    add_common(p_verify, with_trials=True)

    p_demo = sub.add_parser("demo", help="reproduce bundled demonstrations")
    demo_sub = p_demo.add_subparsers(dest="demo_command", required=True)
    p_cex = demo_sub.add_parser("counterexample", help="the R^5 divergent sequence the covering condition catches")
    p_cex.add_argument("--k", type=int, default=10, help="trace the sequence for k = 1..K")
    add_common(p_cex)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 2
    try:
        if args.command == "norm":
            return cmd_norm(args)
        if args.command == "quotient":
            return cmd_quotient(args)
        if args.command == "cover":
            return cmd_cover(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "demo":
            return cmd_demo_counterexample(args)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
