"""Command-line interface: generation, solving, classification, pruning, experiments.

Exit codes: 0 success, 2 usage or malformed input, 3 resource cap exceeded,
4 internal invariant violation (a bug).  All outputs are deterministic given
flags and seeds; wall-time measurements go to a separate timings file that is
documented as outside the determinism contract.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from dataclasses import fields, replace

from . import bounding, classify, experiments, formats, generator
from .core import MSPInstance, StableSet
from .errors import InvariantViolationError, ResourceLimitError
from .experiments import GridSpec
from .generator import MGSResult, SolverPath
from .instgen import CONFIGURATIONS, ConfigSpec, assemble_instance
from .ndfilter import (
    DEFAULT_BUFFER_LIMIT,
    DEFAULT_PROVENANCE_CAP,
    compute_provenance,
    enumerate_full_sum,
    filter_nondominated_naive,
    nd_sum,
)

ORACLE_ENUMERATION_CAP = 2 * 10**6
OUT_DIR_ENV = "MINKSUM_OUT_DIR"


def _resolve(path: str) -> str:
    base = os.environ.get(OUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def _write_text(path: str, text: str) -> None:
    path = _resolve(path)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _read_instance(path: str) -> formats.InstanceDocument:
    with open(_resolve(path), "r", encoding="utf-8") as fh:
        return formats.parse_instance(fh.read())


def cmd_generate(args) -> int:
    cfg = ConfigSpec(
        p=args.p,
        S=args.S,
        cardinality=args.n,
        configuration=args.config,
        seed=args.seed,
        hypercube_max=args.hypercube_max,
    )
    gen = assemble_instance(cfg)
    _write_text(args.out, formats.serialize_instance(formats.InstanceDocument.from_generated(gen)))
    return 0


def cmd_ndsum(args) -> int:
    doc = _read_instance(args.infile)
    instance = doc.instance
    if args.oracle:
        if instance.product_size() > ORACLE_ENUMERATION_CAP:
            raise ResourceLimitError("oracle_enumeration_cap", ORACLE_ENUMERATION_CAP)
        nd = filter_nondominated_naive(enumerate_full_sum(instance))
        provenance = (
            compute_provenance(instance, nd, args.provenance_cap)
            if args.provenance
            else None
        )
    else:
        buffer_limit = args.buffer if args.buffer else DEFAULT_BUFFER_LIMIT
        nd, provenance = nd_sum(
            instance,
            buffer_limit=buffer_limit,
            want_provenance=args.provenance,
            provenance_cap=args.provenance_cap,
        )
    _write_text(args.out, formats.serialize_nd_sum(nd, provenance))
    return 0


def cmd_classify(args) -> int:
    doc = _read_instance(args.infile)
    instance = doc.instance
    if args.set == "sum":
        target, _ = nd_sum(instance)
    else:
        k = int(args.set)
        if not 1 <= k <= instance.S:
            raise ValueError(f"--set must be 'sum' or 1..{instance.S}")
        target = instance.local_sets[k - 1]
    ynse, ynsne, ynu = classify.classify_set(target)
    label_of = {}
    for bucket, label in (
        (ynse, classify.Classification.EXTREME_SUPPORTED),
        (ynsne, classify.Classification.SUPPORTED_NON_EXTREME),
        (ynu, classify.Classification.UNSUPPORTED),
    ):
        for pt in bucket:
            label_of[pt] = label
    labels = [label_of[pt] for pt in target.points]
    _write_text(args.out, formats.classification_csv(target, labels))
    return 0


def _exhaustive_mgs_result(instance: MSPInstance) -> MGSResult:
    best, optima = generator.exhaustive_minimum_generator(instance)
    nd, provenance = nd_sum(instance, want_provenance=True)
    fixed = generator.fixed_sets(instance, nd, provenance)
    cand = generator.candidate_sets(instance, nd, provenance)
    fixed_idx = generator._index_sets(instance, fixed)
    cand_idx = generator._index_sets(instance, cand)
    optima_sorted = sorted(optima, key=lambda sup: tuple(sorted(s) for s in sup))
    gens = tuple(
        generator._generator_from_indices(instance, sup, fixed_idx, cand_idx)
        for sup in optima_sorted
    )
    return MGSResult(
        generator=gens[0],
        total_cardinality=best,
        unique=len(gens) == 1,
        solver_path=SolverPath.EXHAUSTIVE_ORACLE,
        optima=gens,
    )


def cmd_mgs(args) -> int:
    doc = _read_instance(args.infile)
    instance = doc.instance
    if args.oracle:
        result = _exhaustive_mgs_result(instance)
    else:
        result = generator.minimum_generator_set(
            instance,
            node_cap=args.node_cap,
            enumerate_optima=args.enumerate_optima,
            force_ip=args.force_ip,
        )
    if not generator.verify_generator(result.generator, instance):
        raise InvariantViolationError("minimum generator set does not regenerate the sum")
    _write_text(args.out, formats.mgs_csv(instance, result))
    return 0


def cmd_prune(args) -> int:
    doc = _read_instance(args.infile)
    instance = doc.instance
    if args.lower == "hull" and instance.p != 2:
        raise ValueError("--lower hull needs a bi-objective instance")
    classifications = [classify.classify_set(Y) for Y in instance.local_sets]
    subset_seed = doc.seed if doc.seed is not None else 0
    kept = []
    for s_bar in range(instance.S):
        lowers, uppers = experiments.build_bounds_for_scan(
            instance,
            classifications,
            s_bar,
            args.lambda_pct,
            args.gamma_pct,
            args.lower,
            subset_seed,
        )
        kept.append(
            StableSet(
                bounding.prune_one_set(instance, s_bar, lowers, uppers), validate=False
            )
        )
    if args.oracle:
        nd, _ = nd_sum(instance)
        for s, Y in enumerate(instance.local_sets):
            removed = set(Y.points) - set(kept[s].points)
            for pt in removed:
                if not generator.is_redundant(pt, s, instance, nd=nd):
                    raise InvariantViolationError(
                        f"pruning removed {pt} from set {s + 1}, but it is not redundant"
                    )
    _write_text(args.out, formats.prune_csv(instance, kept))
    return 0


def _grid_from_json(path: str) -> GridSpec:
    with open(_resolve(path), "r", encoding="utf-8") as fh:
        data = json.load(fh)
    valid = {f.name for f in fields(GridSpec)}
    unknown = set(data) - valid
    if unknown:
        raise ValueError(f"unknown grid keys: {sorted(unknown)}")
    for key, value in data.items():
        if isinstance(value, list):
            data[key] = tuple(value)
    return replace(GridSpec(), **data)


def cmd_experiment(args) -> int:
    grid = _grid_from_json(args.grid_spec) if args.grid_spec else GridSpec()
    records = experiments.run_grid(grid)

    fits = {}
    for config in grid.configurations:
        subset = [r for r in records if r.config == config and r.error is None]
        try:
            fits[config] = experiments.fit_growth(subset)
        except ValueError:
            continue
    metrics = {"r": experiments.metric_r(records)}
    q = experiments.metric_q(records, grid.prune_lambda, grid.prune_gamma, grid.lower_mode)
    if q:
        metrics["q"] = q

    out_dir = _resolve(args.out_dir)
    os.makedirs(out_dir, exist_ok=True)
    _write_text(os.path.join(out_dir, "records.csv"), formats.records_csv(records))
    _write_text(os.path.join(out_dir, "sets.csv"), formats.sets_csv(records))
    _write_text(os.path.join(out_dir, "metrics.csv"), formats.metrics_csv(metrics))
    _write_text(os.path.join(out_dir, "growth.csv"), formats.growth_csv(fits))
    _write_text(os.path.join(out_dir, "timings.csv"), formats.timings_csv(records))
    return 0


def cmd_verify(args) -> int:
    failures = []

    def check(name: str, ok: bool) -> None:
        print(("ok " if ok else "FAIL ") + name)
        if not ok:
            failures.append(name)

    with open(_resolve(args.infile), "r", encoding="utf-8") as fh:
        text = fh.read()
    doc = formats.parse_instance(text)
    instance = doc.instance
    check("parse", True)
    check("round_trip", formats.serialize_instance(doc) == text)
    try:
        for Y in instance.local_sets:
            StableSet(Y.points)  # re-validate stability
        check("stable_local_sets", True)
    except ValueError:
        check("stable_local_sets", False)

    smallest = max(len(Y) for Y in instance.local_sets)
    nd_small, _ = nd_sum(instance, buffer_limit=smallest)
    nd_default, _ = nd_sum(instance)
    check("buffer_invariance", nd_small.points == nd_default.points)

    if instance.product_size() <= ORACLE_ENUMERATION_CAP:
        oracle = filter_nondominated_naive(enumerate_full_sum(instance))
        check("oracle_equivalence", oracle.points == nd_default.points)

    if instance.p == 2:
        ynse_sum = len(classify.extreme_points(nd_default))
        biggest_local = max(
            len(classify.extreme_points(Y)) for Y in instance.local_sets
        )
        check(
            "cardinality_bound",
            len(nd_default) >= ynse_sum >= biggest_local,
        )

    if args.ndsum:
        with open(_resolve(args.ndsum), "r", encoding="utf-8") as fh:
            nd_file, provenance = formats.parse_nd_sum(fh.read())
        check("ndsum_matches", nd_file.points == nd_default.points)
        if provenance is not None:
            sums_ok = all(
                all(
                    tuple(
                        sum(instance.local_sets[s].points[c[s]][k] for s in range(instance.S))
                        for k in range(instance.p)
                    )
                    == y
                    for c in provenance.of(y)
                )
                for y in nd_file
            )
            check("provenance_sums", sums_ok)
            if instance.product_size() <= ORACLE_ENUMERATION_CAP:
                full = compute_provenance(instance, nd_default)
                check(
                    "provenance_complete",
                    all(
                        set(provenance.of(y)) == set(full.of(y)) for y in nd_default
                    ),
                )
    if failures:
        raise InvariantViolationError(f"checks failed: {', '.join(failures)}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minksum",
        description="Nondominated Minkowski sums, generator sets, and bounding-set pruning.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a reproducible instance file")
    g.add_argument("--p", type=int, required=True, help="number of objectives (>= 2)")
    g.add_argument("--S", type=int, required=True, help="number of local sets")
    g.add_argument("--n", type=int, required=True, help="cardinality of each local set")
    g.add_argument("--config", choices=CONFIGURATIONS, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--hypercube-max", type=int, default=10_000)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    n = sub.add_parser("ndsum", help="compute the nondominated sum of an instance")
    n.add_argument("--in", dest="infile", required=True)
    n.add_argument("--out", required=True)
    n.add_argument("--buffer", type=int, default=0, help="working buffer limit in points")
    n.add_argument("--provenance", action="store_true", help="emit all combinations per vector")
    n.add_argument("--provenance-cap", type=int, default=DEFAULT_PROVENANCE_CAP)
    n.add_argument("--oracle", action="store_true", help="full enumeration plus naive filter")
    n.set_defaults(func=cmd_ndsum)

    c = sub.add_parser("classify", help="classify a local set or the nondominated sum")
    c.add_argument("--in", dest="infile", required=True)
    c.add_argument("--set", required=True, help="1-based local set index, or 'sum'")
    c.add_argument("--out", required=True)
    c.set_defaults(func=cmd_classify)

    m = sub.add_parser("mgs", help="compute a minimum generator set")
    m.add_argument("--in", dest="infile", required=True)
    m.add_argument("--out", required=True)
    m.add_argument("--enumerate-optima", action="store_true")
    m.add_argument("--force-ip", action="store_true", help="skip the shortcuts")
    m.add_argument("--oracle", action="store_true", help="exhaustive subset search")
    m.add_argument("--node-cap", type=int, default=generator.DEFAULT_NODE_CAP)
    m.set_defaults(func=cmd_mgs)

    p = sub.add_parser("prune", help="remove provably redundant local vectors")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lower", choices=("hull", "exact"), default="exact")
    p.add_argument("--lambda", dest="lambda_pct", type=int, default=100)
    p.add_argument("--gamma", dest="gamma_pct", type=int, default=100)
    p.add_argument("--oracle", action="store_true", help="confirm removals by brute force")
    p.set_defaults(func=cmd_prune)

    e = sub.add_parser("experiment", help="run a grid and write record/metric CSVs")
    e.add_argument("--grid-spec", help="JSON file overriding the default grid")
    e.add_argument("--out-dir", required=True)
    e.set_defaults(func=cmd_experiment)

    v = sub.add_parser("verify", help="run the invariant suite on instance/result files")
    v.add_argument("--in", dest="infile", required=True)
    v.add_argument("--ndsum", help="nondominated-sum file to check against")
    v.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    except (ValueError, OverflowError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 4


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
