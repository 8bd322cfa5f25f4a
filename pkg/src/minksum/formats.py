"""Plain-text file formats: instance files, nondominated-sum files, and result CSVs.

Every format is line-oriented UTF-8 with LF newlines and canonical ordering,
so identical data always produces identical bytes.  FORMATS.md in the
repository root documents each format field by field.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import MSPInstance, StableSet, Vector
from .experiments import GrowthFit, MetricValue, RunRecord, SetRecord
from .generator import MGSResult
from .instgen import ConfigSpec, GeneratedInstance
from .ndfilter import Provenance

INSTANCE_MAGIC = "msp-instance 1"
NDSUM_MAGIC = "msp-ndsum 1"
MISSING = "-"


@dataclass(frozen=True)
class InstanceDocument:
    """An instance plus the generation metadata carried by its file."""

    instance: MSPInstance
    config: str = MISSING
    seed: Optional[int] = None
    hypercube_max: Optional[int] = None
    methods: tuple[str, ...] = ()
    set_seeds: tuple[Optional[int], ...] = ()

    @classmethod
    def from_generated(cls, gen: GeneratedInstance) -> "InstanceDocument":
        return cls(
            instance=gen.instance,
            config=gen.config.configuration,
            seed=gen.config.seed,
            hypercube_max=gen.config.hypercube_max,
            methods=gen.methods,
            set_seeds=gen.set_seeds,
        )

    @classmethod
    def bare(cls, instance: MSPInstance) -> "InstanceDocument":
        return cls(instance=instance)


def _opt(value) -> str:
    return MISSING if value is None else str(value)


def _parse_opt_int(token: str) -> Optional[int]:
    return None if token == MISSING else int(token)


def serialize_instance(doc: InstanceDocument) -> str:
    inst = doc.instance
    lines = [
        INSTANCE_MAGIC,
        f"p {inst.p}",
        f"S {inst.S}",
        f"config {doc.config or MISSING}",
        f"seed {_opt(doc.seed)}",
        f"hypercube {_opt(doc.hypercube_max)}",
    ]
    methods = doc.methods or (MISSING,) * inst.S
    seeds = doc.set_seeds or (None,) * inst.S
    for s, Y in enumerate(inst.local_sets):
        lines.append(f"set {s + 1} method {methods[s]} seed {_opt(seeds[s])} n {len(Y)}")
    lines.append("")
    for s, Y in enumerate(inst.local_sets):
        for pt in Y:
            lines.append(" ".join(str(c) for c in pt))
        lines.append("")
    return "\n".join(lines)


def parse_instance(text: str) -> InstanceDocument:
    lines = text.split("\n")
    if not lines or lines[0] != INSTANCE_MAGIC:
        raise ValueError("not an instance file (bad or missing magic line)")
    idx = 1

    def header(key: str) -> str:
        nonlocal idx
        if idx >= len(lines) or not lines[idx].startswith(key + " "):
            raise ValueError(f"expected header line {key!r}")
        value = lines[idx][len(key) + 1 :]
        idx += 1
        return value

    p = int(header("p"))
    S = int(header("S"))
    config = header("config")
    seed = _parse_opt_int(header("seed"))
    hypercube = _parse_opt_int(header("hypercube"))
    methods = []
    set_seeds = []
    sizes = []
    for s in range(S):
        parts = header("set").split()
        if len(parts) != 7 or parts[1] != "method" or parts[3] != "seed" or parts[5] != "n":
            raise ValueError(f"malformed set header for set {s + 1}")
        if int(parts[0]) != s + 1:
            raise ValueError("set headers out of order")
        methods.append(parts[2])
        set_seeds.append(_parse_opt_int(parts[4]))
        sizes.append(int(parts[6]))
    if idx >= len(lines) or lines[idx] != "":
        raise ValueError("missing blank line after header")
    idx += 1

    sets = []
    for s in range(S):
        rows = []
        for _ in range(sizes[s]):
            if idx >= len(lines) or lines[idx] == "":
                raise ValueError(f"block {s + 1} shorter than declared")
            coords = tuple(int(tok) for tok in lines[idx].split())
            if len(coords) != p:
                raise ValueError(f"row with {len(coords)} coordinates, expected {p}")
            rows.append(coords)
            idx += 1
        if idx >= len(lines) or lines[idx] != "":
            raise ValueError(f"missing blank line after block {s + 1}")
        idx += 1
        sets.append(StableSet(rows))
    if any(line != "" for line in lines[idx:]):
        raise ValueError("trailing content after last block")
    return InstanceDocument(
        instance=MSPInstance(sets),
        config=config,
        seed=seed,
        hypercube_max=hypercube,
        methods=tuple(methods),
        set_seeds=tuple(set_seeds),
    )


def serialize_nd_sum(nd: StableSet, provenance: Optional[Provenance] = None) -> str:
    dim = nd.dim if len(nd) else 0
    lines = [NDSUM_MAGIC, f"p {dim}", f"count {len(nd)}", ""]
    for pt in nd:
        lines.append(" ".join(str(c) for c in pt))
    lines.append("")
    if provenance is not None:
        lines.append("provenance")
        for pt in nd:
            combos = " ; ".join(
                " ".join(str(i) for i in combo) for combo in provenance.of(pt)
            )
            lines.append(" ".join(str(c) for c in pt) + " : " + combos)
        lines.append("")
    return "\n".join(lines)


def parse_nd_sum(text: str) -> tuple[StableSet, Optional[Provenance]]:
    lines = text.split("\n")
    if not lines or lines[0] != NDSUM_MAGIC:
        raise ValueError("not a nondominated-sum file")
    p = int(lines[1].split()[1])
    count = int(lines[2].split()[1])
    if lines[3] != "":
        raise ValueError("missing blank line after header")
    rows = []
    idx = 4
    for _ in range(count):
        coords = tuple(int(t) for t in lines[idx].split())
        if p and len(coords) != p:
            raise ValueError("row width differs from header dimension")
        rows.append(coords)
        idx += 1
    nd = StableSet(rows, validate=False)
    if idx < len(lines) and lines[idx] == "":
        idx += 1
    if idx < len(lines) and lines[idx] == "provenance":
        idx += 1
        combos: dict[Vector, tuple[tuple[int, ...], ...]] = {}
        for _ in range(count):
            head, _, tail = lines[idx].partition(" : ")
            key = tuple(int(t) for t in head.split())
            combos[key] = tuple(
                tuple(int(t) for t in part.split()) for part in tail.split(" ; ")
            )
            idx += 1
        return nd, Provenance(combos)
    return nd, None


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def format_float(x: float) -> str:
    return f"{x:.6g}"


def classification_csv(Y: StableSet, labels: Sequence) -> str:
    p = Y.dim if len(Y) else 0
    header = [f"coord_{k + 1}" for k in range(p)] + ["classification"]
    rows = [list(pt) + [lab.value] for pt, lab in zip(Y.points, labels)]
    return _csv_text(header, rows)


def mgs_csv(instance: MSPInstance, result: MGSResult) -> str:
    p = instance.p
    header = (
        ["row_kind", "optimum", "set", "index"]
        + [f"coord_{k + 1}" for k in range(p)]
        + ["flag", "chosen", "solver_path", "unique", "total_cardinality"]
    )
    rows: list[list] = []
    rows.append(
        ["summary", "", "", ""]
        + [""] * p
        + ["", "", result.solver_path.value, int(result.unique), result.total_cardinality]
    )
    optima = result.optima if result.optima is not None else (result.generator,)
    for opt_id, gen in enumerate(optima):
        for s, Y in enumerate(instance.local_sets):
            chosen = set(gen.chosen[s].points)
            for i, pt in enumerate(Y.points):
                rows.append(
                    ["vector", opt_id, s + 1, i]
                    + list(pt)
                    + [gen.flags[s][i].value, int(pt in chosen), "", "", ""]
                )
    return _csv_text(header, rows)


def prune_csv(instance: MSPInstance, kept: Sequence[StableSet]) -> str:
    p = instance.p
    header = (
        ["row_kind", "set", "index"]
        + [f"coord_{k + 1}" for k in range(p)]
        + ["removed", "kept_count", "removed_count"]
    )
    rows: list[list] = []
    for s, Y in enumerate(instance.local_sets):
        kept_pts = set(kept[s].points)
        removed = len(Y) - len(kept_pts)
        rows.append(["summary", s + 1, ""] + [""] * p + ["", len(kept_pts), removed])
        for i, pt in enumerate(Y.points):
            rows.append(
                ["vector", s + 1, i] + list(pt) + [int(pt not in kept_pts), "", ""]
            )
    return _csv_text(header, rows)


RECORD_HEADER = [
    "p", "S", "n", "config", "seed", "hypercube", "methods",
    "yn_size", "ynse_size", "solver_path", "unique", "error",
]
SET_HEADER = [
    "p", "S", "n", "config", "seed", "set", "method", "set_seed",
    "local_size", "extreme_count", "mgs_size", "pruned_size",
]


def _opt_cell(v) -> str:
    return "" if v is None else str(v)


def records_csv(records: Sequence[RunRecord]) -> str:
    rows = []
    for r in records:
        rows.append(
            [
                r.p, r.S, r.n, r.config, r.seed, r.hypercube_max,
                "|".join(r.methods),
                _opt_cell(r.yn_size), _opt_cell(r.ynse_size),
                _opt_cell(r.solver_path),
                _opt_cell(None if r.unique is None else int(r.unique)),
                _opt_cell(r.error),
            ]
        )
    return _csv_text(RECORD_HEADER, rows)


def sets_csv(records: Sequence[RunRecord]) -> str:
    rows = []
    for r in records:
        for sr in r.sets:
            rows.append(
                [
                    r.p, r.S, r.n, r.config, r.seed, sr.index + 1, sr.method, sr.seed,
                    sr.local_size, _opt_cell(sr.extreme_count),
                    _opt_cell(sr.mgs_size), _opt_cell(sr.pruned_size),
                ]
            )
    return _csv_text(SET_HEADER, rows)


def parse_records_csv(records_text: str, sets_text: str) -> list[RunRecord]:
    rec_rows = list(csv.reader(io.StringIO(records_text)))
    set_rows = list(csv.reader(io.StringIO(sets_text)))
    if rec_rows[0] != RECORD_HEADER or set_rows[0] != SET_HEADER:
        raise ValueError("unexpected CSV header")

    def opt_int(tok: str) -> Optional[int]:
        return None if tok == "" else int(tok)

    sets_by_key: dict[tuple, list[SetRecord]] = {}
    for row in set_rows[1:]:
        key = (int(row[0]), int(row[1]), int(row[2]), row[3], int(row[4]))
        sets_by_key.setdefault(key, []).append(
            SetRecord(
                index=int(row[5]) - 1,
                method=row[6],
                seed=int(row[7]),
                local_size=int(row[8]),
                extreme_count=opt_int(row[9]),
                mgs_size=opt_int(row[10]),
                pruned_size=opt_int(row[11]),
            )
        )
    out = []
    for row in rec_rows[1:]:
        key = (int(row[0]), int(row[1]), int(row[2]), row[3], int(row[4]))
        srs = tuple(sorted(sets_by_key.get(key, []), key=lambda sr: sr.index))
        out.append(
            RunRecord(
                p=key[0], S=key[1], n=key[2], config=key[3], seed=key[4],
                hypercube_max=int(row[5]),
                methods=tuple(row[6].split("|")),
                set_seeds=tuple(sr.seed for sr in srs),
                yn_size=opt_int(row[7]),
                ynse_size=opt_int(row[8]),
                solver_path=row[9] if row[9] else None,
                unique=None if row[10] == "" else bool(int(row[10])),
                sets=srs,
                error=row[11] if row[11] else None,
            )
        )
    return out


def metrics_csv(metrics: dict[str, dict[str, MetricValue]]) -> str:
    header = ["metric", "method", "value", "contributing"]
    rows = []
    for metric_name in sorted(metrics):
        per_method = metrics[metric_name]
        for method in sorted(per_method):
            mv = per_method[method]
            rows.append([metric_name, method, format_float(mv.value), mv.contributing])
    return _csv_text(header, rows)


def growth_csv(fits: dict[str, GrowthFit]) -> str:
    header = ["config", "c1", "c2", "c3", "r_squared", "cells"]
    rows = [
        [
            config,
            format_float(fit.c1), format_float(fit.c2), format_float(fit.c3),
            format_float(fit.r_squared), fit.cells,
        ]
        for config, fit in sorted(fits.items())
    ]
    return _csv_text(header, rows)


def timings_csv(records: Sequence[RunRecord]) -> str:
    header = ["p", "S", "n", "config", "seed", "phase", "seconds"]
    rows = []
    for r in records:
        for phase in sorted(r.timings):
            rows.append(
                [r.p, r.S, r.n, r.config, r.seed, phase, format_float(r.timings[phase])]
            )
    return _csv_text(header, rows)
