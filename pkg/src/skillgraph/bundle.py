"""Serialize the annotated, laid-out graph into the files the viewer loads.

Four files per bundle: nodes.csv, links.csv, counts.csv for analysis, and
graph.json carrying the same data plus metadata as the viewer's sole
input. Output is byte-deterministic: stable ordering, fixed number
formatting, LF endings, UTF-8. A bundle is valid only at serialization
precision (coordinates 6 decimals, ratios 4, probabilities 6), which makes
read(write(x)) the identity.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .codes import TOTAL
from .errors import ConsistencyViolation, IoFailure, ParseFailure, SchemaMismatch

SCHEMA_VERSION = 1

NODES_CSV = "nodes.csv"
LINKS_CSV = "links.csv"
COUNTS_CSV = "counts.csv"
GRAPH_JSON = "graph.json"


def q6(value: float) -> float:
    """Quantize to serialization precision; -0.0 normalizes to 0.0."""
    out = round(float(value), 6)
    return 0.0 if out == 0 else out


def q4(value: float) -> float:
    out = round(float(value), 4)
    return 0.0 if out == 0 else out


@dataclass(frozen=True)
class BundleMeta:
    built_at: str
    k: int
    seed: int
    megatrend_threshold: float
    vacancy_fanout: bool = True
    schema_version: int = SCHEMA_VERSION

    def as_dict(self, bundle: "GraphBundle") -> dict:
        return {
            "schema_version": self.schema_version,
            "built_at": self.built_at,
            "k": self.k,
            "seed": self.seed,
            "megatrend_threshold": self.megatrend_threshold,
            "vacancy_fanout": self.vacancy_fanout,
            "counts": {
                "n_nodes": len(bundle.nodes),
                "n_links": len(bundle.links),
                "n_count_rows": len(bundle.counts),
            },
        }


@dataclass(frozen=True)
class OccupationNode:
    idx: int
    esco_id: str
    label: str
    isco4: str
    isco1: str
    prob_max: float | None
    prob_avg: float | None
    x: float
    y: float
    vac_total: int
    cv_total: int


@dataclass
class GraphBundle:
    meta: BundleMeta
    nodes: list[OccupationNode] = field(default_factory=list)
    links: list[tuple[int, int, float]] = field(default_factory=list)
    counts: list[tuple[int, str, int, int]] = field(default_factory=list)

    def validate(self) -> None:
        n = len(self.nodes)
        if n == 0:
            raise ConsistencyViolation("bundle has no nodes")
        for i, node in enumerate(self.nodes):
            if node.idx != i:
                raise ConsistencyViolation(f"node idx {node.idx} at position {i}")
            if not node.isco4 or node.isco1 != node.isco4[0]:
                raise ConsistencyViolation(f"node {node.esco_id}: isco1/isco4 mismatch")
            if (node.prob_max is None) != (node.prob_avg is None):
                raise ConsistencyViolation(f"node {node.esco_id}: half-absent probability")
            if node.prob_max is not None:
                if not 0 <= node.prob_avg <= node.prob_max <= 1:
                    raise ConsistencyViolation(f"node {node.esco_id}: bad probabilities")
                if node.prob_max != q6(node.prob_max) or node.prob_avg != q6(node.prob_avg):
                    raise ConsistencyViolation(f"node {node.esco_id}: unquantized probability")
            if node.x != q6(node.x) or node.y != q6(node.y):
                raise ConsistencyViolation(f"node {node.esco_id}: unquantized coordinate")
            if node.vac_total < 0 or node.cv_total < 0:
                raise ConsistencyViolation(f"node {node.esco_id}: negative count")
        for source, target, ratio in self.links:
            if not (0 <= source < n and 0 <= target < n):
                raise ConsistencyViolation(f"link ({source}, {target}) outside [0, {n})")
            if source == target:
                raise ConsistencyViolation(f"self-link at {source}")
            if not 0 < ratio <= 1 or ratio != q4(ratio):
                raise ConsistencyViolation(f"link ({source}, {target}): bad ratio {ratio}")
        for idx, country, vac, seek in self.counts:
            if not 0 <= idx < n:
                raise ConsistencyViolation(f"count row references idx {idx}")
            if country == TOTAL:
                raise ConsistencyViolation("counts.csv carries per-country rows only")
            if vac < 0 or seek < 0:
                raise ConsistencyViolation(f"negative count at idx {idx}, {country}")


def _fmt_prob(p: float | None) -> str:
    return "" if p is None else f"{p:.6f}"


def write_bundle(bundle: GraphBundle, out_dir: Path) -> None:
    """Write all four files atomically: temp files, then renames.

    Raises ConsistencyViolation before touching the filesystem if the
    bundle is internally inconsistent.
    """
    bundle.validate()
    out_dir = Path(out_dir)
    tmp_paths: list[tuple[Path, Path]] = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)

        def _target(name: str) -> Path:
            final = out_dir / name
            tmp = out_dir / (name + ".tmp")
            tmp_paths.append((tmp, final))
            return tmp

        with open(_target(NODES_CSV), "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(
                ["idx", "esco_id", "label", "isco4", "isco1", "prob_max",
                 "prob_avg", "x", "y", "vac_total", "cv_total"]
            )
            for nd in bundle.nodes:
                w.writerow(
                    [nd.idx, nd.esco_id, nd.label, nd.isco4, nd.isco1,
                     _fmt_prob(nd.prob_max), _fmt_prob(nd.prob_avg),
                     f"{nd.x:.6f}", f"{nd.y:.6f}", nd.vac_total, nd.cv_total]
                )

        with open(_target(LINKS_CSV), "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["source", "target", "ratio"])
            for source, target, ratio in bundle.links:
                w.writerow([source, target, f"{ratio:.4f}"])

        with open(_target(COUNTS_CSV), "w", newline="", encoding="utf-8") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(["idx", "country", "vacancies", "seekers"])
            for idx, country, vac, seek in bundle.counts:
                w.writerow([idx, country, vac, seek])

        doc = {
            "meta": bundle.meta.as_dict(bundle),
            "nodes": [
                {
                    "idx": nd.idx, "esco_id": nd.esco_id, "label": nd.label,
                    "isco4": nd.isco4, "isco1": nd.isco1,
                    "prob_max": nd.prob_max, "prob_avg": nd.prob_avg,
                    "x": nd.x, "y": nd.y,
                    "vac_total": nd.vac_total, "cv_total": nd.cv_total,
                }
                for nd in bundle.nodes
            ],
            "links": [
                {"source": s, "target": t, "ratio": r} for s, t, r in bundle.links
            ],
            "counts": [
                {"idx": i, "country": c, "vacancies": v, "seekers": s}
                for i, c, v, s in bundle.counts
            ],
        }
        with open(_target(GRAPH_JSON), "w", encoding="utf-8") as f:
            json.dump(doc, f, indent=2, ensure_ascii=False)
            f.write("\n")

        for tmp, final in tmp_paths:
            os.replace(tmp, final)
    except OSError as exc:
        for tmp, _final in tmp_paths:
            tmp.unlink(missing_ok=True)
        raise IoFailure(str(exc)) from exc
    except Exception:
        for tmp, _final in tmp_paths:
            tmp.unlink(missing_ok=True)
        raise


def read_bundle(path: Path) -> GraphBundle:
    """Load a bundle directory back into memory, enforcing all invariants."""
    path = Path(path)
    for name in (NODES_CSV, LINKS_CSV, COUNTS_CSV, GRAPH_JSON):
        if not (path / name).exists():
            raise IoFailure(f"missing bundle file: {path / name}")
    try:
        with open(path / GRAPH_JSON, encoding="utf-8") as f:
            doc = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseFailure(f"unreadable graph.json: {exc}") from exc

    meta_doc = doc.get("meta", {})
    version = meta_doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(f"schema_version {version!r}, expected {SCHEMA_VERSION}")

    try:
        meta = BundleMeta(
            built_at=meta_doc["built_at"],
            k=int(meta_doc["k"]),
            seed=int(meta_doc["seed"]),
            megatrend_threshold=float(meta_doc["megatrend_threshold"]),
            vacancy_fanout=bool(meta_doc["vacancy_fanout"]),
        )
        nodes = [
            OccupationNode(
                idx=int(nd["idx"]), esco_id=nd["esco_id"], label=nd["label"],
                isco4=nd["isco4"], isco1=nd["isco1"],
                prob_max=None if nd["prob_max"] is None else float(nd["prob_max"]),
                prob_avg=None if nd["prob_avg"] is None else float(nd["prob_avg"]),
                x=float(nd["x"]), y=float(nd["y"]),
                vac_total=int(nd["vac_total"]), cv_total=int(nd["cv_total"]),
            )
            for nd in doc["nodes"]
        ]
        links = [
            (int(ln["source"]), int(ln["target"]), float(ln["ratio"]))
            for ln in doc["links"]
        ]
        counts = [
            (int(ct["idx"]), ct["country"], int(ct["vacancies"]), int(ct["seekers"]))
            for ct in doc["counts"]
        ]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseFailure(f"graph.json field error: {exc}") from exc

    bundle = GraphBundle(meta=meta, nodes=nodes, links=links, counts=counts)
    try:
        bundle.validate()
    except ConsistencyViolation as exc:
        raise ParseFailure(str(exc)) from exc

    # The CSVs must tell the same story; row counts are a cheap cross-check.
    for name, expected in (
        (NODES_CSV, len(nodes)), (LINKS_CSV, len(links)), (COUNTS_CSV, len(counts)),
    ):
        with open(path / name, encoding="utf-8") as f:
            rows = sum(1 for line in f if line.strip()) - 1
        if rows != expected:
            raise ParseFailure(f"{name} has {rows} rows, graph.json has {expected}")
    return bundle
