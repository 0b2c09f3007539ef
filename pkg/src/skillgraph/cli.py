"""Pipeline orchestration: ingest -> graph -> annotate -> layout -> export.

Each stage reads its predecessors' intermediate files (plain CSV, so every
step is independently inspectable) and writes its own. `all` chains the
five stages; `stats` parses the raw inputs and prints cardinalities
without writing anything. Exit codes: 0 ok, 2 config, 3 input, 4
consistency.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import bundle as bundle_mod
from . import ingest as ingest_mod
from . import layout as layout_mod
from . import megatrend as megatrend_mod
from . import similarity as similarity_mod
from . import supply_demand as sd_mod
from .bundle import BundleMeta, GraphBundle, OccupationNode, q4, q6
from .codes import TOTAL
from .errors import (
    ConfigInvalid,
    ConsistencyViolation,
    IoFailure,
    SkillGraphError,
    StageInputMissing,
)

log = logging.getLogger(__name__)

CONFIG_ENV_VAR = "SKILLGRAPH_CONFIG"

STORE_DIR = "store"
CROSSWALK_CSV = "crosswalk.csv"
AUTOMATION_CSV = "automation.csv"
STORE_STATS_JSON = "store_stats.json"
SIMILARITY_LINKS_CSV = "similarity_links.csv"
DISPLAY_EDGES_CSV = "display_edges.csv"
OCC_AUTOMATION_CSV = "occupation_automation.csv"
ISCO_COVERAGE_CSV = "isco_coverage.csv"
SUPPLY_DEMAND_CSV = "supply_demand.csv"
NODE_INDEX_CSV = "node_index.csv"
LAYOUT_COORDS_CSV = "layout_coords.csv"
BUNDLE_DIR = "bundle"


@dataclass
class PipelineConfig:
    esco_triples: Path
    crosswalk: Path
    automation: Path
    cv: Path
    vacancies: Path
    out_dir: Path
    k: int = 3
    min_ratio: float = 0.0
    megatrend_threshold: float = 0.7
    layout: layout_mod.LayoutConfig = dataclasses.field(
        default_factory=layout_mod.LayoutConfig
    )
    threads: int = 1
    built_at: str = ""
    log_level: str = "INFO"

    def validate(self) -> None:
        for name in ("esco_triples", "crosswalk", "automation", "cv", "vacancies"):
            if not str(getattr(self, name)):
                raise ConfigInvalid(f"input path {name} is empty")
        if not str(self.out_dir):
            raise ConfigInvalid("out_dir is empty")
        if self.k < 1:
            raise ConfigInvalid(f"k must be >= 1, got {self.k}")
        if not 0.0 <= self.megatrend_threshold <= 1.0:
            raise ConfigInvalid("megatrend_threshold must be in [0, 1]")
        if self.threads < 1:
            raise ConfigInvalid("threads must be >= 1")
        try:
            self.layout.validate()
        except ValueError as exc:
            raise ConfigInvalid(f"layout: {exc}") from None


def load_config(path: Path) -> PipelineConfig:
    """Read the JSON config; relative paths resolve against its directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config {path} is not valid JSON: {exc}") from exc

    base = path.parent

    def _path(value: str) -> Path:
        p = Path(value)
        return p if p.is_absolute() else base / p

    try:
        inputs = doc["inputs"]
        layout_doc = doc.get("layout", {})
        unknown = set(layout_doc) - {f.name for f in dataclasses.fields(layout_mod.LayoutConfig)}
        if unknown:
            raise ConfigInvalid(f"unknown layout options: {sorted(unknown)}")
        cfg = PipelineConfig(
            esco_triples=_path(inputs["esco_triples"]),
            crosswalk=_path(inputs["crosswalk"]),
            automation=_path(inputs["automation"]),
            cv=_path(inputs["cv"]),
            vacancies=_path(inputs["vacancies"]),
            out_dir=_path(doc["out_dir"]),
            k=int(doc.get("k", 3)),
            min_ratio=float(doc.get("min_ratio", 0.0)),
            megatrend_threshold=float(doc.get("megatrend_threshold", 0.7)),
            layout=layout_mod.LayoutConfig(**layout_doc),
            threads=int(doc.get("threads", 1)),
            built_at=str(doc.get("built_at", "")),
            log_level=str(doc.get("log_level", "INFO")),
        )
    except ConfigInvalid:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigInvalid(f"config {path}: {exc!r}") from exc
    cfg.validate()
    return cfg


def _open_input(path: Path):
    try:
        return open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise IoFailure(f"cannot open input {path}: {exc}") from exc


def _require(cfg: PipelineConfig, relative: str, producer: str) -> Path:
    p = cfg.out_dir / relative
    if not p.exists():
        raise StageInputMissing(f"{p} not found; run the '{producer}' stage first")
    return p


def stage_ingest(cfg: PipelineConfig) -> None:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    report = ingest_mod.IngestReport()
    with _open_input(cfg.esco_triples) as f:
        store = ingest_mod.parse_esco_triples(f, report=report)
    ingest_mod.write_store_csv(store, cfg.out_dir / STORE_DIR)

    with _open_input(cfg.crosswalk) as f:
        crosswalk = ingest_mod.parse_crosswalk(f)
    ingest_mod.write_crosswalk_csv(crosswalk, cfg.out_dir / CROSSWALK_CSV)

    with _open_input(cfg.automation) as f:
        automation = ingest_mod.parse_automation(f)
    ingest_mod.write_automation_csv(automation, cfg.out_dir / AUTOMATION_CSV)

    stats = ingest_mod.store_stats(store)
    payload = {"store": stats.as_dict(), "ingest": dataclasses.asdict(report)}
    (cfg.out_dir / STORE_STATS_JSON).write_text(
        json.dumps(payload, indent=2) + "\n", encoding="utf-8"
    )
    log.info("ingest: %d occupations, %d skills", stats.n_occupations, stats.n_skills)


def stage_graph(cfg: PipelineConfig) -> None:
    store = ingest_mod.read_store_csv(_require(cfg, STORE_DIR, "ingest"))
    links = similarity_mod.top_k_links(store, k=cfg.k, min_ratio=cfg.min_ratio)
    similarity_mod.write_links_csv(links, cfg.out_dir / SIMILARITY_LINKS_CSV)
    edges = similarity_mod.merge_undirected(links)
    similarity_mod.write_edges_csv(edges, cfg.out_dir / DISPLAY_EDGES_CSV)
    log.info("graph: %d directed links, %d display edges", len(links), len(edges))


def stage_annotate(cfg: PipelineConfig) -> None:
    store = ingest_mod.read_store_csv(_require(cfg, STORE_DIR, "ingest"))
    with open(_require(cfg, CROSSWALK_CSV, "ingest"), encoding="utf-8", newline="") as f:
        crosswalk = ingest_mod.parse_crosswalk(f)
    with open(_require(cfg, AUTOMATION_CSV, "ingest"), encoding="utf-8", newline="") as f:
        automation = ingest_mod.parse_automation(f)

    isco_probs = megatrend_mod.isco_automation(crosswalk, automation)
    annotations = megatrend_mod.occupation_automation(store, isco_probs)
    megatrend_mod.write_occupation_automation_csv(
        annotations, cfg.out_dir / OCC_AUTOMATION_CSV
    )
    coverage = megatrend_mod.coverage_report(store, crosswalk, automation)
    megatrend_mod.write_coverage_csv(coverage, cfg.out_dir / ISCO_COVERAGE_CSV)

    cv_report = sd_mod.StreamReport()
    with _open_input(cfg.cv) as f:
        cv_agg = sd_mod.aggregate_cv(sd_mod.read_cv_csv(f, cv_report))
    vac_report = sd_mod.StreamReport()
    with _open_input(cfg.vacancies) as f:
        vac_agg = sd_mod.aggregate_vacancies(sd_mod.read_vacancies_csv(f, vac_report))
    join_report = sd_mod.JoinReport()
    cube = sd_mod.attach_counts(store, cv_agg, vac_agg, join_report)
    sd_mod.write_cube_csv(cube, cfg.out_dir / SUPPLY_DEMAND_CSV)
    log.info(
        "annotate: %d annotated occupations, %d cube cells, %d orphaned vacancies",
        len(annotations), len(cube.cells), join_report.orphaned_vacancies,
    )


def stage_layout(cfg: PipelineConfig) -> None:
    store = ingest_mod.read_store_csv(_require(cfg, STORE_DIR, "ingest"))
    edges = similarity_mod.read_edges_csv(_require(cfg, DISPLAY_EDGES_CSV, "graph"))

    index = layout_mod.assign_indices(store.occupations)
    with open(cfg.out_dir / NODE_INDEX_CSV, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["esco_id", "idx"])
        for esco_id in sorted(index):
            w.writerow([esco_id, index[esco_id]])

    idx_edges = [(index[e.a], index[e.b], e.ratio) for e in edges]
    result = layout_mod.sfdp_layout(
        len(index), idx_edges, cfg.layout, workers=cfg.threads
    )
    layout_mod.write_coords_csv(result, cfg.out_dir / LAYOUT_COORDS_CSV)
    log.info(
        "layout: %d nodes, converged=%s after %d iterations",
        len(index), result.converged, result.iterations_used,
    )


def _read_node_index(path: Path) -> dict[str, int]:
    with open(path, newline="", encoding="utf-8") as f:
        return {row["esco_id"]: int(row["idx"]) for row in csv.DictReader(f)}


def stage_export(cfg: PipelineConfig) -> None:
    store = ingest_mod.read_store_csv(_require(cfg, STORE_DIR, "ingest"))
    edges = similarity_mod.read_edges_csv(_require(cfg, DISPLAY_EDGES_CSV, "graph"))
    annotations = megatrend_mod.read_occupation_automation_csv(
        _require(cfg, OCC_AUTOMATION_CSV, "annotate")
    )
    cube = sd_mod.read_cube_csv(_require(cfg, SUPPLY_DEMAND_CSV, "annotate"))
    index = _read_node_index(_require(cfg, NODE_INDEX_CSV, "layout"))
    coords = layout_mod.read_coords_csv(_require(cfg, LAYOUT_COORDS_CSV, "layout"))
    if len(coords) != len(index):
        raise ConsistencyViolation(
            f"{LAYOUT_COORDS_CSV} has {len(coords)} rows for {len(index)} nodes"
        )

    nodes = []
    for esco_id in sorted(index):
        idx = index[esco_id]
        info = store.occupations[esco_id]
        ann = annotations.get(esco_id)
        total = cube.cell(esco_id)
        nodes.append(
            OccupationNode(
                idx=idx,
                esco_id=esco_id,
                label=info.label,
                isco4=info.isco,
                isco1=info.isco[0],
                prob_max=None if ann is None else q6(ann.prob_max),
                prob_avg=None if ann is None else q6(ann.prob_avg),
                x=q6(coords[idx, 0]),
                y=q6(coords[idx, 1]),
                vac_total=total.vacancies,
                cv_total=total.seekers,
            )
        )
    nodes.sort(key=lambda nd: nd.idx)

    links = sorted((index[e.a], index[e.b], q4(e.ratio)) for e in edges)
    counts = sorted(
        (index[occ], country, c.vacancies, c.seekers)
        for (occ, country), c in cube.cells.items()
        if country != TOTAL
    )
    built_at = cfg.built_at or datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    meta = BundleMeta(
        built_at=built_at,
        k=cfg.k,
        seed=cfg.layout.seed,
        megatrend_threshold=cfg.megatrend_threshold,
        vacancy_fanout=True,
    )
    out = GraphBundle(meta=meta, nodes=nodes, links=links, counts=counts)
    bundle_mod.write_bundle(out, cfg.out_dir / BUNDLE_DIR)
    log.info("export: bundle written to %s", cfg.out_dir / BUNDLE_DIR)


def run_stats(cfg: PipelineConfig) -> dict:
    with _open_input(cfg.esco_triples) as f:
        store = ingest_mod.parse_esco_triples(f)
    with _open_input(cfg.crosswalk) as f:
        crosswalk = ingest_mod.parse_crosswalk(f)
    with _open_input(cfg.automation) as f:
        automation = ingest_mod.parse_automation(f)
    coverage = megatrend_mod.coverage_report(store, crosswalk, automation)
    annotated = sum(1 for row in coverage if row.annotation is not None)
    return {
        "store": ingest_mod.store_stats(store).as_dict(),
        "megatrend_coverage": {
            "n_isco_in_store": len(coverage),
            "n_annotated": annotated,
            "n_unannotated": len(coverage) - annotated,
        },
    }


STAGES = {
    "ingest": stage_ingest,
    "graph": stage_graph,
    "annotate": stage_annotate,
    "layout": stage_layout,
    "export": stage_export,
}
STAGE_ORDER = ["ingest", "graph", "annotate", "layout", "export"]


def run(subcommand: str, cfg: PipelineConfig) -> None:
    if subcommand == "stats":
        print(json.dumps(run_stats(cfg), indent=2))
        return
    if subcommand == "all":
        for name in STAGE_ORDER:
            log.info("running stage %s", name)
            STAGES[name](cfg)
        return
    STAGES[subcommand](cfg)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skillgraph",
        description="Occupation-similarity graph pipeline",
    )
    parser.add_argument(
        "subcommand", choices=sorted(list(STAGES) + ["all", "stats"]),
    )
    parser.add_argument(
        "--config", help=f"config JSON (default: ${CONFIG_ENV_VAR})", default=None
    )
    parser.add_argument("--out", help="override output directory", default=None)
    parser.add_argument("--k", type=int, default=None, help="top-k links per occupation")
    parser.add_argument("--seed", type=int, default=None, help="layout seed")
    parser.add_argument("--threads", type=int, default=None, help="layout worker count")
    parser.add_argument("--log-level", default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    stage = "startup"
    try:
        config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
        if not config_path:
            raise ConfigInvalid(f"no --config given and ${CONFIG_ENV_VAR} is unset")
        cfg = load_config(Path(config_path))
        if args.out is not None:
            cfg.out_dir = Path(args.out)
        if args.k is not None:
            cfg.k = args.k
        if args.seed is not None:
            cfg.layout = dataclasses.replace(cfg.layout, seed=args.seed)
        if args.threads is not None:
            cfg.threads = args.threads
        if args.log_level is not None:
            cfg.log_level = args.log_level
        cfg.validate()
        logging.basicConfig(
            level=getattr(logging, cfg.log_level.upper(), logging.INFO),
            format="%(levelname)s %(name)s: %(message)s",
            stream=sys.stderr,
        )
        stage = args.subcommand
        run(args.subcommand, cfg)
    except SkillGraphError as exc:
        report = {"error": type(exc).__name__, "message": str(exc), "stage": stage}
        print(json.dumps(report), file=sys.stderr)
        if isinstance(exc, ConfigInvalid):
            return 2
        if isinstance(exc, ConsistencyViolation):
            return 4
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
