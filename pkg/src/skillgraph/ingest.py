"""Parse the three reference inputs into validated in-memory stores.

Inputs are the occupation/skill classifier triples (an N-Triples subset),
the SOC-to-ISCO crosswalk and the automation-probability table. Stores are
plain dataclasses, immutable by convention after construction, and safe to
share read-only between stages.
"""

from __future__ import annotations

import csv
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .codes import normalize_soc, validate_isco4
from .errors import (
    BadCode,
    DanglingReference,
    DuplicateSoc,
    EmptyTable,
    MalformedTriple,
    OutOfRange,
)

log = logging.getLogger(__name__)

# One triple per line: <s> <p> <o> .   or   <s> <p> "literal" .
# Literals may carry a language tag; CRLF is tolerated upstream.
_TRIPLE_RE = re.compile(
    r'^<([^<>\s]+)>\s+<([^<>\s]+)>\s+'
    r'(?:<([^<>\s]+)>|"((?:[^"\\]|\\.)*)"(?:@[A-Za-z][A-Za-z0-9-]*)?)'
    r'\s*\.\s*$'
)

_ESCAPES = {'\\"': '"', "\\\\": "\\", "\\n": "\n", "\\r": "\r", "\\t": "\t"}


def _unescape(literal: str) -> str:
    return re.sub(r'\\[\\"nrt]', lambda m: _ESCAPES[m.group(0)], literal)


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


@dataclass(frozen=True)
class PredicateConfig:
    """Recognized predicate IRIs. Defaults follow the ESCO v0 vocabulary;
    releases change names, so these are configuration, not constants."""

    rdf_type: str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
    occupation_class: str = "http://data.europa.eu/esco/model#Occupation"
    skill_class: str = "http://data.europa.eu/esco/model#Skill"
    pref_label: str = "http://www.w3.org/2004/02/skos/core#prefLabel"
    essential_skill: str = "http://data.europa.eu/esco/model#relatedEssentialSkill"
    isco_group: str = "http://data.europa.eu/esco/model#memberOfISCOGroup"
    # Bases used when serializing a store back to canonical triple form.
    occupation_base: str = "http://data.europa.eu/esco/occupation/"
    skill_base: str = "http://data.europa.eu/esco/skill/"
    isco_base: str = "http://data.europa.eu/esco/isco/C"


DEFAULT_PREDICATES = PredicateConfig()


@dataclass(frozen=True)
class OccupationInfo:
    label: str
    isco: str


@dataclass
class ClassifierStore:
    """Occupations, skills and the essential-skill relation between them.

    ``essential`` has one entry per occupation (possibly an empty set), so
    zero-skill occupations stay visible downstream as isolated nodes.
    """

    occupations: dict[str, OccupationInfo] = field(default_factory=dict)
    skills: dict[str, str] = field(default_factory=dict)
    essential: dict[str, set[str]] = field(default_factory=dict)

    def validate(self) -> None:
        for occ, skills in self.essential.items():
            if occ not in self.occupations:
                raise DanglingReference(f"essential key {occ!r} not an occupation")
            for s in skills:
                if s not in self.skills:
                    raise DanglingReference(f"relation {occ!r} -> {s!r} not a skill")
        for occ, info in self.occupations.items():
            validate_isco4(info.isco)
            if not occ:
                raise BadCode("empty occupation id")

    def n_relations(self) -> int:
        return sum(len(s) for s in self.essential.values())


@dataclass
class IngestReport:
    """Counters for everything the parser skipped or dropped."""

    lines: int = 0
    comments: int = 0
    unrecognized: int = 0
    relations_dropped: int = 0
    occupations_dropped_no_isco: int = 0
    bad_isco_objects: int = 0


def _local_name(iri: str) -> str:
    """Trailing path segment of an IRI; ids are opaque beyond this."""
    return iri.rstrip("/").rsplit("/", 1)[-1].rsplit("#", 1)[-1]


def _isco_from_object(iri_obj: str | None, literal_obj: str | None) -> str | None:
    raw = _local_name(iri_obj) if iri_obj is not None else (literal_obj or "")
    m = re.search(r"([0-9]{4})$", raw)
    return m.group(1) if m else None


def parse_esco_triples(
    lines: Iterable[str],
    *,
    predicates: PredicateConfig = DEFAULT_PREDICATES,
    on_dangling: str = "warn",
    report: IngestReport | None = None,
) -> ClassifierStore:
    """Stream classifier triples into a ClassifierStore.

    Declarations (types, labels, ISCO memberships) are applied as seen;
    essential-skill relations are buffered and resolved after the full
    pass, so declaration order does not matter. Dangling relations are
    dropped with a warning by default (``on_dangling="fail"`` raises),
    and occupations without any ISCO membership are dropped entirely.
    """
    if on_dangling not in ("warn", "fail"):
        raise ValueError(f"on_dangling must be 'warn' or 'fail', got {on_dangling!r}")
    rep = report if report is not None else IngestReport()
    p = predicates

    occupation_ids: set[str] = set()
    skill_ids: set[str] = set()
    labels: dict[str, str] = {}
    isco: dict[str, str] = {}
    pending: list[tuple[str, str, int]] = []

    for line_no, raw in enumerate(lines, start=1):
        rep.lines += 1
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            rep.comments += 1
            continue
        m = _TRIPLE_RE.match(stripped)
        if not m:
            raise MalformedTriple(line_no, f"not a triple: {line!r}")
        subj_iri, pred, obj_iri, obj_lit = m.groups()
        subj = _local_name(subj_iri)

        if pred == p.rdf_type and obj_iri == p.occupation_class:
            occupation_ids.add(subj)
        elif pred == p.rdf_type and obj_iri == p.skill_class:
            skill_ids.add(subj)
        elif pred == p.pref_label:
            if obj_lit is None:
                raise MalformedTriple(line_no, "label object must be a literal")
            label = _unescape(obj_lit)
            # Several preferred labels: lexicographically smallest wins.
            if subj not in labels or label < labels[subj]:
                labels[subj] = label
        elif pred == p.essential_skill:
            if obj_iri is None:
                raise MalformedTriple(line_no, "essential-skill object must be an IRI")
            pending.append((subj, _local_name(obj_iri), line_no))
        elif pred == p.isco_group:
            code = _isco_from_object(obj_iri, obj_lit)
            if code is None:
                rep.bad_isco_objects += 1
                log.warning("line %d: unusable ISCO object, membership ignored", line_no)
                continue
            # Membership also declares the occupation; ties to the
            # smallest code keep repeated memberships deterministic.
            occupation_ids.add(subj)
            if subj not in isco or code < isco[subj]:
                isco[subj] = code
        else:
            rep.unrecognized += 1

    occupations: dict[str, OccupationInfo] = {}
    for occ in sorted(occupation_ids):
        if occ not in isco:
            rep.occupations_dropped_no_isco += 1
            log.warning("occupation %s has no ISCO mapping, dropped", occ)
            continue
        occupations[occ] = OccupationInfo(label=labels.get(occ, occ), isco=isco[occ])

    skills = {s: labels.get(s, s) for s in sorted(skill_ids)}

    essential: dict[str, set[str]] = {occ: set() for occ in occupations}
    for subj, obj, line_no in pending:
        if subj in occupations and obj in skills:
            essential[subj].add(obj)
        else:
            if on_dangling == "fail":
                raise DanglingReference(
                    f"line {line_no}: relation {subj!r} -> {obj!r} references an undeclared id"
                )
            rep.relations_dropped += 1
            log.warning(
                "line %d: dropping relation %s -> %s (undeclared id)", line_no, subj, obj
            )

    store = ClassifierStore(occupations=occupations, skills=skills, essential=essential)
    store.validate()
    return store


def store_to_triples(
    store: ClassifierStore, predicates: PredicateConfig = DEFAULT_PREDICATES
) -> Iterator[str]:
    """Serialize a store to canonical triple form (sorted, one per line).

    Parsing the output reproduces the store exactly, so
    parse -> serialize -> parse is a fixed point.
    """
    p = predicates
    for occ in sorted(store.occupations):
        info = store.occupations[occ]
        subj = f"{p.occupation_base}{occ}"
        yield f"<{subj}> <{p.rdf_type}> <{p.occupation_class}> ."
        yield f'<{subj}> <{p.pref_label}> "{_escape(info.label)}" .'
        yield f"<{subj}> <{p.isco_group}> <{p.isco_base}{info.isco}> ."
    for skill in sorted(store.skills):
        subj = f"{p.skill_base}{skill}"
        yield f"<{subj}> <{p.rdf_type}> <{p.skill_class}> ."
        yield f'<{subj}> <{p.pref_label}> "{_escape(store.skills[skill])}" .'
    for occ in sorted(store.essential):
        for skill in sorted(store.essential[occ]):
            yield (
                f"<{p.occupation_base}{occ}> <{p.essential_skill}> "
                f"<{p.skill_base}{skill}> ."
            )


# --- intermediate CSV staging (used between CLI stages) ---

def write_store_csv(store: ClassifierStore, out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "occupations.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["occupation_id", "label", "isco_code"])
        for occ in sorted(store.occupations):
            info = store.occupations[occ]
            w.writerow([occ, info.label, info.isco])
    with open(out_dir / "skills.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["skill_id", "label"])
        for skill in sorted(store.skills):
            w.writerow([skill, store.skills[skill]])
    with open(out_dir / "relations.csv", "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["occupation_id", "skill_id"])
        for occ in sorted(store.essential):
            for skill in sorted(store.essential[occ]):
                w.writerow([occ, skill])


def read_store_csv(in_dir: Path) -> ClassifierStore:
    occupations: dict[str, OccupationInfo] = {}
    with open(in_dir / "occupations.csv", newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            occupations[row["occupation_id"]] = OccupationInfo(
                label=row["label"], isco=validate_isco4(row["isco_code"])
            )
    skills: dict[str, str] = {}
    with open(in_dir / "skills.csv", newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            skills[row["skill_id"]] = row["label"]
    essential: dict[str, set[str]] = {occ: set() for occ in occupations}
    with open(in_dir / "relations.csv", newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            essential[row["occupation_id"]].add(row["skill_id"])
    store = ClassifierStore(occupations=occupations, skills=skills, essential=essential)
    store.validate()
    return store


# --- crosswalk ---

@dataclass
class CrosswalkTable:
    """Deduplicated (soc, isco) pairs; one-to-many in both directions."""

    rows: list[tuple[str, str]] = field(default_factory=list)

    def isco_to_socs(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = {}
        for soc, isco in self.rows:
            out.setdefault(isco, set()).add(soc)
        return out


def _header_index(header: list[str], required: tuple[str, ...], what: str) -> dict[str, int]:
    cols = {name.strip().lower(): i for i, name in enumerate(header)}
    missing = [c for c in required if c not in cols]
    if missing:
        raise EmptyTable(f"{what}: header lacks required columns {missing}")
    return {c: cols[c] for c in required}

def parse_crosswalk(lines: Iterable[str]) -> CrosswalkTable:
    """Read the SOC-to-ISCO crosswalk; extra columns are ignored."""
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyTable("crosswalk: empty input") from None
    idx = _header_index(header, ("soc_code", "isco_code"), "crosswalk")

    seen: set[tuple[str, str]] = set()
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        soc = normalize_soc(row[idx["soc_code"]])
        isco = validate_isco4(row[idx["isco_code"]])
        seen.add((soc, isco))
    if not seen:
        raise EmptyTable("crosswalk: no data rows")
    return CrosswalkTable(rows=sorted(seen))


def write_crosswalk_csv(table: CrosswalkTable, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["soc_code", "isco_code"])
        w.writerows(table.rows)


# --- automation probabilities ---

@dataclass
class AutomationTable:
    """SOC code to probability of computerisation, all in [0, 1]."""

    probs: dict[str, float] = field(default_factory=dict)


def parse_automation(lines: Iterable[str]) -> AutomationTable:
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise EmptyTable("automation: empty input") from None
    idx = _header_index(header, ("soc_code", "probability"), "automation")

    probs: dict[str, float] = {}
    for row in reader:
        if not row or all(not c.strip() for c in row):
            continue
        soc = normalize_soc(row[idx["soc_code"]])
        tok = row[idx["probability"]].strip()
        try:
            p = float(tok)
        except ValueError:
            raise BadCode(f"automation: not a probability: {tok!r}") from None
        if not 0.0 <= p <= 1.0:
            raise OutOfRange(f"automation: probability for {soc} out of [0,1]: {tok}")
        if soc in probs:
            if probs[soc] != p:
                raise DuplicateSoc(f"{soc} listed with both {probs[soc]} and {p}")
            continue
        probs[soc] = p
    if not probs:
        raise EmptyTable("automation: no data rows")
    return AutomationTable(probs=probs)


def write_automation_csv(table: AutomationTable, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["soc_code", "probability"])
        for soc in sorted(table.probs):
            w.writerow([soc, repr(table.probs[soc])])


# --- stats ---

@dataclass(frozen=True)
class StoreStats:
    n_occupations: int
    n_skills: int
    n_relations: int
    n_distinct_isco: int

    def as_dict(self) -> dict[str, int]:
        return {
            "n_occupations": self.n_occupations,
            "n_skills": self.n_skills,
            "n_relations": self.n_relations,
            "n_distinct_isco": self.n_distinct_isco,
        }


def store_stats(store: ClassifierStore) -> StoreStats:
    stats = StoreStats(
        n_occupations=len(store.occupations),
        n_skills=len(store.skills),
        n_relations=store.n_relations(),
        n_distinct_isco=len({i.isco for i in store.occupations.values()}),
    )
    log.info("store stats: %s", stats.as_dict())
    return stats
