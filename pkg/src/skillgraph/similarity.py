"""Skill-match similarity between occupations and top-k graph pruning.

The similarity of a to b is |essential(a) and essential(b)| / |essential(a)|,
which is directional: the same pair can score differently in each direction
when the two skill sets have different sizes.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import UnknownOccupation
from .ingest import ClassifierStore


@dataclass(frozen=True)
class SimilarityLink:
    """Directed occupation-to-occupation edge; ratio in (0, 1]."""

    source: str
    target: str
    ratio: float


@dataclass(frozen=True)
class DisplayEdge:
    """Undirected rendering edge; a < b, ratio is the max surviving direction."""

    a: str
    b: str
    ratio: float


def skill_match(store: ClassifierStore, a: str, b: str) -> float:
    """Fraction of a's essential skills also essential for b.

    Zero-skill occupations score 0 against everything (they stay in the
    graph as isolated nodes; no division by zero).
    """
    for occ in (a, b):
        if occ not in store.occupations:
            raise UnknownOccupation(occ)
    sa = store.essential.get(a, set())
    if not sa:
        return 0.0
    sb = store.essential.get(b, set())
    return len(sa & sb) / len(sa)


def top_k_links(
    store: ClassifierStore, k: int = 3, min_ratio: float = 0.0
) -> list[SimilarityLink]:
    """Keep, per occupation, the k highest-ratio links.

    Candidates come from an inverted skill-to-occupations index, so only
    pairs sharing at least one skill are ever scored. Output order is
    (source asc, ratio desc, target asc); ties at the rank-k boundary go
    to the lexicographically smaller target.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    cutoff = max(0.0, min_ratio)

    by_skill: dict[str, list[str]] = {}
    for occ, skills in store.essential.items():
        for s in skills:
            by_skill.setdefault(s, []).append(occ)

    links: list[SimilarityLink] = []
    for occ in sorted(store.occupations):
        own = store.essential.get(occ, set())
        if not own:
            continue
        shared: dict[str, int] = {}
        for s in own:
            for other in by_skill[s]:
                if other != occ:
                    shared[other] = shared.get(other, 0) + 1
        n = len(own)
        candidates = [
            (count / n, other) for other, count in shared.items() if count / n > cutoff
        ]
        candidates.sort(key=lambda c: (-c[0], c[1]))
        links.extend(
            SimilarityLink(source=occ, target=other, ratio=ratio)
            for ratio, other in candidates[:k]
        )
    return links


def merge_undirected(links: Iterable[SimilarityLink]) -> list[DisplayEdge]:
    """Collapse directed links onto unordered pairs, keeping the max ratio."""
    best: dict[tuple[str, str], float] = {}
    for link in links:
        pair = (link.source, link.target) if link.source < link.target else (link.target, link.source)
        if pair not in best or link.ratio > best[pair]:
            best[pair] = link.ratio
    return [DisplayEdge(a=a, b=b, ratio=best[(a, b)]) for a, b in sorted(best)]


# --- intermediate CSV staging ---

def write_links_csv(links: list[SimilarityLink], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["source", "target", "ratio"])
        for link in links:
            w.writerow([link.source, link.target, repr(link.ratio)])


def read_links_csv(path: Path) -> list[SimilarityLink]:
    with open(path, newline="", encoding="utf-8") as f:
        return [
            SimilarityLink(row["source"], row["target"], float(row["ratio"]))
            for row in csv.DictReader(f)
        ]


def write_edges_csv(edges: list[DisplayEdge], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["a", "b", "ratio"])
        for e in edges:
            w.writerow([e.a, e.b, repr(e.ratio)])


def read_edges_csv(path: Path) -> list[DisplayEdge]:
    with open(path, newline="", encoding="utf-8") as f:
        return [
            DisplayEdge(row["a"], row["b"], float(row["ratio"]))
            for row in csv.DictReader(f)
        ]
