"""Map SOC automation probabilities through the crosswalk onto occupations.

The crosswalk is one-to-many: several SOC codes can land on one ISCO code,
each with its own probability, so every ISCO gets both the maximum and the
unweighted mean of whatever probabilities reach it. Occupations inherit
their ISCO code's annotation verbatim. Occupations no probability reaches
carry no annotation at all; zero would be a real claim.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .ingest import AutomationTable, ClassifierStore, CrosswalkTable


@dataclass(frozen=True)
class AutomationAnnotation:
    prob_max: float
    prob_avg: float


def _exact_mean(values: list[float]) -> float:
    # Plain float summation drifts ((0.1+0.2+0.9)/3 != 0.4); go through
    # exact rationals and round once at the end.
    return float(sum(map(Fraction, values)) / len(values))


def isco_automation(
    crosswalk: CrosswalkTable, probs: AutomationTable
) -> dict[str, AutomationAnnotation]:
    """Collect crosswalked SOC probabilities per ISCO code.

    SOC codes absent from the automation table are silently excluded (the
    coverage report lists them); an ISCO whose SOCs are all absent gets no
    entry. Duplicate crosswalk rows contribute once.
    """
    out: dict[str, AutomationAnnotation] = {}
    for isco, socs in sorted(crosswalk.isco_to_socs().items()):
        collected = [probs.probs[s] for s in sorted(socs) if s in probs.probs]
        if not collected:
            continue
        out[isco] = AutomationAnnotation(
            prob_max=max(collected), prob_avg=_exact_mean(collected)
        )
    return out


def occupation_automation(
    store: ClassifierStore, isco_probs: dict[str, AutomationAnnotation]
) -> dict[str, AutomationAnnotation]:
    """Each occupation inherits its ISCO code's annotation; unmapped stay absent."""
    return {
        occ: isco_probs[info.isco]
        for occ, info in store.occupations.items()
        if info.isco in isco_probs
    }


@dataclass(frozen=True)
class CoverageRow:
    isco: str
    n_socs_matched: int
    annotation: AutomationAnnotation | None


def coverage_report(
    store: ClassifierStore, crosswalk: CrosswalkTable, probs: AutomationTable
) -> list[CoverageRow]:
    """One row per distinct ISCO code in the store, annotated or not."""
    isco_socs = crosswalk.isco_to_socs()
    isco_probs = isco_automation(crosswalk, probs)
    rows = []
    for isco in sorted({info.isco for info in store.occupations.values()}):
        matched = sum(1 for s in isco_socs.get(isco, set()) if s in probs.probs)
        rows.append(
            CoverageRow(isco=isco, n_socs_matched=matched, annotation=isco_probs.get(isco))
        )
    return rows


def write_coverage_csv(rows: list[CoverageRow], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["isco_code", "n_socs_matched", "prob_max", "prob_avg"])
        for r in rows:
            if r.annotation is None:
                w.writerow([r.isco, r.n_socs_matched, "", ""])
            else:
                w.writerow(
                    [r.isco, r.n_socs_matched, repr(r.annotation.prob_max), repr(r.annotation.prob_avg)]
                )


# --- intermediate CSV staging ---

def write_occupation_automation_csv(
    annotations: dict[str, AutomationAnnotation], path: Path
) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["occupation_id", "prob_max", "prob_avg"])
        for occ in sorted(annotations):
            a = annotations[occ]
            w.writerow([occ, repr(a.prob_max), repr(a.prob_avg)])


def read_occupation_automation_csv(path: Path) -> dict[str, AutomationAnnotation]:
    out: dict[str, AutomationAnnotation] = {}
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            out[row["occupation_id"]] = AutomationAnnotation(
                prob_max=float(row["prob_max"]), prob_avg=float(row["prob_avg"])
            )
    return out
