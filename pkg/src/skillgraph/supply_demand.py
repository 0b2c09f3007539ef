"""Stream CV and vacancy records into a per-(occupation, country) crosstab.

Jobseekers are deduplicated: once per (occupation, country) cell and once
per (occupation, TOTAL), so replaying monthly snapshots never inflates
counts. Vacancies are plain sums. Partial aggregates built from sharded
input merge associatively, so the result is independent of shard order.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .codes import TOTAL, normalize_country, validate_isco4, validate_month
from .errors import BadCode, MalformedRecord, ParseFailure
from .ingest import ClassifierStore

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CvRecord:
    jobseeker_id: str
    country: str
    desired_occupation: str
    snapshot_month: str


@dataclass(frozen=True)
class VacancyRecord:
    vacancy_id: str
    country: str
    isco: str
    n: int = 1


def make_cv_record(jobseeker_id: str, country: str, occupation: str, month: str) -> CvRecord:
    if not jobseeker_id.strip() or not occupation.strip():
        raise MalformedRecord("empty jobseeker or occupation id")
    try:
        return CvRecord(
            jobseeker_id=jobseeker_id.strip(),
            country=normalize_country(country),
            desired_occupation=occupation.strip(),
            snapshot_month=validate_month(month),
        )
    except BadCode as exc:
        raise MalformedRecord(str(exc)) from None


def make_vacancy_record(vacancy_id: str, country: str, isco: str, n: str | int = 1) -> VacancyRecord:
    if not vacancy_id.strip():
        raise MalformedRecord("empty vacancy id")
    try:
        count = int(n) if str(n).strip() else 1
    except ValueError:
        raise MalformedRecord(f"not a count: {n!r}") from None
    if count < 1:
        raise MalformedRecord(f"count must be >= 1, got {count}")
    try:
        return VacancyRecord(
            vacancy_id=vacancy_id.strip(),
            country=normalize_country(country),
            isco=validate_isco4(isco),
            n=count,
        )
    except BadCode as exc:
        raise MalformedRecord(str(exc)) from None


@dataclass
class StreamReport:
    rows: int = 0
    malformed: int = 0


def read_cv_csv(lines: Iterable[str], report: StreamReport | None = None) -> Iterator[CvRecord]:
    """Stream cv.csv rows; malformed records are counted and skipped."""
    rep = report if report is not None else StreamReport()
    for row in csv.DictReader(lines):
        rep.rows += 1
        try:
            yield make_cv_record(
                row.get("jobseeker_id") or "",
                row.get("country") or "",
                row.get("desired_occupation") or "",
                row.get("snapshot_month") or "",
            )
        except MalformedRecord as exc:
            rep.malformed += 1
            log.warning("cv row %d skipped: %s", rep.rows, exc)


def read_vacancies_csv(
    lines: Iterable[str], report: StreamReport | None = None
) -> Iterator[VacancyRecord]:
    """Stream vacancies.csv rows; the n column is optional and defaults to 1."""
    rep = report if report is not None else StreamReport()
    for row in csv.DictReader(lines):
        rep.rows += 1
        try:
            yield make_vacancy_record(
                row.get("vacancy_id") or "",
                row.get("country") or "",
                row.get("isco_code") or "",
                row.get("n") if row.get("n") is not None else 1,
            )
        except MalformedRecord as exc:
            rep.malformed += 1
            log.warning("vacancy row %d skipped: %s", rep.rows, exc)


@dataclass
class CvAggregate:
    """Distinct jobseekers per (occupation, country) and per occupation.

    State is exact sets of seeker ids, bounded by the number of distinct
    (seeker, occupation, country) triples, never by stream length.
    """

    by_cell: dict[tuple[str, str], set[str]] = field(default_factory=dict)
    by_occupation: dict[str, set[str]] = field(default_factory=dict)

    def add(self, rec: CvRecord) -> None:
        self.by_cell.setdefault((rec.desired_occupation, rec.country), set()).add(
            rec.jobseeker_id
        )
        self.by_occupation.setdefault(rec.desired_occupation, set()).add(rec.jobseeker_id)

    def merge(self, other: "CvAggregate") -> None:
        for cell, ids in other.by_cell.items():
            self.by_cell.setdefault(cell, set()).update(ids)
        for occ, ids in other.by_occupation.items():
            self.by_occupation.setdefault(occ, set()).update(ids)

    def counts(self) -> dict[tuple[str, str], int]:
        """Cell counts including the (occupation, TOTAL) marginal."""
        out = {cell: len(ids) for cell, ids in self.by_cell.items()}
        for occ, ids in self.by_occupation.items():
            out[(occ, TOTAL)] = len(ids)
        return out


@dataclass
class VacancyAggregate:
    """Vacancy sums per (isco, country); TOTAL is the sum over countries."""

    by_cell: dict[tuple[str, str], int] = field(default_factory=dict)

    def add(self, rec: VacancyRecord) -> None:
        cell = (rec.isco, rec.country)
        self.by_cell[cell] = self.by_cell.get(cell, 0) + rec.n

    def merge(self, other: "VacancyAggregate") -> None:
        for cell, n in other.by_cell.items():
            self.by_cell[cell] = self.by_cell.get(cell, 0) + n

    def counts(self) -> dict[tuple[str, str], int]:
        out = dict(self.by_cell)
        totals: dict[str, int] = {}
        for (isco, _country), n in self.by_cell.items():
            totals[isco] = totals.get(isco, 0) + n
        for isco, n in totals.items():
            out[(isco, TOTAL)] = n
        return out


def aggregate_cv(records: Iterable[CvRecord]) -> CvAggregate:
    agg = CvAggregate()
    for rec in records:
        agg.add(rec)
    return agg


def aggregate_vacancies(records: Iterable[VacancyRecord]) -> VacancyAggregate:
    agg = VacancyAggregate()
    for rec in records:
        agg.add(rec)
    return agg


@dataclass(frozen=True)
class CellCounts:
    vacancies: int
    seekers: int


@dataclass
class SupplyDemandCube:
    """(occupation, country-or-TOTAL) -> counts. Missing cells read as zero."""

    cells: dict[tuple[str, str], CellCounts] = field(default_factory=dict)

    def cell(self, occupation: str, country: str = TOTAL) -> CellCounts:
        return self.cells.get((occupation, country), CellCounts(0, 0))

    def countries(self) -> list[str]:
        return sorted({c for (_occ, c) in self.cells if c != TOTAL})


@dataclass
class JoinReport:
    unmapped_isco: dict[str, int] = field(default_factory=dict)

    @property
    def orphaned_vacancies(self) -> int:
        return sum(self.unmapped_isco.values())


def attach_counts(
    store: ClassifierStore,
    cv_agg: CvAggregate,
    vac_agg: VacancyAggregate,
    report: JoinReport | None = None,
) -> SupplyDemandCube:
    """Join aggregates onto occupations.

    Seeker counts join on occupation id directly. Vacancy counts join via
    the occupation's ISCO code and fan out: every occupation under an ISCO
    receives that code's full count (duplication is deliberate and flagged
    in export metadata; inventing split weights would be worse). Vacancy
    ISCOs with no occupation under them are reported, not raised.
    """
    rep = report if report is not None else JoinReport()
    cv_counts = cv_agg.counts()
    vac_counts = vac_agg.counts()

    isco_of = {occ: info.isco for occ, info in store.occupations.items()}
    known_iscos = set(isco_of.values())
    for (isco, country), n in vac_agg.by_cell.items():
        if isco not in known_iscos:
            rep.unmapped_isco[isco] = rep.unmapped_isco.get(isco, 0) + n
    if rep.unmapped_isco:
        log.warning(
            "%d vacancies under %d ISCO codes with no occupation",
            rep.orphaned_vacancies,
            len(rep.unmapped_isco),
        )

    vac_by_isco: dict[str, dict[str, int]] = {}
    for (isco, country), n in vac_counts.items():
        vac_by_isco.setdefault(isco, {})[country] = n
    cv_by_occ: dict[str, dict[str, int]] = {}
    for (occ, country), n in cv_counts.items():
        cv_by_occ.setdefault(occ, {})[country] = n

    cells: dict[tuple[str, str], CellCounts] = {}
    for occ in store.occupations:
        vac = vac_by_isco.get(isco_of[occ], {})
        cv = cv_by_occ.get(occ, {})
        for country in set(vac) | set(cv) | {TOTAL}:
            cells[(occ, country)] = CellCounts(
                vacancies=vac.get(country, 0), seekers=cv.get(country, 0)
            )
    return SupplyDemandCube(cells=cells)


# --- intermediate CSV staging ---

def write_cube_csv(cube: SupplyDemandCube, path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["occupation_id", "country", "vacancies", "seekers"])
        for occ, country in sorted(cube.cells):
            c = cube.cells[(occ, country)]
            w.writerow([occ, country, c.vacancies, c.seekers])


def read_cube_csv(path: Path) -> SupplyDemandCube:
    cells: dict[tuple[str, str], CellCounts] = {}
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.DictReader(f):
            vac, seek = int(row["vacancies"]), int(row["seekers"])
            if vac < 0 or seek < 0:
                raise ParseFailure(f"negative count for {row['occupation_id']}")
            cells[(row["occupation_id"], row["country"])] = CellCounts(vac, seek)
    return SupplyDemandCube(cells=cells)
