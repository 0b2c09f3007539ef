import random
from pathlib import Path

import pytest

from skillgraph.ingest import ClassifierStore, OccupationInfo, parse_esco_triples

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = Path(__file__).parent / "golden"

BUS = "00cee175-1376-43fb-9f02-ba3d7a910a58"
CHAUFFEUR = "e75305db-9011-4ee0-ab62-8d41a98f807e"
TROLLEY = "29096c40-1355-4fbf-9f41-5ecd27076caa"
TRAM = "7ffa1e32-0229-4c04-9c11-1e2f25cb2f5b"
TAXI = "d1f5c9a4-66f1-4b6f-9a2e-3a2d19b6f3c7"
CARGO = "63e139e2-0f4a-4d21-b1ba-7a2b9f44c0d1"
DANGEROUS = "89b51f33-3bb7-4d13-8d4f-04d2eac219e9"
PHYSIO = "b7d7c9a9-5fc2-4e0b-bd68-6b4b8f3a2f10"
SOFTWARE = "f2b1a8d0-22e7-4b45-9f3e-d1c4a5e6b7c8"
PERFORMER = "a01b2c3d-4e5f-4a6b-8c7d-9e0f1a2b3c4d"


@pytest.fixture(scope="session")
def fixture_store() -> ClassifierStore:
    with open(FIXTURES / "esco.nt", encoding="utf-8") as f:
        return parse_esco_triples(f)


@pytest.fixture(scope="session")
def table1_store() -> ClassifierStore:
    with open(FIXTURES / "table1" / "esco.nt", encoding="utf-8") as f:
        return parse_esco_triples(f)


def make_random_store(seed: int, n_occupations: int = 50, max_skills: int = 20,
                      n_skill_pool: int = 30) -> ClassifierStore:
    """Random store for oracle comparisons; skill sets may be empty."""
    rng = random.Random(seed)
    pool = [f"s{i:03d}" for i in range(n_skill_pool)]
    occupations = {}
    essential = {}
    for i in range(n_occupations):
        oid = f"occ{i:03d}"
        occupations[oid] = OccupationInfo(label=oid, isco=str(rng.randrange(1000, 10000)))
        essential[oid] = set(rng.sample(pool, rng.randrange(0, max_skills + 1)))
    return ClassifierStore(
        occupations=occupations, skills={s: s for s in pool}, essential=essential
    )
