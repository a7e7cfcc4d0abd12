from __future__ import annotations

import random
from pathlib import Path

import pytest

from qcbounds.enumerators import StabilizerCode

CODES_DIR = Path(__file__).resolve().parent.parent / "codes"


def load_code(name: str) -> StabilizerCode:
    return StabilizerCode.from_file(CODES_DIR / f"{name}.txt")


#: (file name, expected n, k, distance) -- the exact-oracle corpus (n <= 5)
CORPUS_SMALL = [
    ("single_z", 1, 0, 1),
    ("bell", 2, 0, 2),
    ("ghz3", 3, 0, 2),
    ("repetition3", 3, 1, 1),
    ("four_two_two", 4, 2, 2),
    ("ghz4", 4, 0, 2),
    ("five_qubit", 5, 1, 3),
    ("five_zero_three", 5, 0, 3),
]


@pytest.fixture(scope="session")
def corpus_small() -> list[StabilizerCode]:
    return [load_code(name) for name, *_ in CORPUS_SMALL]


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240311)
