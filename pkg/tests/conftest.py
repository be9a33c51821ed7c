from __future__ import annotations

import sys
from pathlib import Path
from typing import List

import pytest

PROJECT_ROOT = Path(__file__).resolve().parents[1]
SRC_PATH = PROJECT_ROOT / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))

from residue_subsets.arith.primes import classify, primes_in_range  # noqa: E402
from residue_subsets.domain.models import ClassifiedPrime  # noqa: E402


@pytest.fixture(scope="session")
def classified_primes() -> List[ClassifiedPrime]:
    """Every prime 5 <= p < 2000, classified once per session."""

    return [classify(p) for p in primes_in_range(5, 2000)]
