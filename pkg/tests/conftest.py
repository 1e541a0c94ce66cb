from pathlib import Path

import pytest

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def congress_path():
    p = DATA / "congress_votes.csv"
    if not p.exists():
        pytest.skip("congressional votes file missing; run scripts/fetch_datasets.py")
    return p


@pytest.fixture(scope="session")
def movielens_path():
    p = DATA / "ml100k.txt"
    if not p.exists():
        pytest.skip("MovieLens-100k file missing; run scripts/fetch_datasets.py")
    return p
