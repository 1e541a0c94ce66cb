import numpy as np
import pytest

from greedyicl import study


def test_default_grid_has_forty_levels():
    g = study.parse_grid("0.0125:0.0125:0.5")
    assert g.size == 40 and g[0] == 0.0125 and g[-1] == 0.5
    assert g.size * 20 == 800


def test_single_point_grid():
    assert study.parse_grid("0.5:0.0125:0.5").tolist() == [0.5]


@pytest.mark.parametrize("text", ["0.1:0:0.5", "0.5:0.1:0.1", "1,2,3"])
def test_bad_grids(text):
    with pytest.raises(ValueError):
        study.parse_grid(text)


def test_cell_seeds_distinct():
    seeds = {study.cell_seed(0, qi, r) for qi in range(40) for r in range(20)}
    assert len(seeds) == 800


def test_run_is_reproducible():
    a = study.run_study([0.1], reps=2, restarts=1, seed=3, n=30, m=30, k=3)
    b = study.run_study([0.1], reps=2, restarts=1, seed=3, n=30, m=30, k=3)
    assert [(r.nmi, r.icl, r.k, r.g) for r in a] == [(r.nmi, r.icl, r.k, r.g) for r in b]
    qs, means = study.mean_by_q(a)
    assert qs.tolist() == [0.1] and means[0] == pytest.approx(np.mean([r.nmi for r in a]))
