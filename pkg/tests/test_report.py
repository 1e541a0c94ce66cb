import json

import numpy as np
import pytest

from greedyicl import (FitReport, PriorConfig, SearchConfig, diagonal_spec, fit, generate,
                       read_trace_csv, write_trace_csv)


@pytest.fixture(scope="module")
def result():
    adj, _, _ = generate(diagonal_spec(40, 30, 3, 0.1, seed=2))
    return fit(adj, PriorConfig(), SearchConfig(restarts=3, rng_seed=5))


def test_round_trip_is_identity(result, tmp_path):
    rep = FitReport.from_result(result)
    rep.write(tmp_path / "r.json")
    assert FitReport.read(tmp_path / "r.json") == rep


def test_fields(result):
    rep = FitReport.from_result(result)
    assert rep.icl == result.icl
    assert (rep.k, rep.g) == (result.k, result.g)
    assert min(rep.row_labels) == 1 and max(rep.row_labels) == rep.k
    assert rep.partition == result.partition
    assert rep.restarts == 3 and len(rep.restart_icls) == 3
    assert rep.prior_config == result.prior
    assert rep.search_config == result.config
    assert np.all(np.diff(rep.trace) >= 0)


def test_layout_is_one_key_per_line(result, tmp_path):
    FitReport.from_result(result).write(tmp_path / "r.json")
    lines = (tmp_path / "r.json").read_text().splitlines()
    body = json.loads("\n".join(lines))
    assert len(lines) == len(body) + 2
    assert body["format_version"] == "1"


def test_unknown_version_rejected(result, tmp_path):
    d = FitReport.from_result(result).to_dict()
    d["format_version"] = "0"
    (tmp_path / "r.json").write_text(json.dumps(d))
    with pytest.raises(ValueError, match="format_version"):
        FitReport.read(tmp_path / "r.json")


def test_without_timing(result):
    d = FitReport.from_result(result).without_timing()
    assert "wall_time_ms" not in d and "restart_times_ms" not in d
    assert "sparse_engine" not in d["search"] and "restarts" in d["search"]


def test_trace_csv(result, tmp_path):
    write_trace_csv(result.history, tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "sweep,icl,moves,K,G"
    t = read_trace_csv(tmp_path / "t.csv")
    assert t.shape == (len(result.history), 5)
    np.testing.assert_array_equal(t[:, 1], result.trace)
    assert np.all(np.diff(t[:, 1]) >= 0)
