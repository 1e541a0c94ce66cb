import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greedyicl import (BipartiteAdjacency, DataFormatError, ModelKind, Partition, PriorConfig,
                       SearchConfig, compact_labels, load, load_dense, load_sparse,
                       random_partition, save_dense, save_sparse)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


class TestDenseCsv:
    def test_identity(self, tmp_path):
        adj = load_dense(write(tmp_path, "a.csv", "1,0\n0,1\n"), "bernoulli")
        assert adj.shape == (2, 2)
        np.testing.assert_array_equal(adj.dense, np.eye(2))
        assert adj.storage == "dense"

    def test_header_is_skipped(self, tmp_path):
        adj = load_dense(write(tmp_path, "a.csv", "x,y\n1,0\n0,1\n"), "bernoulli")
        assert adj.shape == (2, 2)

    def test_short_row_names_line(self, tmp_path):
        p = write(tmp_path, "a.csv", "1,0,1,1\n0,1,0\n")
        with pytest.raises(DataFormatError) as exc:
            load_dense(p, "bernoulli")
        assert exc.value.line == 2
        assert "a.csv:2" in str(exc.value)

    def test_malformed_cell(self, tmp_path):
        with pytest.raises(DataFormatError):
            load_dense(write(tmp_path, "a.csv", "1,0\n0,zz\n"), "bernoulli")

    @pytest.mark.parametrize("model,text", [
        ("bernoulli", "1,0\n0,3\n"),
        ("bernoulli", "1,0\n0,0.5\n"),
        ("categorical", "1,0\n0,3\n"),
        ("poisson", "1,0\n0,-1\n"),
        ("poisson", "1,0\n0,1.5\n"),
        ("gaussian", "1,0\n0,inf\n"),
    ])
    def test_domain_violation_reports_coordinates(self, tmp_path, model, text):
        with pytest.raises(DataFormatError, match="row 2, column 2"):
            load_dense(write(tmp_path, "a.csv", text), model, n_categories=3)

    def test_congress_votes_shape(self, congress_path):
        adj = load_dense(congress_path, "bernoulli")
        assert adj.shape == (435, 16)

    def test_loading_twice_is_equal(self, tmp_path):
        p = write(tmp_path, "a.csv", "1,2\n0,4\n")
        assert load_dense(p, "poisson") == load_dense(p, "poisson")


class TestSparseTriplets:
    def test_same_as_dense_identity(self, tmp_path):
        s = load_sparse(write(tmp_path, "a.txt", "2 2 2\n1 1 1\n2 2 1\n"), "bernoulli")
        d = load_dense(write(tmp_path, "a.csv", "1,0\n0,1\n"), "bernoulli")
        assert s.storage == "sparse"
        assert s == d

    def test_matrix_market_banner(self, tmp_path):
        text = "%%MatrixMarket matrix coordinate integer general\n% note\n2 3 2\n1 3 4\n2 1 1\n"
        adj = load_sparse(write(tmp_path, "a.mtx", text), "poisson")
        np.testing.assert_array_equal(adj.dense, [[0, 0, 4], [1, 0, 0]])

    @pytest.mark.parametrize("text,msg", [
        ("2 2 1\n1 1 0\n", "explicit zero"),
        ("2 2 2\n1 1 1\n1 1 1\n", "duplicate"),
        ("2 2 1\n3 1 1\n", "range"),
        ("2 2 2\n1 1 1\n", "nnz|entries|expected"),
    ])
    def test_rejections(self, tmp_path, text, msg):
        with pytest.raises(DataFormatError, match=msg):
            load_sparse(write(tmp_path, "a.txt", text), "bernoulli")

    def test_movielens(self, movielens_path):
        adj = load_sparse(movielens_path, "poisson")
        assert adj.shape == (943, 1682)
        assert adj.nnz == 100000
        assert abs(adj.density - 0.063) < 0.001

    def test_load_dispatches_on_suffix(self, tmp_path):
        p = write(tmp_path, "a.txt", "2 2 2\n1 1 1\n2 2 1\n")
        assert load(p, "bernoulli").storage == "sparse"


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.sampled_from(["bernoulli", "poisson", "gaussian"]),
       st.integers(0, 2**31))
def test_round_trip_dense_sparse_dense(n, m, model, seed):
    rng = np.random.default_rng(seed)
    if model == "gaussian":
        y = np.where(rng.random((n, m)) < 0.5, 0.0, rng.normal(size=(n, m)))
    elif model == "poisson":
        y = rng.poisson(1.0, (n, m))
    else:
        y = rng.integers(0, 2, (n, m))
    adj = BipartiteAdjacency.from_dense(y, model)
    back = adj.with_storage("sparse").with_storage("dense")
    assert np.array_equal(back.dense, adj.dense)


def test_file_round_trip_exact_for_gaussian(tmp_path, rng):
    y = rng.normal(size=(5, 4))
    adj = BipartiteAdjacency.from_dense(y, "gaussian")
    save_dense(adj, tmp_path / "a.csv")
    save_sparse(adj, tmp_path / "a.txt")
    assert np.array_equal(load_dense(tmp_path / "a.csv", "gaussian").dense, y)
    assert np.array_equal(load_sparse(tmp_path / "a.txt", "gaussian").dense, y)


def test_views_agree(rng):
    y = rng.poisson(0.7, (7, 9))
    adj = BipartiteAdjacency.from_dense(y, "poisson")
    np.testing.assert_array_equal(adj.csr.toarray(), y)
    np.testing.assert_array_equal(adj.csc.toarray(), y.T)
    np.testing.assert_array_equal(adj.transpose().dense, y.T)


class TestPartition:
    def test_single_cluster(self, rng):
        assert np.all(random_partition(5, 1, rng) == 0)

    def test_deterministic_under_seed(self):
        a = random_partition(100, 10, np.random.default_rng(7))
        b = random_partition(100, 10, np.random.default_rng(7))
        assert np.array_equal(a, b)

    def test_k_above_n_rejected(self, rng):
        with pytest.raises(ValueError):
            random_partition(3, 4, rng)

    def test_uniform_over_assignments(self):
        # Enumerating the 27 label assignments of 3 nodes gives the exact law
        # of the induced set partition; compare against 10^5 draws.
        import itertools
        from scipy.stats import chisquare

        def canon(lab):
            seen = {}
            return tuple(seen.setdefault(v, len(seen)) for v in lab)

        expected = {}
        for lab in itertools.product(range(3), repeat=3):
            key = canon(lab)
            expected[key] = expected.get(key, 0) + 1
        rng = np.random.default_rng(11)
        draws = 100_000
        observed = dict.fromkeys(expected, 0)
        for _ in range(draws):
            observed[canon(random_partition(3, 3, rng))] += 1
        keys = sorted(expected)
        f_exp = np.array([expected[k] for k in keys]) * draws / 27
        assert chisquare([observed[k] for k in keys], f_exp).pvalue > 0.001

    def test_compaction_preserves_order(self):
        np.testing.assert_array_equal(compact_labels([7, 2, 7, 9]), [1, 0, 1, 2])

    def test_partition_rejects_gaps(self):
        with pytest.raises(ValueError):
            Partition(np.array([0, 2]), np.array([0]))

    def test_counts_and_one_based(self):
        p = Partition.from_one_based([1, 2, 2], [1, 1])
        assert (p.K, p.G) == (2, 1)
        assert p.row_counts.tolist() == [1, 2]
        assert p.row_counts.sum() == 3 and p.col_counts.sum() == 2


class TestConfig:
    def test_defaults(self):
        p = PriorConfig()
        assert (p.alpha0, p.beta0, p.eta) == (1.0, 1.0, 1.0)
        s = SearchConfig()
        assert s.prune_threshold == 150 and s.prune_warmup_sweeps == 5

    @pytest.mark.parametrize("field", ["alpha0", "beta0", "eta", "zeta", "delta", "gamma", "kappa"])
    def test_non_positive_rejected(self, field):
        with pytest.raises(ValueError):
            PriorConfig(**{field: 0.0})

    def test_variants(self):
        assert SearchConfig.for_variant("A0").variant == "A0"
        a3 = SearchConfig.for_variant("A3")
        assert a3.pruning and a3.sparse_engine
        assert SearchConfig.for_variant("A1").sparse_engine and not SearchConfig.for_variant("A1").pruning
        assert SearchConfig.for_variant("A2").pruning and not SearchConfig.for_variant("A2").sparse_engine

    def test_sizes(self):
        assert SearchConfig().resolve_sizes(435, 16) == (50, 16)
        with pytest.raises(ValueError):
            SearchConfig(k_init=5).resolve_sizes(4, 4)

    def test_threshold_positive(self):
        with pytest.raises(ValueError):
            SearchConfig(prune_threshold=0)

    def test_dict_round_trip(self):
        p = PriorConfig(model="gaussian", xi=0.5)
        assert PriorConfig.from_dict(p.to_dict()) == p
        s = SearchConfig.for_variant("A2", restarts=3)
        assert SearchConfig.from_dict(s.to_dict()) == s

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            ModelKind.parse("binomial")
