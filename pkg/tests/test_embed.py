import math

import numpy as np
import pytest

import oracles
from hlsum.embed import (
    EmbeddingError,
    TsneConfig,
    conditional_affinities,
    kl_divergence,
    kl_gradient,
    pairwise_sq_dists,
    symmetrize,
    tsne_embed,
)
from hlsum.embed.output import embedding_csv, scatter_svg
from hlsum.embed.tsne import conditional_matrix, student_t_kernel


def two_clusters(seed, per=20, dims=27, separation=6.0):
    rng = np.random.default_rng(seed)
    shift = np.zeros(dims)
    shift[0] = separation
    X = np.vstack([rng.normal(size=(per, dims)), rng.normal(size=(per, dims)) + shift])
    return X, [0] * per + [1] * per


def test_pairwise_examples():
    np.testing.assert_array_equal(pairwise_sq_dists([[1.0, 2.0], [1.0, 2.0]]), np.zeros((2, 2)))
    assert pairwise_sq_dists([[0.0, 0.0], [3.0, 4.0]])[0, 1] == 25.0
    with pytest.raises(EmbeddingError):
        pairwise_sq_dists([[1.0, 2.0]])


def test_pairwise_matches_double_loop():
    X = np.random.default_rng(1).normal(size=(4, 3))
    D = pairwise_sq_dists(X)
    np.testing.assert_allclose(D, oracles.sq_dists(X.tolist()), rtol=0, atol=1e-12)
    np.testing.assert_array_equal(D, D.T)
    np.testing.assert_array_equal(np.diag(D), 0.0)


def test_equidistant_neighbours_split_evenly():
    D = pairwise_sq_dists([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0]])
    row, _ = conditional_affinities(D[0], 2.0, 0)
    np.testing.assert_allclose(row, [0.0, 0.5, 0.5], atol=1e-15)


def test_uniform_distances_give_uniform_row():
    n = 6
    D = np.ones((n, n)) - np.eye(n)
    row, _ = conditional_affinities(D[2], n - 1, 2)
    expected = np.full(n, 1 / (n - 1))
    expected[2] = 0.0
    np.testing.assert_allclose(row, expected, atol=1e-12)


def test_rows_match_bisection_oracle():
    X = np.array([[0.0, 0.0], [1.0, 0.2], [0.3, 2.0], [4.0, 1.0], [2.5, 2.5]])
    D = pairwise_sq_dists(X)
    ref = oracles.sq_dists(X.tolist())
    for i in range(5):
        row, _ = conditional_affinities(D[i], 2.0, i)
        np.testing.assert_allclose(row, oracles.affinity_row(ref[i], i, 2.0), rtol=0, atol=1e-6)
        assert row.sum() == pytest.approx(1.0, abs=1e-12)


def test_unreachable_perplexity_reports_the_row():
    D = np.ones((4, 4)) - np.eye(4)
    with pytest.raises(EmbeddingError, match="row 1"):
        conditional_affinities(D[1], 2.0, 1)
    with pytest.raises(EmbeddingError):
        conditional_affinities(D[1], 5.0, 1)


def test_symmetrize():
    C = np.array([[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]])
    np.testing.assert_allclose(symmetrize(C), C / 3)

    C = np.array([[0.0, 0.9, 0.1], [0.2, 0.0, 0.8], [0.6, 0.4, 0.0]])
    P = symmetrize(C)
    # hand arithmetic: (0.9 + 0.2)/6, (0.1 + 0.6)/6, (0.8 + 0.4)/6
    np.testing.assert_allclose(P[0, 1], 1.1 / 6, atol=1e-15)
    np.testing.assert_allclose(P[0, 2], 0.7 / 6, atol=1e-15)
    np.testing.assert_allclose(P[1, 2], 1.2 / 6, atol=1e-15)
    assert P.sum() == pytest.approx(1.0, abs=1e-12)


def test_kl_divergence():
    P = np.array([[0, 0.2, 0.1], [0.2, 0, 0.2], [0.1, 0.2, 0]])
    assert kl_divergence(P, P) == 0.0
    Q = np.array([[0, 0.1, 0.2], [0.1, 0, 0.2], [0.2, 0.1, 0]])
    # off-diagonal terms: +0.2, -0.1, +0.2, 0, -0.1, +0.2 (times ln 2)
    expected = 0.4 * math.log(2)
    assert kl_divergence(P, Q) == pytest.approx(expected, abs=1e-9)
    assert kl_divergence(P, Q) == pytest.approx(oracles.kl(P.tolist(), Q.tolist()), abs=1e-12)

    rng = np.random.default_rng(0)
    for _ in range(20):
        A, B = rng.random((5, 5)), rng.random((5, 5))
        for M in (A, B):
            np.fill_diagonal(M, 0)
            M /= M.sum()
        assert kl_divergence(A, B) >= 0


@pytest.mark.parametrize("n", [5, 6])
def test_gradient_matches_finite_differences(n):
    rng = np.random.default_rng(n)
    X = rng.normal(size=(n, 4))
    P = symmetrize(conditional_matrix(pairwise_sq_dists(X), 1.5)[0])
    Y = rng.normal(size=(n, 2))
    grad = kl_gradient(P, Y)
    h = 1e-5
    fd = np.zeros_like(Y)
    for i in range(n):
        for k in range(2):
            Yp, Ym = Y.copy(), Y.copy()
            Yp[i, k] += h
            Ym[i, k] -= h
            fd[i, k] = (kl_divergence(P, student_t_kernel(Yp)[1]) - kl_divergence(P, student_t_kernel(Ym)[1])) / (2 * h)
    rel = np.linalg.norm(grad - fd) / np.linalg.norm(fd)
    assert rel < 1e-5


def test_q_matches_oracle():
    Y = np.random.default_rng(2).normal(size=(5, 2))
    np.testing.assert_allclose(student_t_kernel(Y)[1], oracles.q_matrix(Y.tolist()), atol=1e-15)


def test_same_seed_is_bit_identical():
    X, _ = two_clusters(0, per=8)
    config = TsneConfig(seed=42, iterations=300)
    a, b = tsne_embed(X, config), tsne_embed(X, config)
    assert a.points.tobytes() == b.points.tobytes()
    assert a.final_kl == b.final_kl
    c = tsne_embed(X, TsneConfig(seed=43, iterations=300))
    assert c.points.tobytes() != a.points.tobytes()


def test_embedding_properties():
    X, labels = two_clusters(1, per=10)
    emb = tsne_embed(X, TsneConfig(seed=3))
    assert emb.points.shape == (20, 2)
    assert np.all(np.isfinite(emb.points))
    assert emb.final_kl >= 0
    np.testing.assert_allclose(emb.points.mean(axis=0), 0.0, atol=1e-9)
    assert oracles.silhouette(emb.points.tolist(), labels) > 0.5
    assert emb.perplexity == pytest.approx(19 / 3)
    tail = np.diff(emb.kl_history[-101:])
    assert tail.max() <= 1e-6


def test_config_validation():
    with pytest.raises(ValueError):
        TsneConfig(perplexity=0.5)
    with pytest.raises(ValueError):
        TsneConfig(iterations=0)
    with pytest.raises(ValueError):
        TsneConfig(learning_rate=0)
    with pytest.raises(EmbeddingError):
        tsne_embed(np.zeros((3, 2)))
    assert TsneConfig().effective_perplexity(600) == 30.0
    assert TsneConfig().effective_perplexity(10) == 3.0


def test_csv_and_svg_outputs():
    pts = np.array([[0.0, 1.0], [2.0, -1.0], [1.0, 0.0]])
    table = embedding_csv(["a", "b", "centroid:g"], ["g", "g", "g"], pts, [False, False, True])
    lines = table.splitlines()
    assert lines[0] == "id,group,x,y,is_centroid"
    assert lines[3] == "centroid:g,g,1.0,0.0,1"
    svg = scatter_svg(["g", "h", "g"], pts, [False, False, True], title="t <1>")
    assert svg.startswith("<svg") and svg.rstrip().endswith("</svg>")
    assert svg.count('class="centroid"') == 1
    assert svg.count('class="point"') == 2
    assert "t &lt;1&gt;" in svg


def test_silhouette_oracle_agrees_with_sklearn():
    metrics = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(9)
    pts = rng.normal(size=(30, 2))
    labels = [0] * 10 + [1] * 12 + [2] * 8
    pts[10:22] += 3
    assert oracles.silhouette(pts.tolist(), labels) == pytest.approx(metrics.silhouette_score(pts, labels), abs=1e-12)
