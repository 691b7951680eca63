import numpy as np
import pytest

from steklov_lab import graphs


def test_laplacian_values():
    g = graphs.MetricGraph(3, np.array([[0, 1], [1, 2]]), np.array([1.0, 2.0]))
    L = graphs.graph_laplacian(g)
    expected = np.array([[1.0, -1.0, 0.0],
                         [-1.0, 1.5, -0.5],
                         [0.0, -0.5, 0.5]])
    assert np.allclose(L, expected)


def test_k3_unit_spectrum():
    g = graphs.MetricGraph(3, graphs.complete_graph_edges(3), np.ones(3))
    spec = graphs.graph_laplacian_spectrum(g)
    assert np.allclose(spec.eigenvalues, [0.0, 3.0, 3.0])
    # orthonormal in the canonical euclidean structure
    assert np.allclose(spec.eigenvectors.T @ spec.eigenvectors, np.eye(3))


def test_homogeneity():
    rng = np.random.default_rng(3)
    g = graphs.MetricGraph(4, graphs.complete_graph_edges(4),
                           rng.uniform(0.5, 3.0, 6))
    base = graphs.graph_laplacian_spectrum(g).eigenvalues
    scaled = graphs.graph_laplacian_spectrum(
        graphs.MetricGraph(4, g.edges, g.lengths / 2.0)).eigenvalues
    assert np.allclose(scaled, 2.0 * base, rtol=1e-13, atol=1e-13)


def test_graph_validation():
    with pytest.raises(graphs.GraphError):
        graphs.MetricGraph(2, np.array([[0, 0]]), np.array([1.0]))  # loop
    with pytest.raises(graphs.GraphError):
        graphs.MetricGraph(2, np.array([[0, 1], [1, 0]]), np.ones(2))  # multi
    with pytest.raises(graphs.GraphError):
        graphs.MetricGraph(2, np.array([[0, 1]]), np.array([-1.0]))
    with pytest.raises(graphs.GraphError):
        graphs.MetricGraph(2, np.array([[0, 2]]), np.array([1.0]))


def test_disconnected_detection():
    g = graphs.MetricGraph(4, np.array([[0, 1], [2, 3]]), np.ones(2))
    with pytest.raises(graphs.GraphError):
        graphs.graph_laplacian_spectrum(g)


def test_weight_jacobian_matches_finite_differences():
    rng = np.random.default_rng(5)
    edges = graphs.complete_graph_edges(4)
    w = rng.uniform(0.5, 2.0, edges.shape[0])
    lam, jac = graphs.eigenvalues_and_weight_jacobian(4, edges, w)
    h = 1e-6
    for i in range(edges.shape[0]):
        wp = w.copy()
        wp[i] += h
        wm = w.copy()
        wm[i] -= h
        lp, _ = graphs.eigenvalues_and_weight_jacobian(4, edges, wp)
        lm, _ = graphs.eigenvalues_and_weight_jacobian(4, edges, wm)
        fd = (lp - lm) / (2 * h)
        assert np.allclose(jac[:, i], fd, atol=1e-5)


def test_prescribe_single_target():
    g = graphs.prescribe_spectrum([2.5])
    spec = graphs.graph_laplacian_spectrum(g).eigenvalues
    assert np.allclose(spec, [0.0, 2.5])


def test_prescribe_triple_one():
    g = graphs.prescribe_spectrum([1.0, 1.0, 1.0])
    spec = graphs.graph_laplacian_spectrum(g).eigenvalues
    assert np.allclose(spec, [0.0, 1.0, 1.0, 1.0], atol=1e-9)
    assert np.allclose(g.lengths, 4.0, atol=1e-6)


def test_prescribe_random_targets():
    rng = np.random.default_rng(12)
    for _ in range(5):
        n = int(rng.integers(2, 6))
        targets = np.sort(rng.uniform(0.5, 5.0, n))
        g = graphs.prescribe_spectrum(targets)
        got = graphs.graph_laplacian_spectrum(g).eigenvalues[1:]
        assert np.max(np.abs(got - targets) / targets) <= 1e-8


def test_prescribe_rejects_bad_targets():
    with pytest.raises(graphs.GraphError):
        graphs.prescribe_spectrum([2.0, 1.0])
    with pytest.raises(graphs.GraphError):
        graphs.prescribe_spectrum([-1.0])


def test_stability_probe():
    g = graphs.prescribe_spectrum([1.0, 1.0, 1.0])
    probe = graphs.stability_probe(g, 1, n_perturbations=10, magnitude=1e-3,
                                   seed=4)
    assert probe["cluster_size"] == 3
    assert probe["max_spread"] < 0.05
    # the triple eigenvalue is recoverable inside the perturbation ball
    assert probe["restored_fraction"] == 1.0


def test_graph_roundtrip(tmp_path):
    g = graphs.MetricGraph(3, graphs.complete_graph_edges(3),
                           np.array([1.0, 2.0, np.pi]))
    path = tmp_path / "g.graph"
    graphs.save_graph(g, str(path))
    back = graphs.load_graph(str(path))
    assert back.n_vertices == 3
    assert np.array_equal(back.edges, g.edges)
    assert np.array_equal(back.lengths, g.lengths)  # 17 significant digits
