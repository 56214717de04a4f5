"""End-to-end smoke tests for the Python bindings."""

import math

import pytest

import spamforge as sf


@pytest.fixture(scope="module")
def small_graph():
    p = sf.ModelParams()
    p.volume = 2000.0
    p.seed = 42
    cloud = sf.sample_points(p, "points")
    oracle = sf.MarkOracle(sf.stream_seed(p.seed, "marks"))
    phi = sf.ProfileFunction.power(p.delta)
    f = sf.AttachmentRule.affine(p.gamma, p.gamma_prime)
    graph = sf.build_accelerated(cloud, oracle, phi, f)
    return p, cloud, oracle, phi, f, graph


def test_regime_report():
    p = sf.ModelParams()
    rep = sf.regime_report(p)
    assert rep.robust
    assert rep.rho == pytest.approx(1.0 / math.log(10.0 / 3.0))


def test_profile_and_attachment():
    phi = sf.ProfileFunction.power(2.0)
    assert phi.kappa == pytest.approx(0.0625)
    assert phi.eval(0.5) == pytest.approx(0.25)
    f = sf.AttachmentRule.affine(0.8, 1.0)
    assert f.eval(5) == pytest.approx(5.0)


def test_builders_agree(small_graph):
    p, cloud, oracle, phi, f, graph = small_graph
    exact = sf.build_exact(cloud, oracle, phi, f)
    assert exact.edge_pairs() == graph.edge_pairs()
    assert graph.edge_count() > 0


def test_graph_queries(small_graph):
    _, cloud, _, _, _, graph = small_graph
    assert graph.vertex_count() == len(cloud)
    idx = sf.components(graph)
    assert idx.oldest_component_size > 0
    stats = sf.typical_distance_sample(graph, 20, "pairs")
    assert len(stats.samples) == 20
    assert stats.median >= 0


def test_local_structure(small_graph):
    _, _, _, _, _, graph = small_graph
    mu = sf.empirical_indegree(graph, 1.0)
    first_moment = sum(int(key) * w for key, w in mu.weights.items())
    assert first_moment == pytest.approx(graph.edge_count() / 2000.0)
    ball = sf.h_neighbourhood(graph, 0, 1, 1.0, 1 << 20)
    assert ball.vertex_count >= 1


def test_graph_io_roundtrip(tmp_path, small_graph):
    _, _, _, _, _, graph = small_graph
    path = tmp_path / "graph.txt"
    sf.write_graph_file(str(path), graph)
    back = sf.read_graph_file(str(path))
    assert back.edge_pairs() == graph.edge_pairs()


def test_validation_error():
    with pytest.raises(sf.ValidationError):
        sf.run_experiment_config("experiment.kind=nosuchkind\n")


def test_run_experiment(tmp_path):
    sf.run_experiment_config(
        "experiment.kind=build\nmodel.n=500\n",
        [f"output.dir={tmp_path / 'out'}"],
    )
    assert (tmp_path / "out" / "build.csv").exists()
    assert (tmp_path / "out" / "manifest.json").exists()
