"""Smoke tests for the python binding surface."""

import json
import math

import numpy as np
import pytest

import toponet


def test_generate_and_invariants():
    data = toponet.generate("annulus", points_per_class=80, seed=3)
    assert len(data) == 160
    assert data.num_classes == 2
    assert data.points.shape == (160, 2)
    assert data.min_interclass_distance() > 0

    again = toponet.generate("annulus", points_per_class=80, seed=3)
    assert np.array_equal(data.points, again.points)

    with pytest.raises(ValueError):
        toponet.generate("annulus", points_per_class=0, seed=1)


def test_urysohn_values():
    a = np.array([[0.0]])
    b = np.array([[1.0]])
    f = toponet.urysohn_pair(a, b)
    assert f(np.array([0.0])) == 0.0
    assert f(np.array([1.0])) == 1.0
    assert abs(f(np.array([0.5])) - 0.5) < 1e-15

    g = toponet.urysohn_multiclass([np.array([[0.0]]), np.array([[5.0]]), np.array([[10.0]])])
    assert [g(np.array([v])) for v in (0.0, 5.0, 10.0)] == [1.0, 2.0, 3.0]


def test_kernel_collision_witness_and_forward():
    w = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
    witness = toponet.kernel_collision_witness(w)
    assert witness.residual <= 1e-9
    assert abs(np.linalg.norm(witness.p1) - 0.5) < 1e-12
    assert abs(np.linalg.norm(witness.p2) - 1.5) < 1e-12
    assert abs(abs(witness.null_direction[2]) - 1.0) < 1e-12

    # witness for the net's own bottleneck layer collides downstream
    net = toponet.initialize_network([(3, 2, "relu"), (2, 2, "softmax")], seed=4)
    own = toponet.kernel_collision_witness(net.weights(0))
    out1 = toponet.forward(net, own.p1)
    out2 = toponet.forward(net, own.p2)
    assert np.linalg.norm(out1 - out2) <= 1e-9
    assert abs(out1.sum() - 1.0) <= 1e-12


def test_train_trace_moves_verdict():
    data = toponet.generate("ball_shell", points_per_class=60, seed=5)
    layers = [(3, 6, "relu"), (6, 2, "softmax")]
    result = toponet.train(layers, data, seed=5, epochs=300, step_size=0.02)
    assert 0.0 <= result.final_accuracy <= 1.0
    assert len(result.loss_history) == 300
    assert result.loss_history[-1] < result.loss_history[0]

    trace = toponet.trace_activations(result.net, data)
    assert [c.shape[1] for c in trace.clouds] == [3, 6, 2]

    reports = toponet.move_reports(result.net, trace)
    assert reports[0].linear.rank <= 6
    assert reports[0].activation == "relu"

    verdict = toponet.separation_verdict(result.net, data)
    assert verdict.accuracy == result.final_accuracy


def test_simplex_ops():
    p = toponet.softmax_map(np.array([math.log(2.0), 0.0]))
    assert abs(p[0] - 2.0 / 3.0) < 1e-14
    index, tie, margin = toponet.voronoi_cell_of(np.array([0.7, 0.2, 0.1]))
    assert index == 0 and not tie and margin > 0.4
    _, tie, _ = toponet.voronoi_cell_of(np.array([1 / 3, 1 / 3, 1 / 3]))
    assert tie


def test_embedding_ops():
    t = np.linspace(0, 2 * np.pi, 120, endpoint=False)
    plane = np.stack([np.cos(t), np.sin(t)], axis=1)
    basis = np.array([[1 / np.sqrt(2), 1 / np.sqrt(2), 0.0],
                      [-1 / np.sqrt(6), 1 / np.sqrt(6), 2 / np.sqrt(6)]])
    result = toponet.isomap(plane @ basis, 10, 2)
    assert result.coords.shape == (120, 2)
    assert result.residual_variance <= 0.05

    two = np.vstack([np.zeros((5, 2)), 10 + np.zeros((5, 2))])
    assert toponet.epsilon_components(two, 1.0).count == 2


def test_run_experiment(tmp_path):
    config = {
        "dataset": {"kind": "annulus", "points_per_class": 40, "seed": 2},
        "network": {"layers": [
            {"in": 2, "out": 4, "activation": "relu"},
            {"in": 4, "out": 2, "activation": "softmax"},
        ]},
        "train": {"seed": 2, "epochs": 20, "step_size": 0.01},
        "analyses": {"isomap": {"enabled": False}},
    }
    summary = toponet.run_experiment(json.dumps(config), str(tmp_path / "run"))
    report = json.loads((tmp_path / "run" / "report.json").read_text())
    assert report["training"]["final_accuracy"] == summary.final_accuracy
    assert (tmp_path / "run" / "dataset.csv").exists()
    assert len(report["moves"]["layers"]) == 2

    with pytest.raises(ValueError):
        toponet.run_experiment("{\"oops\": 1}", str(tmp_path / "bad"))
