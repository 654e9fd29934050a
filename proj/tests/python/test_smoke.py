import json
import math

import numpy as np
import pytest

import tau2


def test_sparsity_measures():
    assert tau2.norm_l1(np.array([1.0, -2.0, 3.0])) == 6.0
    assert tau2.tau2(np.array([3.0, 4.0])) == pytest.approx(1.96)
    assert np.allclose(tau2.phi_map(np.array([1.0, 1.0])), [2.0, 2.0])
    with pytest.raises(ValueError):
        tau2.tau2(np.zeros(3))


def test_prox_and_projection():
    assert np.allclose(tau2.prox_sq_l1(np.array([3.0]), 1.0), [1.0])
    assert np.allclose(tau2.prox_l1(np.array([3.0, -1.0]), 1.0), [2.0, 0.0])
    b = np.array([1.0, 2.0])
    assert np.allclose(tau2.project_ball(np.array([9.0, 9.0]), b, 0.0), b)


def test_identity_recovery():
    b = np.array([1.5, -2.0, 0.0, 3.0])
    res = tau2.recover(np.eye(4), b, 0.0, tau2.SolverConfig.defaults("gaussian"))
    assert res.status == "Converged"
    assert np.allclose(res.x, b, atol=1e-6)


def test_generated_instance_is_recovered():
    a = tau2.gen_matrix("dct", m=64, n=1024, E=1.0, seed=3)
    x = tau2.gen_signal(1024, 3, D=2.0, min_separation=2, seed=3)
    b, eps = tau2.synthesize_measurements(a, x, seed=3)
    assert eps == 0.0
    res = tau2.recover(a, b, eps, tau2.SolverConfig.defaults("dct"))
    assert tau2.relative_error(res.x, x) < 1e-3
    assert all(k <= 1e-6 for k in res.dinkelbach_trace[1:])


def test_worked_example_values():
    a, b = tau2.worked_example(1)
    assert tau2.alpha_star(a, b) == pytest.approx(121 / 27, abs=1e-9)
    value, attained = tau2.alpha_bar(a, b)
    assert value == pytest.approx(1521 / 581, abs=1e-6) and attained
    f, unbounded = tau2.dinkelbach_function(a, b, 121 / 27)
    assert unbounded and f == -math.inf


def test_spectrum_and_export():
    rep = tau2.verify_H_spectrum(4, 2.0)
    assert rep["passed"]
    assert np.allclose(rep["eigenvalues"], [-4, -4, -4, -4, 0, 0, 0, 8])
    a, b = tau2.worked_example(1)
    qp = tau2.export_qp(a, b, alpha=2.0)
    assert qp["schema"] == "tau2-qp/1"


def test_experiment_and_verify():
    spec = {
        "schema": "tau2-exp/1",
        "matrix": {"family": "gaussian", "m": 24, "n": 80},
        "signal": {"s": [3], "magnitude": "gaussian"},
        "trials": 2,
        "base_seed": 5,
    }
    csv_text, summary = tau2.run_experiment(json.dumps(spec))
    assert len(csv_text.strip().splitlines()) == 3
    assert summary["schema"] == "tau2-summary/1"
    assert all(passed for _, _, passed, _ in tau2.verify("examples"))
