import json

import numpy as np
import pytest

import qlcontrol


def test_catalog_lists_builtins():
    names = qlcontrol.builtin_names()
    assert "gap-family-1d" in names
    assert "gap-family-1d" in qlcontrol.catalog("gap")


def test_helmholtz_matches_closed_form():
    n = 64
    x = np.linspace(0.0, 1.0, n + 1)
    y = qlcontrol.helmholtz_solve(0.0, np.ones(n + 1), dimension=1, cells=n)
    assert np.max(np.abs(y - 0.5 * x * (1.0 - x))) < 1e-12


def test_state_and_cost():
    inst = qlcontrol.Instance("sin-gradient-1d")
    u = np.full(inst.node_count, 0.5)
    y = inst.solve_state(u)
    assert y.shape == (inst.node_count,)
    assert y[0] == 0.0 and y[-1] == 0.0
    assert np.isfinite(inst.evaluate_cost(u))
    assert inst.cost_gradient(u).shape == u.shape


def test_wrong_control_length_is_rejected():
    inst = qlcontrol.Instance("tiny-tracking-1d")
    with pytest.raises(ValueError):
        inst.evaluate_cost(np.zeros(3))


def test_threshold_violation_raises():
    with pytest.raises(ValueError, match="threshold"):
        qlcontrol.Instance("sin-gradient-1d", {"coefficients.kappa": "2", "coefficients.b": "0.5"})


def test_optimizer_descends():
    inst = qlcontrol.Instance("tiny-tracking-1d")
    u0 = np.zeros(inst.node_count)
    out = inst.optimize_control(u0)
    assert out["cost"] <= inst.evaluate_cost(u0)
    assert out["u"].shape == u0.shape


def test_certify_gap_tiny():
    out = qlcontrol.Instance("tiny-tracking-1d").certify_gap(seed=1, sequence=False)
    assert out["passed"]
    assert out["relaxed"] <= out["classical_best"] + 1e-8


def test_run_experiment_is_deterministic():
    text = "[experiment]\nkind = state\ninstance = linear-tracking-1d\n"
    a = qlcontrol.run_experiment(text)
    b = qlcontrol.run_experiment(text)
    assert a["exit_code"] == 0
    assert qlcontrol.strip_wall_time(a["report"]) == qlcontrol.strip_wall_time(b["report"])
    assert json.loads(a["report"])["status"] == "ok"
