"""Smoke tests for the pyvemo extension module.

These only check that the bindings hold together end to end; the real
behavioral coverage lives in the C++ unit and acceptance suites.
"""

import json
import math
import pathlib

import pytest

import pyvemo

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"

TINY = {
    "num_epochs": 3,
    "epoch_duration_s": 1e-4,
    "platforms": [
        {"id": "A", "kind": "aircraft", "position": [0.0, 0.0, 0.0]},
        {"id": "B", "kind": "ground", "position": [200.0, 0.0, 0.0]},
    ],
    "emitters": [],
    "tasks": [
        {"type": "comm", "id": "c1", "src": "A", "dst": "B", "payload_epochs": 1, "priority": 2.0}
    ],
}


@pytest.fixture(scope="module")
def fig4():
    return pyvemo.parse_scenario((DATA / "fig4.scn").read_text())


def test_scenario_round_trip(fig4):
    again = pyvemo.parse_scenario(pyvemo.render_scenario(fig4))
    assert again.platform_ids == fig4.platform_ids
    assert again.num_epochs == fig4.num_epochs
    assert "A1" in fig4.platform_ids
    assert len(fig4.task_ids) > 0


def test_build_validate_utility(fig4):
    sched, unscheduled = pyvemo.build_schedule(fig4, budget=200, seed=7)
    assert pyvemo.validate_schedule(fig4, sched) == []
    report = pyvemo.utility(fig4, sched)
    assert report["total"] > 0
    assert set(report["per_task"]) == set(fig4.task_ids)
    assert isinstance(unscheduled, dict)
    assert len(sched) > 0
    table = pyvemo.render_schedule_table(fig4, sched)
    assert all(p in table for p in fig4.platform_ids)


def test_schedule_csv_round_trip(fig4):
    sched, _ = pyvemo.build_schedule(fig4, budget=200, seed=7)
    again = pyvemo.parse_schedule_csv(pyvemo.schedule_to_csv(sched))
    assert again == sched


def test_build_is_deterministic(fig4):
    a, _ = pyvemo.build_schedule(fig4, budget=120, seed=42)
    b, _ = pyvemo.build_schedule(fig4, budget=120, seed=42)
    assert pyvemo.schedule_to_csv(a) == pyvemo.schedule_to_csv(b)


def test_exhaustive_optimal_tiny():
    s = pyvemo.parse_scenario(json.dumps(TINY))
    opt = pyvemo.exhaustive_optimal(s)
    built, _ = pyvemo.build_schedule(s, budget=50, seed=1)
    assert pyvemo.utility(s, opt)["total"] == pytest.approx(2.0)
    assert pyvemo.utility(s, built)["total"] == pytest.approx(2.0)


def test_cap_exceeded_raises(fig4):
    with pytest.raises(pyvemo.CapExceeded):
        pyvemo.exhaustive_optimal(fig4, combo_cap=10)


def test_simulate_json(fig4):
    sched, _ = pyvemo.build_schedule(fig4, budget=200, seed=7)
    text = pyvemo.simulate_json(fig4, sched, seed=7)
    assert text == pyvemo.simulate_json(fig4, sched, seed=7)
    rep = json.loads(text)
    assert rep["schema"] == "vemo.simreport"
    assert rep["version"] == 1
    assert rep["utility"]["total"] == pytest.approx(pyvemo.utility(fig4, sched)["total"])


def test_dissemination_and_outage():
    s = pyvemo.parse_scenario(json.dumps(TINY))
    injected = pyvemo.inject_control_traffic(s, "A")
    sched, _ = pyvemo.build_schedule(injected, budget=50, seed=3)
    diss = pyvemo.check_dissemination(injected, sched, "A")
    assert diss["informed_epoch"]["A"] == -1
    assert isinstance(diss["feasible"], bool)

    out = pyvemo.simulate_outage(s, pyvemo.build_schedule(s, budget=50, seed=1)[0], [])
    assert out["failed"] == []
    assert out["degraded"]["total"] == pytest.approx(out["baseline"]["total"])


def test_metrics_helpers():
    assert pyvemo.q_function(0.0) == pytest.approx(0.5)
    assert pyvemo.ber([0, 1, 1, 0], [0, 1, 0, 0]) == pytest.approx(0.25)
    bits = pyvemo.pn_bits(7, 64)
    assert len(bits) == 64 and set(bits) <= {0, 1}
    tone = [complex(math.cos(0.1 * i), math.sin(0.1 * i)) for i in range(1000)]
    assert pyvemo.papr_db(tone) == pytest.approx(0.0, abs=1e-9)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
