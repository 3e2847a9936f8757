from decimal import Decimal

import pytest

import pcnsim


def test_motivating_example_fees(scenario):
    s = scenario("motivating.json")
    fcfs = [o["fee"] for o in pcnsim.process(s, [0, 1, 2])]
    assert fcfs == [Decimal("10"), Decimal("0"), Decimal("5")]
    reordered = pcnsim.process(s, [2, 1, 0])
    assert [o["fee"] for o in reordered] == [Decimal("2"), Decimal("1.5"), Decimal("0")]
    assert reordered[0]["path"] == ["E", "C", "D"]


def test_cheapest_path_reports_hops(scenario):
    out = pcnsim.cheapest_path(scenario("motivating.json"), "E", "D", "2")
    assert out["in_pcn"]
    assert out["path"][0] == "E" and out["path"][-1] == "D"
    assert out["forwarded"][0][2] == Decimal("2") + out["fee"]
    assert out["forwarded"][-1][2] == Decimal("2")


def test_worked_instance(scenario):
    r = pcnsim.ptp(scenario("worked_instance.json"))
    assert r["processing_order"] == [2, 1, 0, 3]
    assert r["worth"] == Decimal("10.08")
    assert r["fee_reduction"] == pytest.approx(0.72)
    assert r["success_rate_increase"] == pytest.approx(0.25)
    assert r["shapley"] == pytest.approx({0: 5.04, 1: 4.64, 2: 0.4, 3: 0.0})


def test_subset_worth_and_shares(scenario):
    s = scenario("worked_instance.json")
    w = pcnsim.worth(s, [0, 2])
    assert w["worth"] == Decimal("1.2")
    assert w["nonmember_benefits"][1] == Decimal("-0.8")
    assert pcnsim.shapley(s, [1, 2]) == pytest.approx({1: 0.2, 2: 0.2})


def test_guard_changes_free_rider_outcome(scenario):
    s = scenario("free_rider.json")
    guarded = pcnsim.ptp(s, guard=True, shapley=False)
    unguarded = pcnsim.ptp(s, guard=False, shapley=False)
    assert guarded["coalition_total_fee"] >= unguarded["coalition_total_fee"]


def test_generated_scenarios_are_reproducible():
    a = pcnsim.Scenario.generate(nodes=8, pairs=12, txs=3, seed=7)
    b = pcnsim.Scenario.generate(nodes=8, pairs=12, txs=3, seed=7)
    assert a.to_json() == b.to_json()
    assert len(a.transactions()) == 3
    again = pcnsim.Scenario.from_json(a.to_json())
    assert again.to_json() == a.to_json()


def test_infeasible_config_raises():
    with pytest.raises(pcnsim.Error):
        pcnsim.Scenario.generate(nodes=4, pairs=7)


def test_unknown_node_raises(scenario):
    with pytest.raises(pcnsim.Error):
        pcnsim.cheapest_path(scenario("motivating.json"), "E", "Z", 1)


def test_wait_cdf_is_a_cdf():
    t = [0.0, 0.5, 1.0, 2.0, 5.0]
    cdf = pcnsim.wait_cdf(1, 2, 2, 10, 9, t)
    assert all(0.0 <= p <= 1.0 for p in cdf)
    assert cdf == sorted(cdf)
    assert pcnsim.expected_wait(1, 2, 2, 10, 9) == pytest.approx(0.5)
    assert pcnsim.expected_wait(1, 2, 2, 5, 9) == 0.0


def test_monte_carlo_runs():
    mc = pcnsim.mc_wait_cdf(1, 2, 2, 10, 9, [0.0, 1.0, 5.0], runs=2000, seed=3)
    assert mc["cdf"] == sorted(mc["cdf"])
    assert mc["mean"] > 0.0


def test_sweep_summary():
    rows = pcnsim.sweep("txs", [2, 4], replications=2, batches=3)
    assert [r["axis_value"] for r in rows] == [2.0, 4.0]
    assert all(r["rows"] == 6 for r in rows)
    with pytest.raises(pcnsim.Error):
        pcnsim.sweep("colour", [1])


def test_cli_in_process(scenario, tmp_path):
    from conftest import SCENARIOS

    code, out, _ = pcnsim.cli(["ptp", "--scenario", str(SCENARIOS / "worked_instance.json")])
    assert code == 0
    assert "fee reduction: 72%" in out
    code, _, err = pcnsim.cli(["route", "--scenario", str(tmp_path / "missing.json")])
    assert code != 0 and err
