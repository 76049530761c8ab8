import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tradequil import (
    InconsistentSets,
    ZeroSupply,
    country_demand_shares,
    country_supply_shares,
    goods_demand_shares,
    goods_supply_shares,
    load_fixture,
    share_dynamics,
    share_report,
    trade_balances,
)
from tradequil.analytics import caption_share_report, merge_reports

from conftest import instances


def caption_shares(name):
    return caption_share_report(load_fixture(name)).to_dict()


class TestShares:
    def test_country_supply(self):
        assert country_supply_shares([[1.0], [2.0]]).tolist() == [1.0]
        assert country_supply_shares([[1.0, 1.0], [0.0, 2.0]]).tolist() == [0.25, 0.75]

    def test_country_demand(self):
        assert country_demand_shares([[5.0]]).tolist() == [1.0]
        assert country_demand_shares([[1.0, 2.0], [1.0, 0.0]]).tolist() == [0.5, 0.5]

    def test_goods(self):
        assert goods_demand_shares([[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]).tolist() == [0.25, 0.25, 0.5]
        assert goods_supply_shares([[1.0, 2.0], [1.0, 0.0]]).tolist() == [0.75, 0.25]
        assert goods_supply_shares([[3.0, 4.0]]).tolist() == [1.0]

    def test_zero_total(self):
        with pytest.raises(ZeroSupply):
            country_supply_shares(np.zeros((2, 2)))

    @pytest.mark.parametrize(
        "name, expected",
        [
            ("fig1_2020", {"China": 0.28, "United States": 0.169, "Germany": 0.16}),
            ("fig4_2020", {"United States": 0.335, "China": 0.152, "Germany": 0.122}),
        ],
    )
    def test_country_caption_fixtures(self, name, expected):
        kind = "country_supply_shares" if name == "fig1_2020" else "country_demand_shares"
        got = caption_shares(name)[kind]
        for label, value in expected.items():
            assert got[label] == pytest.approx(value, abs=1e-3)

    def test_goods_caption_fixtures(self):
        demand = caption_shares("fig7_2020")["goods_demand_shares"]
        assert demand["MachElec"] == pytest.approx(0.304, abs=1e-3)
        assert demand["Transport"] == pytest.approx(0.128, abs=1e-3)
        assert demand["Chemicals"] == pytest.approx(0.112, abs=1e-3)
        supply = caption_shares("fig10_2020")["goods_supply_shares"]
        assert supply["Transport"] == pytest.approx(0.141, abs=1e-3)
        assert supply["MachElec"] == pytest.approx(0.283, abs=1e-3)
        assert supply["TextCloth"] == pytest.approx(0.051, abs=1e-3)

    @given(instances(), st.floats(1e-3, 1e6))
    @settings(max_examples=200)
    def test_sum_to_one_and_scale_invariant(self, inst, t):
        C, B = inst
        rep = share_report(C, B)
        for _, _, v in rep.vectors():
            assert v.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.all(v >= 0)
        scaled = share_report(t * C, t * B)
        for (_, _, a), (_, _, b) in zip(rep.vectors(), scaled.vectors()):
            np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-15)


class TestBalances:
    def test_ideal(self, ideal_2x2):
        assert trade_balances(*ideal_2x2, [1, 1]).tolist() == [0, 0]

    def test_surplus_deficit(self):
        B = np.array([[3.0, 1.0]])
        C = np.array([[1.0, 3.0]])
        assert trade_balances(C, B, [1.0]).tolist() == [2, -2]

    @given(instances())
    def test_sum_identity(self, inst):
        C, B = inst
        bal = trade_balances(C, B, np.ones(C.shape[0]))
        assert bal.sum() == pytest.approx((B.sum(axis=1) - C.sum(axis=1)).sum(), abs=1e-9)


class TestDynamics:
    def test_china_supply(self):
        reports = [caption_share_report(load_fixture(n)) for n in ("fig1_2020", "fig2_2021", "fig3_2022")]
        dyn = share_dynamics(reports)
        assert dyn.delta("country_supply_share", "China", 0) == pytest.approx(0.011, abs=2e-3)
        assert dyn.delta("country_supply_share", "China", 1) == pytest.approx(-0.010, abs=2e-3)

    def test_china_demand(self):
        reports = [caption_share_report(load_fixture(n)) for n in ("fig5_2021", "fig6_2022")]
        dyn = share_dynamics(reports)
        assert dyn.delta("country_demand_share", "China") == pytest.approx(-0.021, abs=2e-3)

    def test_identical_reports(self):
        C = np.array([[1.0, 2.0], [3.0, 4.0]])
        rep = share_report(C, C, 2020)
        dyn = share_dynamics([rep, rep])
        for arr in dyn.deltas.values():
            assert np.all(arr == 0)

    @given(instances(max_goods=4, max_countries=4), instances(max_goods=4, max_countries=4))
    def test_deltas_sum_to_zero(self, a, b):
        n = min(a[0].shape[0], b[0].shape[0])
        M = min(a[0].shape[1], b[0].shape[1])
        reps = [share_report(C[:n, :M] + 1, B[:n, :M] + 1, y) for y, (C, B) in enumerate((a, b))]
        for arr in share_dynamics(reps).deltas.values():
            assert abs(arr.sum()) <= 1e-9

    def test_inconsistent_sets(self):
        a = share_report(np.ones((2, 2)), np.ones((2, 2)), 2020, ["A", "B"])
        b = share_report(np.ones((2, 2)), np.ones((2, 2)), 2021, ["A", "C"])
        with pytest.raises(InconsistentSets):
            share_dynamics([a, b])

    def test_needs_two(self):
        with pytest.raises(ValueError):
            share_dynamics([share_report(np.ones((1, 1)), np.ones((1, 1)))])

    def test_merge_caption_reports(self):
        parts = [caption_share_report(load_fixture(n)) for n in ("fig1_2020", "fig4_2020", "fig7_2020", "fig10_2020")]
        merged = merge_reports(parts)
        assert len(list(merged.vectors())) == 4
        with pytest.raises(InconsistentSets):
            merge_reports([parts[0], caption_share_report(load_fixture("fig2_2021"))])
