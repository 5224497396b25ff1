import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hcim import costmodel as cm
from hcim.dcim import EventCounters

COST = cm.default_cost_table()


def per_column(sparsity, steps=4, columns=128):
    return cm.dcim_energy(cm.dcim_counters(steps, columns, sparsity), COST.dcim) / columns


def test_builtin_entries():
    want = {
        "sar7": (4.1, 1.52, 0.004),
        "sar6": (0.59, 0.15, 0.027),
        "flash4": (1.86, 0.05, 0.003),
        "dcim_A": (0.22, 0.06, 0.009),
        "dcim_B": (0.22, 0.1, 0.005),
    }
    for name, vals in want.items():
        e = COST[name]
        assert (e.energy_pj, e.latency_ns, e.area_mm2) == vals
        assert not e.user_supplied
    assert set(COST.user_supplied) == {"crossbar_mvm", "comparator", "shift_add", "adder_tree", "ps_move"}


def test_calibration_invariant():
    assert COST.reference_steps * COST.dcim.per_column_op_pj == pytest.approx(COST["dcim_A"].energy_pj)


def test_dcim_energy_examples():
    assert per_column(0.0) == pytest.approx(0.22)
    assert per_column(0.5) == pytest.approx(0.1672)
    assert per_column(1.0) == pytest.approx(0.1144)
    assert 1 - per_column(0.5) / per_column(0.0) == pytest.approx(0.24)


@given(st.floats(0, 1), st.floats(0, 1))
def test_dcim_energy_monotone(a, b):
    lo, hi = sorted((a, b))
    assert per_column(hi) <= per_column(lo) + 1e-12


def test_dcim_energy_ignores_load_and_reset_events():
    c = cm.dcim_counters(4, 8, 0.25)
    extra = c + EventCounters(load_writes=100, reset_stores=50)
    assert cm.dcim_energy(extra, COST.dcim) == cm.dcim_energy(c, COST.dcim)


def test_adc_baseline_examples():
    e, l = cm.adc_baseline_cost(128, 4, COST["sar7"])
    assert (e, l) == (pytest.approx(2099.2), pytest.approx(778.24))
    e, l = cm.adc_baseline_cost(128, 4, COST["flash4"])
    assert (e, l) == (pytest.approx(952.32), pytest.approx(25.6))
    assert cm.adc_baseline_cost(128, 0, COST["sar7"]) == (0, 0)
    assert cm.adc_baseline_cost(128, 4, COST["sar7"], sharing=2)[1] == pytest.approx(389.12)
    with pytest.raises(ValueError):
        cm.adc_baseline_cost(1, 1, COST["sar7"], sharing=0)


def test_per_conversion_splits_macro_figure():
    conv = cm.per_conversion(COST["sar7"], 4)
    e, _ = cm.adc_baseline_cost(1, 4, conv)
    assert e == pytest.approx(4.1)


def test_derived_metrics_and_normalize():
    assert cm.derived_metrics(2, 3, 4) == {"latency_area": 12, "edap": 24}
    assert cm.normalize({"a": 10, "b": 5}, "b") == {"a": 2.0, "b": 1.0}
    with pytest.raises(ZeroDivisionError):
        cm.normalize({"a": 1, "b": 0}, "b")
    assert COST["flash4"].energy_pj / COST["dcim_A"].energy_pj == pytest.approx(8.4545, rel=1e-4)


@given(st.dictionaries(st.text(min_size=1, max_size=4), st.floats(0.01, 1e6), min_size=1), st.floats(0.01, 100))
def test_normalize_scale_equivariant(values, k):
    ref = next(iter(values))
    n1 = cm.normalize(values, ref)
    n2 = cm.normalize({a: v * k for a, v in values.items()}, ref)
    for a in values:
        assert n1[a] == pytest.approx(n2[a])
        assert n1[a] * values[ref] == pytest.approx(values[a])


def test_ratio_ordering():
    assert COST["dcim_A"].energy_pj < COST["flash4"].energy_pj < COST["sar7"].energy_pj
    assert COST["sar6"].latency_ns > COST["flash4"].latency_ns


def _report():
    rep = cm.RunReport("w", "m")
    for name, e in (("l1", 1.5), ("l2", 2.25)):
        lr = cm.LayerReport(name)
        lr.charge("a", e, 2 * e, 0.1)
        lr.charge("b", 3 * e, 0, 0.2)
        rep.layers.append(lr)
    return rep


def test_report_totals_and_csv():
    rep = _report()
    assert rep.energy_pj == pytest.approx(4 * 3.75)
    text = rep.to_csv()
    lines = text.splitlines()
    assert lines[0] == ",".join(cm.CSV_COLUMNS)
    assert lines[-2].startswith("TOTAL,a,")
    assert cm.verify_report_csv(text) == []
    assert cm.verify_report_csv(text.replace("TOTAL,a,3.75", "TOTAL,a,3.8"))


def test_cost_table_errors(tmp_path):
    doc = COST.to_dict()
    assert cm.parse_cost_table(doc).entries == COST.entries
    bad = tmp_path / "c.json"
    bad.write_text('{"schema": "hcim-cost-table/1",\n "entries": [}')
    with pytest.raises(cm.CostTableError, match="line 2"):
        cm.load_cost_table(bad)
    doc["entries"][0]["energy_pj"] = -1
    with pytest.raises(cm.CostTableError, match="non-negative"):
        cm.parse_cost_table(doc)
    with pytest.raises(cm.CostTableError, match="unknown cost entry 'nope'"):
        COST["nope"]
    with pytest.raises(cm.CostTableError, match="schema"):
        cm.parse_cost_table({"schema": "x"})
    path = tmp_path / "ok.json"
    path.write_text(json.dumps(COST.to_dict()))
    assert cm.load_cost_table(path).entries == COST.entries
