import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hcim import costmodel as cm
from hcim import mapper
from hcim.dcim import inject_fault
from hcim.quantkit import PROFILES, PSQMode, QuantScheme

CIFAR = PROFILES["cifar"]
COST = cm.default_cost_table()
WORKLOADS = mapper.bundled_workloads()


def test_bundled_workloads_present():
    assert set(WORKLOADS) == {"resnet20", "resnet32", "resnet44", "wide_resnet20", "vgg9", "vgg11"}
    for name in WORKLOADS:
        assert mapper.load_bundled(name).compute_layers


def test_layer_shapes():
    conv = mapper.LayerSpec("c", "conv", 16, 32, kernel=3, input_h=32, input_w=32, stride=2, padding=1)
    assert (conv.mvm_rows, conv.mvm_cols, conv.output_h, conv.mvm_count) == (144, 32, 16, 256)
    fc = mapper.LayerSpec("f", "fc", 64, 10)
    assert (fc.mvm_rows, fc.mvm_cols, fc.mvm_count) == (64, 10, 1)
    with pytest.raises(ValueError):
        mapper.LayerSpec("x", "conv", 0, 3)


def test_plan_examples():
    fc = mapper.LayerSpec("f", "fc", 128, 32)
    assert mapper.plan(fc, CIFAR, 128, 128).tiles[0].sf_count == 512
    fc64 = mapper.LayerSpec("f", "fc", 64, 16)
    assert mapper.plan(fc64, CIFAR, 64, 64).tiles[0].sf_count == 256
    conv = mapper.LayerSpec("c", "conv", 16, 16, kernel=3, input_h=32, input_w=32, padding=1)
    tp = mapper.plan(conv, CIFAR, 128, 128)
    assert (tp.row_tiles, tp.col_tiles) == (2, 1)
    assert [t.physical_columns for t in tp.tiles] == [64, 64]


@settings(max_examples=200, deadline=None)
@given(
    st.integers(1, 600), st.integers(1, 300), st.sampled_from([64, 128, 256]),
    st.sampled_from([1, 2, 4, 8]), st.integers(1, 4),
)
def test_plan_sf_count_property(rows, cols, size, bs, mult):
    scheme = QuantScheme(input_bits=bs * mult, bit_stream=bs)
    tp = mapper.plan(mapper.LayerSpec("f", "fc", rows, cols), scheme, size, size)
    assert tp.row_tiles == -(-rows // size)
    assert sum(t.logical_cols for t in tp.tiles) == cols * tp.row_tiles
    for t in tp.tiles:
        assert t.physical_columns <= size
        assert t.sf_count == (scheme.input_bits // bs) * t.physical_columns


def test_workload_errors(tmp_path):
    bad = tmp_path / "w.json"
    bad.write_text('{"schema": "hcim-workload/1",\n"layers": [\n{"name": "a",}]}')
    with pytest.raises(mapper.WorkloadError, match="line 3"):
        mapper.load_workload(bad)
    with pytest.raises(mapper.WorkloadError, match="unknown fields"):
        mapper.parse_workload({"schema": "hcim-workload/1", "layers": [{"kind": "fc", "foo": 1}]})
    with pytest.raises(mapper.WorkloadError, match="schema"):
        mapper.parse_workload({"layers": []})


# -- functional path ------------------------------------------------------------


def test_one_layer_toy():
    rng = np.random.default_rng(0)
    layer = [mapper.LayerSpec("fc", "fc", 4, 4)]
    W = [rng.integers(-8, 8, (4, 4))]
    x = rng.integers(0, 16, (2, 4))
    for mode in PSQMode:
        res = mapper.run_functional(layer, W, x, CIFAR.with_mode(mode))
        assert res.telemetry[0].tiles_checked == 1
        assert res.outputs[0].shape == (2, 4)


def test_zero_input_network_is_fully_sparse():
    layers = mapper.toy_mlp((20, 12, 6))
    weights, _ = mapper.random_network(layers, CIFAR, np.random.default_rng(1))
    res = mapper.run_functional(layers, weights, np.zeros((3, 20), dtype=int), CIFAR, alpha=1)
    assert all(not o.any() for o in res.outputs)
    assert res.sparsity == 1.0


@pytest.mark.parametrize("size", [128, 64])
@pytest.mark.parametrize("mode", list(PSQMode))
def test_random_mlp_matches_oracle(size, mode):
    layers = mapper.toy_mlp((200, 70, 40))
    weights, x = mapper.random_network(layers, CIFAR, np.random.default_rng(size), batch=3)
    res = mapper.run_functional(layers, weights, x, CIFAR.with_mode(mode), size, size)
    assert 0.0 <= res.sparsity <= 1.0
    if mode is PSQMode.BINARY:
        assert res.sparsity == 0.0
    assert sum(t.tiles_checked for t in res.telemetry) > len(layers)


def test_conv_layer_matches_oracle():
    layers = [
        mapper.LayerSpec("c1", "conv", 3, 8, kernel=3, input_h=6, input_w=6, padding=1),
        mapper.LayerSpec("c2", "conv", 8, 8, kernel=3, input_h=6, input_w=6, stride=2, padding=1),
    ]
    weights, x = mapper.random_network(layers, CIFAR, np.random.default_rng(4))
    res = mapper.run_functional(layers, weights, x, CIFAR, 64, 64)
    assert res.outputs[1].shape == (9, 8)


@pytest.mark.parametrize("site", ["full_add_bit", "full_sub_bit"])
def test_mismatch_reports_coordinates(site):
    layers = mapper.toy_mlp((60, 8))
    weights, x = mapper.random_network(layers, CIFAR, np.random.default_rng(2), batch=8)
    with inject_fault(site):
        with pytest.raises(mapper.OracleMismatch) as info:
            mapper.run_functional(layers, weights, x, CIFAR)
    e = info.value
    assert e.layer == "fc1" and e.tile == (0, 0)
    assert 0 <= e.step < CIFAR.steps and 0 <= e.column < 32 and 0 <= e.vector < 8
    assert "column=" in str(e) and "step=" in str(e)


def test_measured_sparsity_in_range():
    wl = mapper.Workload("t", tuple(mapper.toy_mlp((100, 50, 10))))
    sp = mapper.measure_sparsity(wl, CIFAR, 128, 128, np.random.default_rng(0))
    assert all(0.0 <= v <= 0.5 for v in sp.values())
    assert set(mapper.measure_sparsity(wl, CIFAR.with_mode(PSQMode.BINARY), 128, 128, np.random.default_rng(0)).values()) == {0.0}


# -- estimation -----------------------------------------------------------------


def single_crossbar():
    return mapper.Workload("one", (mapper.LayerSpec("fc", "fc", 128, 32),))


def test_estimate_sparsity_reduction():
    wl = single_crossbar()
    e0 = mapper.estimate(wl, CIFAR, "hcim_ternary", COST, sparsity=0.0).components()["dcim"].energy_pj
    e5 = mapper.estimate(wl, CIFAR, "hcim_ternary", COST, sparsity=0.5).components()["dcim"].energy_pj
    assert e0 == pytest.approx(128 * 0.22)
    assert 1 - e5 / e0 == pytest.approx(0.24)


def test_estimate_adc_vs_dcim_per_column():
    wl = single_crossbar()
    dc = mapper.estimate(wl, CIFAR, "hcim_ternary", COST, sparsity=0.0).components()["dcim"].energy_pj
    adc = mapper.estimate(wl, CIFAR, "adc7", COST).components()["sar7"].energy_pj
    assert adc / dc == pytest.approx(4.1 / 0.22)


def test_estimate_empty_workload():
    rep = mapper.estimate(mapper.Workload("empty", ()), CIFAR, "hcim_ternary", COST)
    assert (rep.energy_pj, rep.latency_ns, rep.area_mm2) == (0, 0, 0)


def test_estimate_unknown_entry():
    entries = {k: v for k, v in COST.entries.items() if k != "comparator"}
    cost = cm.CostTable(entries, COST.dcim)
    with pytest.raises(cm.CostTableError, match="comparator"):
        mapper.estimate(single_crossbar(), CIFAR, "hcim_ternary", cost)
    with pytest.raises(cm.CostTableError, match="adc_bits=5"):
        mapper.estimate(single_crossbar(), CIFAR, "adc5", COST)


def test_parse_mode():
    assert mapper.parse_mode("adc_baseline(7)").name == "adc7"
    assert mapper.parse_mode("hcim_binary").psq is PSQMode.BINARY
    with pytest.raises(ValueError):
        mapper.parse_mode("analog")


@pytest.mark.parametrize("name", WORKLOADS)
def test_workload_invariants(name):
    wl = mapper.load_bundled(name)
    a, b = mapper.HARDWARE_PRESETS["A"], mapper.HARDWARE_PRESETS["B"]
    m128 = mapper.estimate(wl, CIFAR, "hcim_ternary", COST, a).movement_events
    m64 = mapper.estimate(wl, CIFAR, "hcim_ternary", COST, b).movement_events
    assert m64 >= m128
    reps = [mapper.estimate(wl, CIFAR, "hcim_ternary", COST, a, f) for f in (0.0, 0.3, 0.6, 1.0)]
    assert len({r.latency_ns for r in reps}) == 1
    energies = [r.energy_pj for r in reps]
    assert energies == sorted(energies, reverse=True)
    for r in reps:
        assert cm.verify_report_csv(r.to_csv()) == []


def test_workload_file_round_trip(tmp_path):
    doc = {"schema": "hcim-workload/1", "name": "tiny", "layers": [
        {"name": "c", "kind": "conv", "in_channels": 3, "out_channels": 4, "kernel": 3, "input_h": 8, "input_w": 8, "padding": 1},
        {"name": "p", "kind": "pool", "in_channels": 4, "out_channels": 4},
        {"name": "f", "kind": "fc", "in_channels": 256, "out_channels": 10},
    ]}
    path = tmp_path / "tiny.json"
    path.write_text(json.dumps(doc))
    wl = mapper.load_workload(path)
    assert [l.name for l in wl.compute_layers] == ["c", "f"]
    assert mapper.resolve_workload(str(path)) == wl
