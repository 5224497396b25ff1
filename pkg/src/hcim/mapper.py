"""Workload mapping, functional simulation and cost estimation.

Convolutions are lowered im2col style (one matrix-vector product per output
pixel, weight rows ordered channel, kernel-y, kernel-x). Each layer's weight
matrix is cut into crossbar tiles; row tiles are reduced by a digital adder
tree after every tile's DCiM array has finished accumulating.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import costmodel as cm
from .dcim import DcimArray, TimingParams, timing_model
from .quantkit import (
    FixedPoint,
    PSQMode,
    QuantScheme,
    ScaleFactorSet,
    calibrate_alpha,
    choose_exponent,
    combine_slices,
    encode_codes,
    golden_psq_trace,
    ideal_scale_table,
    least_squares_scale,
    quantize_partial_sums,
    quantize_scale_factor,
    requantize,
)
from .xbar import ComparatorBank, column_sums, compare, logical_cols_per_xbar, slice_weights, stream_input

WORKLOAD_SCHEMA = "hcim-workload/1"
TREE_BITS = 32
LAYER_KINDS = ("conv", "fc", "pool")


class WorkloadError(ValueError):
    pass


class OracleMismatch(AssertionError):
    def __init__(self, layer: str, tile: tuple[int, int], column: int, step: int, vector: int, got: int, want: int):
        self.layer, self.tile, self.column, self.step, self.vector = layer, tile, column, step, vector
        super().__init__(
            f"hardware/oracle mismatch at layer={layer} tile={tile} column={column} step={step} "
            f"vector={vector}: hardware {got}, oracle {want}"
        )


# ---------------------------------------------------------------------------
# Layers and workloads
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LayerSpec:
    name: str
    kind: str
    in_channels: int
    out_channels: int
    kernel: int = 1
    input_h: int = 1
    input_w: int = 1
    stride: int = 1
    padding: int = 0

    def __post_init__(self) -> None:
        if self.kind not in LAYER_KINDS:
            raise WorkloadError(f"layer {self.name!r}: kind must be one of {LAYER_KINDS}, got {self.kind!r}")
        for attr in ("in_channels", "out_channels", "kernel", "input_h", "input_w", "stride"):
            if getattr(self, attr) < 1:
                raise WorkloadError(f"layer {self.name!r}: {attr} must be positive")
        if self.padding < 0:
            raise WorkloadError(f"layer {self.name!r}: padding must be non-negative")
        if self.kind == "conv" and (self.output_h < 1 or self.output_w < 1):
            raise WorkloadError(f"layer {self.name!r}: kernel larger than padded input")

    @property
    def output_h(self) -> int:
        if self.kind != "conv":
            return 1
        return (self.input_h + 2 * self.padding - self.kernel) // self.stride + 1

    @property
    def output_w(self) -> int:
        if self.kind != "conv":
            return 1
        return (self.input_w + 2 * self.padding - self.kernel) // self.stride + 1

    @property
    def mvm_rows(self) -> int:
        return self.kernel * self.kernel * self.in_channels if self.kind == "conv" else self.in_channels

    @property
    def mvm_cols(self) -> int:
        return self.out_channels

    @property
    def mvm_count(self) -> int:
        if self.kind == "pool":
            return 0
        return self.output_h * self.output_w if self.kind == "conv" else 1


@dataclass(frozen=True)
class Workload:
    name: str
    layers: tuple[LayerSpec, ...]

    @property
    def compute_layers(self) -> tuple[LayerSpec, ...]:
        return tuple(l for l in self.layers if l.kind != "pool")


def parse_workload(doc: dict, source: str = "<workload>") -> Workload:
    if not isinstance(doc, dict) or doc.get("schema") != WORKLOAD_SCHEMA:
        raise WorkloadError(f"{source}: schema must be {WORKLOAD_SCHEMA!r}")
    layers = []
    fields = set(LayerSpec.__dataclass_fields__)
    for i, rec in enumerate(doc.get("layers", [])):
        unknown = set(rec) - fields
        if unknown:
            raise WorkloadError(f"{source}: layer #{i} has unknown fields {sorted(unknown)}")
        rec = {"name": f"layer{i}", **rec}
        try:
            layers.append(LayerSpec(**rec))
        except TypeError as exc:
            raise WorkloadError(f"{source}: layer #{i}: {exc}") from None
    return Workload(str(doc.get("name", Path(source).stem)), tuple(layers))


def load_workload(path: str | Path) -> Workload:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise WorkloadError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_workload(doc, str(path))


def bundled_workloads() -> list[str]:
    root = resources.files("hcim.data").joinpath("workloads")
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_bundled(name: str) -> Workload:
    res = resources.files("hcim.data").joinpath("workloads", f"{name}.json")
    if not res.is_file():
        raise WorkloadError(f"no bundled workload {name!r}; available: {bundled_workloads()}")
    return parse_workload(json.loads(res.read_text()), f"{name}.json")


def resolve_workload(ref: str) -> Workload:
    """A bundled workload name or a path to a workload file."""
    if ref in bundled_workloads():
        return load_bundled(ref)
    return load_workload(ref)


# ---------------------------------------------------------------------------
# Tiling plan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TileInfo:
    row_tile: int
    col_tile: int
    rows: int
    logical_cols: int
    physical_columns: int
    sf_count: int


@dataclass(frozen=True)
class TilePlan:
    layer: LayerSpec
    xbar_rows: int
    xbar_cols: int
    row_tiles: int
    col_tiles: int
    tiles: tuple[TileInfo, ...]

    @property
    def crossbars(self) -> int:
        return len(self.tiles)

    @property
    def accumulation_depth(self) -> int:
        return self.row_tiles

    @property
    def sf_count(self) -> int:
        return sum(t.sf_count for t in self.tiles)


def scale_factor_count(input_bits: int, bit_stream: int, columns: int) -> int:
    if input_bits % bit_stream:
        raise ValueError("input_bits must be a multiple of bit_stream")
    return input_bits // bit_stream * columns


def plan(layer: LayerSpec, scheme: QuantScheme, xbar_rows: int, xbar_cols: int) -> TilePlan:
    if layer.kind == "pool":
        return TilePlan(layer, xbar_rows, xbar_cols, 0, 0, ())
    try:
        per_xbar = logical_cols_per_xbar(scheme, xbar_cols)
    except ValueError as exc:
        raise WorkloadError(f"layer {layer.name!r}: {exc}") from None
    k = scheme.slices_per_weight
    n_rt = math.ceil(layer.mvm_rows / xbar_rows)
    n_ct = math.ceil(layer.mvm_cols / per_xbar)
    tiles = []
    for rt in range(n_rt):
        rows = min(xbar_rows, layer.mvm_rows - rt * xbar_rows)
        for ct in range(n_ct):
            cols = min(per_xbar, layer.mvm_cols - ct * per_xbar)
            phys = cols * k
            tiles.append(TileInfo(rt, ct, rows, cols, phys, scale_factor_count(scheme.input_bits, scheme.bit_stream, phys)))
    return TilePlan(layer, xbar_rows, xbar_cols, n_rt, n_ct, tuple(tiles))


# ---------------------------------------------------------------------------
# Functional simulation
# ---------------------------------------------------------------------------


def im2col(act: np.ndarray, layer: LayerSpec) -> np.ndarray:
    """(C, H, W) activations -> (out_h * out_w, C * k * k) patch matrix."""
    c, h, w = act.shape
    if (c, h, w) != (layer.in_channels, layer.input_h, layer.input_w):
        raise WorkloadError(f"layer {layer.name!r}: activation shape {act.shape} does not match the layer shape")
    p, k, s = layer.padding, layer.kernel, layer.stride
    padded = np.pad(act, ((0, 0), (p, p), (p, p)))
    out = np.empty((layer.output_h * layer.output_w, c * k * k), dtype=np.int64)
    i = 0
    for oy in range(layer.output_h):
        for ox in range(layer.output_w):
            out[i] = padded[:, oy * s : oy * s + k, ox * s : ox * s + k].ravel()
            i += 1
    return out


@dataclass
class LayerParams:
    """Calibrated hardware parameters of one layer."""

    alpha: int
    scale_factors: dict[tuple[int, int], ScaleFactorSet]
    requant: FixedPoint | None = None


@dataclass
class LayerTelemetry:
    name: str
    codes: int = 0
    zeros: int = 0
    overflow: int = 0
    tiles_checked: int = 0
    counters: dict[str, int] = field(default_factory=dict)

    @property
    def sparsity(self) -> float:
        return self.zeros / self.codes if self.codes else 0.0


@dataclass
class FunctionalResult:
    outputs: list[np.ndarray]
    telemetry: list[LayerTelemetry]
    params: list[LayerParams]

    @property
    def sparsity(self) -> float:
        codes = sum(t.codes for t in self.telemetry)
        return sum(t.zeros for t in self.telemetry) / codes if codes else 0.0


def _tile_column_sums(tile, x_tile: np.ndarray, scheme: QuantScheme) -> np.ndarray:
    """(vectors, steps, physical columns) column sums of one tile."""
    x_tile = np.asarray(x_tile, dtype=np.int64)
    stream_input(x_tile, scheme)  # range check only
    shifts = np.arange(scheme.steps) * scheme.bit_stream
    digits = (x_tile[:, None, :] >> shifts[None, :, None]) & ((1 << scheme.bit_stream) - 1)
    return column_sums(tile, digits)


def calibrate_layer(
    X: np.ndarray,
    W: np.ndarray,
    scheme: QuantScheme,
    xbar_rows: int,
    xbar_cols: int,
    target_zero_fraction: float = 0.5,
    alpha: int | None = None,
) -> LayerParams:
    """Pick alpha and per-tile scale factors for one layer from sample inputs."""
    grid = slice_weights(W, scheme, xbar_rows, xbar_cols)
    sums = {}
    for rt, row in enumerate(grid):
        for ct, tile in enumerate(row):
            x_tile = X[:, tile.row_offset : tile.row_offset + tile.rows]
            sums[rt, ct] = (tile, _tile_column_sums(tile, x_tile, scheme))
    if alpha is None:
        alpha = calibrate_alpha(np.concatenate([cs.ravel() for _, cs in sums.values()]), target_zero_fraction)
    raw = {}
    for key, (tile, cs) in sums.items():
        p = quantize_partial_sums(cs, scheme.mode, alpha)
        target = cs * ideal_scale_table(scheme, tile.logical_cols)[None]
        raw[key], _ = least_squares_scale(target, p)
    peak = max((float(np.max(np.abs(s), initial=0.0)) for s in raw.values()), default=0.0)
    exponent = choose_exponent(peak, scheme.sf_bits)
    sfs = {key: ScaleFactorSet.from_values(s, scheme.sf_bits, exponent) for key, s in raw.items()}
    return LayerParams(int(alpha), sfs)


def _requant_scale(acc: np.ndarray, out_bits: int) -> FixedPoint:
    peak = int(np.max(acc, initial=0))
    real = ((1 << out_bits) - 1) / max(peak, 1)
    fp, _ = quantize_scale_factor(real, 16, choose_exponent(real, 16))
    return fp


def _run_tile(tile, x_tile, scheme: QuantScheme, sf: ScaleFactorSet, telem: LayerTelemetry, counters_acc: list):
    """Hardware path for every vector of one tile.

    The vectors run side by side as independent column groups of one wide
    array (columns never interact). Cycle and row-op counts are scaled to a
    single physical array taking the vectors one after another.
    """
    n_vec, phys = x_tile.shape[0], tile.physical_columns
    bank = ComparatorBank.for_scheme(scheme)
    p, zeros = compare(_tile_column_sums(tile, x_tile, scheme), bank)  # (V, steps, phys)
    telem.codes += p.size
    telem.zeros += zeros
    codes = encode_codes(p)
    arr = DcimArray.for_scheme(scheme, n_vec * phys)
    arr.load(ScaleFactorSet(np.tile(sf.sign, (1, n_vec)), np.tile(sf.magnitude, (1, n_vec)), sf.exponent, sf.sf_bits))
    arr.run_steps(codes.transpose(1, 0, 2).reshape(scheme.steps, n_vec * phys))
    out = arr.read_partial_sums().reshape(n_vec, phys)
    arr.reset_partial_sums()
    c = arr.counters
    c.cycles *= n_vec
    c.row_ops *= n_vec
    c.load_writes //= n_vec
    counters_acc.append(c)
    return out, codes


def _locate_mismatch(name, key, tile, scheme, sf, codes, trace, hw, v):
    col = int(np.flatnonzero(hw[v] != trace[-1][v])[0])
    arr = DcimArray.for_scheme(scheme, tile.physical_columns)
    arr.load(sf)
    for j in range(scheme.steps):
        arr.apply_step(codes[v][j], j)
        got = arr.read_partial_sums()
        if got[col] != trace[j + 1][v][col]:
            raise OracleMismatch(name, key, col, j, v, int(got[col]), int(trace[j + 1][v][col]))
    raise OracleMismatch(name, key, col, scheme.steps - 1, v, int(hw[v][col]), int(trace[-1][v][col]))


def run_functional(
    layers: list[LayerSpec] | Workload,
    weights: list[np.ndarray],
    inputs: np.ndarray,
    scheme: QuantScheme,
    xbar_rows: int = 128,
    xbar_cols: int = 128,
    params: list[LayerParams] | None = None,
    *,
    alpha: int | None = None,
    target_zero_fraction: float = 0.5,
    check: bool = True,
) -> FunctionalResult:
    """Drive crossbar -> comparators -> DCiM for every tile and bit-stream step.

    ``inputs`` is (vectors, features) for an fc-first network or (C, H, W)
    for a conv-first one. Parameters are calibrated on these same inputs
    unless ``params`` is given. With ``check`` every tile is compared
    bit-for-bit against :func:`golden_psq_trace`.
    """
    if isinstance(layers, Workload):
        layers = list(layers.compute_layers)
    if len(weights) != len(layers):
        raise WorkloadError("one weight matrix per layer required")
    act = np.asarray(inputs, dtype=np.int64)
    outputs, telemetry, used = [], [], []
    lo, hi = -(1 << (TREE_BITS - 1)), (1 << (TREE_BITS - 1)) - 1
    for li, (layer, W) in enumerate(zip(layers, weights)):
        W = np.asarray(W, dtype=np.int64)
        if W.shape != (layer.mvm_rows, layer.mvm_cols):
            raise WorkloadError(f"layer {layer.name!r}: weights {W.shape} != {(layer.mvm_rows, layer.mvm_cols)}")
        if layer.kind == "conv":
            X = im2col(act, layer)
        else:
            # A (vectors, features) batch passes through; anything else is one flattened image.
            X = act if act.ndim == 2 and act.shape[1] == layer.mvm_rows else act.reshape(1, -1)
            if X.shape[1] != layer.mvm_rows:
                raise WorkloadError(f"layer {layer.name!r}: input width {X.shape[1]} != {layer.mvm_rows}")
        lp = params[li] if params is not None else calibrate_layer(
            X, W, scheme, xbar_rows, xbar_cols, target_zero_fraction, alpha
        )
        lscheme = scheme.with_alpha(lp.alpha)
        telem = LayerTelemetry(layer.name)
        counters = []
        acc = np.zeros((X.shape[0], layer.mvm_cols), dtype=np.int64)
        for rt, row in enumerate(slice_weights(W, lscheme, xbar_rows, xbar_cols)):
            for ct, tile in enumerate(row):
                key = (rt, ct)
                sf = lp.scale_factors[key]
                x_tile = X[:, tile.row_offset : tile.row_offset + tile.rows]
                hw, codes = _run_tile(tile, x_tile, lscheme, sf, telem, counters)
                if check:
                    w_tile = W[tile.row_offset : tile.row_offset + tile.rows, tile.col_offset : tile.col_offset + tile.logical_cols]
                    trace = golden_psq_trace(x_tile, w_tile, lscheme, sf)
                    bad = np.flatnonzero((hw != trace[-1]).any(axis=1))
                    if bad.size:
                        _locate_mismatch(layer.name, key, tile, lscheme, sf, codes, trace, hw, int(bad[0]))
                    telem.tiles_checked += 1
                part = combine_slices(hw, lscheme.slices_per_weight)
                acc[:, tile.col_offset : tile.col_offset + tile.logical_cols] = np.clip(
                    acc[:, tile.col_offset : tile.col_offset + tile.logical_cols] + part, lo, hi
                )
        total = counters[0]
        for c in counters[1:]:
            total = total + c
        telem.counters = total.snapshot()
        telem.overflow = total.overflow_saturations
        outputs.append(acc)
        telemetry.append(telem)
        if li + 1 < len(layers):
            if lp.requant is None:
                lp.requant = _requant_scale(acc, scheme.input_bits)
            nxt = requantize(acc, scheme.input_bits, lp.requant)
            if layer.kind == "conv":
                act = nxt.T.reshape(layer.out_channels, layer.output_h, layer.output_w)
            else:
                act = nxt
        used.append(lp)
    return FunctionalResult(outputs, telemetry, used)


def random_network(
    layers: list[LayerSpec], scheme: QuantScheme, rng: np.random.Generator, batch: int = 4
) -> tuple[list[np.ndarray], np.ndarray]:
    """Uniform random weights and first-layer inputs in the scheme's ranges."""
    half = 1 << (scheme.weight_bits - 1)
    weights = [rng.integers(-half, half, size=(l.mvm_rows, l.mvm_cols)) for l in layers]
    first = layers[0]
    top = 1 << scheme.input_bits
    if first.kind == "conv":
        inputs = rng.integers(0, top, size=(first.in_channels, first.input_h, first.input_w))
    else:
        inputs = rng.integers(0, top, size=(batch, first.mvm_rows))
    return weights, inputs


def toy_mlp(sizes: tuple[int, ...] = (160, 96, 48, 10)) -> list[LayerSpec]:
    return [LayerSpec(f"fc{i + 1}", "fc", a, b) for i, (a, b) in enumerate(zip(sizes[:-1], sizes[1:]))]


def measure_sparsity(
    workload: Workload,
    scheme: QuantScheme,
    xbar_rows: int,
    xbar_cols: int,
    rng: np.random.Generator,
    samples: int = 8,
    target_zero_fraction: float = 0.5,
) -> dict[str, float]:
    """Comparator zero fraction per layer on random weights and sampled input vectors."""
    out = {}
    half = 1 << (scheme.weight_bits - 1)
    for layer in workload.compute_layers:
        if scheme.mode is PSQMode.BINARY:
            out[layer.name] = 0.0
            continue
        W = rng.integers(-half, half, size=(layer.mvm_rows, layer.mvm_cols))
        X = rng.integers(0, 1 << scheme.input_bits, size=(samples, layer.mvm_rows))
        sums = [
            _tile_column_sums(tile, X[:, tile.row_offset : tile.row_offset + tile.rows], scheme)
            for row in slice_weights(W, scheme, xbar_rows, xbar_cols)
            for tile in row
        ]
        flat = np.concatenate([s.ravel() for s in sums])
        a = calibrate_alpha(flat, target_zero_fraction)
        p = quantize_partial_sums(flat, scheme.mode, a)
        out[layer.name] = float(np.count_nonzero(p == 0) / p.size)
    return out


# ---------------------------------------------------------------------------
# Estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mode:
    name: str
    kind: str  # "hcim" or "adc"
    psq: PSQMode | None = None
    adc_bits: int | None = None


def parse_mode(name: str) -> Mode:
    n = name.strip().lower()
    if n in ("hcim_binary", "hcim_ternary"):
        return Mode(n, "hcim", psq=PSQMode(n.split("_")[1]))
    for prefix in ("adc_baseline(", "adc"):
        if n.startswith(prefix):
            digits = n[len(prefix) :].rstrip(")")
            if digits.isdigit():
                return Mode(f"adc{int(digits)}", "adc", adc_bits=int(digits))
    raise ValueError(f"unknown mode {name!r}; expected hcim_binary, hcim_ternary or adcN")


@dataclass(frozen=True)
class Hardware:
    xbar_rows: int = 128
    xbar_cols: int = 128
    dcim_entry: str = "dcim_A"
    adc_sharing: int = 1
    timing: TimingParams = TimingParams()
    label: str = "A"


HARDWARE_PRESETS = {
    "A": Hardware(128, 128, "dcim_A", label="A"),
    "B": Hardware(64, 64, "dcim_B", label="B"),
}


def estimate(
    workload: Workload,
    scheme: QuantScheme,
    mode: Mode | str,
    cost: cm.CostTable,
    hardware: Hardware = HARDWARE_PRESETS["A"],
    sparsity: float | dict[str, float] = 0.5,
) -> cm.RunReport:
    """Analytical energy/latency/area for one image of ``workload``.

    ``sparsity`` is the comparator zero fraction, either one injected value
    or a per-layer map (e.g. from :func:`measure_sparsity`). It only affects
    ternary HCiM.
    """
    if isinstance(mode, str):
        mode = parse_mode(mode)
    report = cm.RunReport(workload.name, mode.name)
    S, K = scheme.steps, scheme.slices_per_weight
    xbar = cost["crossbar_mvm"]
    add, move = cost["adder_tree"], cost["ps_move"]
    cell_ratio = hardware.xbar_rows * hardware.xbar_cols / (128 * 128)
    if mode.kind == "hcim":
        dcim_entry, cmp_entry = cost[hardware.dcim_entry], cost["comparator"]
        n_cmp = ComparatorBank(mode.psq).comparators_per_column
    else:
        adc_entry = cost.adc_for_bits(mode.adc_bits)
        conv = cm.per_conversion(adc_entry, cost.reference_steps)
        sa = cost["shift_add"]
    extrapolated = False
    for layer in workload.compute_layers:
        tp = plan(layer, scheme, hardware.xbar_rows, hardware.xbar_cols)
        M = layer.mvm_count
        lr = cm.LayerReport(layer.name)
        phys = sum(t.physical_columns for t in tp.tiles)
        p_max = max(t.physical_columns for t in tp.tiles)
        lr.charge("crossbar_mvm", M * S * phys * xbar.energy_pj, M * S * xbar.latency_ns, tp.crossbars * xbar.area_mm2 * cell_ratio)
        tree_adds = layer.mvm_cols * (tp.row_tiles - 1)
        tree_levels = math.ceil(math.log2(tp.row_tiles)) if tp.row_tiles > 1 else 0
        if mode.kind == "hcim":
            f = 0.0 if mode.psq is PSQMode.BINARY else (
                sparsity.get(layer.name, 0.0) if isinstance(sparsity, dict) else float(sparsity)
            )
            extrapolated |= mode.psq is PSQMode.TERNARY and f > 0.5
            lr.sparsity = f
            lr.charge(
                "comparator",
                M * S * phys * n_cmp * cmp_entry.energy_pj,
                0.0,
                tp.crossbars * hardware.xbar_cols * n_cmp * cmp_entry.area_mm2,
            )
            events = cm.EventCounters()
            energy = 0.0
            for t in tp.tiles:
                c = cm.dcim_counters(S, t.physical_columns, f)
                energy += cm.dcim_energy(c, cost.dcim)
                events = events + c
            cycles, _ = timing_model(S, p_max, hardware.timing)
            lr.charge("dcim", M * energy, M * cycles * hardware.timing.cycle_ns, tp.crossbars * dcim_entry.area_mm2)
            lr.dcim_events = {k: v * M for k, v in events.snapshot().items()}
            slice_adds = sum(t.logical_cols * (K - 1) for t in tp.tiles)
            tree_adds += slice_adds
            tree_levels += math.ceil(math.log2(K)) if K > 1 else 0
        else:
            e_adc = sum(cm.adc_baseline_cost(t.physical_columns, S, conv, hardware.adc_sharing)[0] for t in tp.tiles)
            _, l_adc = cm.adc_baseline_cost(p_max, S, conv, hardware.adc_sharing)
            lr.charge(
                adc_entry.name,
                M * e_adc,
                M * l_adc,
                tp.crossbars * hardware.adc_sharing * adc_entry.area_mm2,
            )
            lr.charge("shift_add", M * S * phys * sa.energy_pj, M * S * sa.latency_ns, tp.crossbars * sa.area_mm2)
        lr.charge("adder_tree", M * tree_adds * add.energy_pj, M * tree_levels * add.latency_ns, 0.0)
        moved = M * layer.mvm_cols * (tp.row_tiles - 1)
        lr.movement_events = moved
        nbytes = moved * cost.bytes_per_partial_sum
        lr.charge("ps_move", nbytes * move.energy_pj, nbytes * move.latency_ns, 0.0)
        report.layers.append(lr)
    report.notes.append(f"technology: {cost.technology}")
    if cost.user_supplied:
        report.notes.append("user-supplied cost entries: " + ", ".join(cost.user_supplied))
    if mode.kind == "adc":
        report.notes.append(
            f"ADC per-conversion cost = per-column macro figure / {cost.reference_steps} streaming steps"
        )
    if extrapolated:
        report.notes.append("sparsity above 0.5 is model-extrapolated (gating split calibrated at 0.5)")
    return report
