"""Command-line front end: ``hcim {selftest,verify,estimate,sweep}``.

Exit codes: 0 success, 2 configuration error, 3 hardware/oracle mismatch,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import costmodel as cm
from . import mapper, selftest
from .dcim import TimingParams, inject_fault
from .quantkit import PROFILES, PSQMode, QuantScheme
from .xbar import ideal_adc

log = logging.getLogger("hcim")

EXIT_OK, EXIT_CONFIG, EXIT_MISMATCH, EXIT_INVARIANT = 0, 2, 3, 4
CONFIG_SCHEMA = "hcim-config/1"
CONFIG_ENV = "HCIM_CONFIG_DIR"
CROSSBARS = {"128x128": "A", "64x64": "B"}
SWEEP_AXES = ("sparsity", "adc_bits", "crossbar_size")
DEFAULT_SWEEPS = {"sparsity": [0.0, 0.25, 0.5, 0.75, 1.0], "adc_bits": [4, 6, 7], "crossbar_size": [128, 64]}


class ConfigError(ValueError):
    pass


class InvariantViolation(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    profile: str = "cifar"
    scheme: QuantScheme = PROFILES["cifar"]
    hardware: mapper.Hardware = mapper.HARDWARE_PRESETS["A"]
    cost_table: str | None = None
    workloads: list[str] = field(default_factory=lambda: ["resnet20"])
    modes: list[str] = field(default_factory=lambda: ["hcim_ternary", "hcim_binary", "adc7", "adc4"])
    sparsity: float | str = 0.5
    sweep_points: dict[str, list] = field(default_factory=lambda: dict(DEFAULT_SWEEPS))
    seed: int = 0
    out: str = "results"
    figures: bool = False
    verify_weights: str | None = None
    workload_given: bool = False

    def to_dict(self) -> dict:
        hw = self.hardware
        return {
            "schema": CONFIG_SCHEMA,
            "profile": self.profile,
            "scheme": self.scheme.to_dict(),
            "hardware": {
                "config": hw.label,
                "crossbar_rows": hw.xbar_rows,
                "crossbar_cols": hw.xbar_cols,
                "dcim_entry": hw.dcim_entry,
                "adc_sharing": hw.adc_sharing,
                "timing": vars(hw.timing),
                "cost_table": self.cost_table,
            },
            "workloads": list(self.workloads),
            "modes": list(self.modes),
            "sparsity": self.sparsity,
            "sweep": {k: list(v) for k, v in self.sweep_points.items()},
            "seed": self.seed,
            "figures": self.figures,
            "verify_weights": self.verify_weights,
        }

    def digest(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


def _read_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _parse_sparsity(value) -> float | str:
    if isinstance(value, str) and value.strip().lower() == "measured":
        return "measured"
    try:
        f = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"sparsity must be a number in [0, 1] or 'measured', got {value!r}") from None
    if not 0.0 <= f <= 1.0:
        raise ConfigError(f"sparsity {f} outside [0, 1]")
    return f


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file (explicit or from $HCIM_CONFIG_DIR/hcim.json), then CLI overrides."""
    doc: dict = {}
    base = Path.cwd()
    path = getattr(args, "config", None)
    if path is None and os.environ.get(CONFIG_ENV):
        candidate = Path(os.environ[CONFIG_ENV]) / "hcim.json"
        if candidate.is_file():
            path = candidate
    if path is not None:
        path = Path(path)
        doc = _read_json(path)
        base = path.parent
        if doc.get("schema") != CONFIG_SCHEMA:
            raise ConfigError(f"{path}: schema must be {CONFIG_SCHEMA!r}")
    cfg = ExperimentConfig()
    cfg.profile = getattr(args, "profile", None) or doc.get("profile", "cifar")
    if cfg.profile not in PROFILES:
        raise ConfigError(f"unknown profile {cfg.profile!r}")
    try:
        cfg.scheme = replace(PROFILES[cfg.profile], **doc.get("scheme", {}))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"scheme: {exc}") from None

    hw_doc = doc.get("hardware", {})
    label = hw_doc.get("config", "A")
    if getattr(args, "crossbar", None):
        label = CROSSBARS[args.crossbar]
    if label not in mapper.HARDWARE_PRESETS:
        raise ConfigError(f"hardware config must be one of {sorted(mapper.HARDWARE_PRESETS)}")
    hw = mapper.HARDWARE_PRESETS[label]
    try:
        timing = TimingParams(**hw_doc.get("timing", {}))
    except TypeError as exc:
        raise ConfigError(f"hardware.timing: {exc}") from None
    hw = replace(hw, adc_sharing=int(hw_doc.get("adc_sharing", hw.adc_sharing)), timing=timing)
    cfg.hardware = hw
    ct = hw_doc.get("cost_table")
    cfg.cost_table = str((base / ct).resolve()) if ct else None

    workloads = getattr(args, "workload", None) or doc.get("workloads")
    cfg.workload_given = bool(workloads)
    workloads = workloads or cfg.workloads
    cfg.workloads = [w if w in mapper.bundled_workloads() else str((base / w).resolve()) for w in workloads]
    cfg.modes = getattr(args, "mode", None) or doc.get("modes", cfg.modes)
    if not cfg.modes:
        raise ConfigError("mode list is empty")
    for m in cfg.modes:
        try:
            mapper.parse_mode(m)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    cfg.sparsity = _parse_sparsity(
        getattr(args, "sparsity", None) if getattr(args, "sparsity", None) is not None else doc.get("sparsity", 0.5)
    )
    sweeps = dict(DEFAULT_SWEEPS)
    sweeps.update(doc.get("sweep", {}))
    cfg.sweep_points = sweeps
    seed = getattr(args, "seed", None)
    cfg.seed = int(seed if seed is not None else doc.get("seed", 0))
    cfg.out = getattr(args, "out", None) or doc.get("out", "results")
    cfg.figures = bool(getattr(args, "figures", False) or doc.get("figures", False))
    vw = getattr(args, "weights", None) or doc.get("verify_weights")
    cfg.verify_weights = str((base / vw).resolve()) if vw and not getattr(args, "weights", None) else vw
    log.debug("resolved config %s: %s", cfg.digest()[:12], json.dumps(cfg.to_dict(), sort_keys=True))
    return cfg


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


class Outputs:
    """Collects written files for the manifest."""

    def __init__(self, root: Path):
        self.root = root
        root.mkdir(parents=True, exist_ok=True)
        self.files: list[Path] = []

    def write_text(self, name: str, text: str) -> Path:
        p = self.root / name
        p.write_text(text)
        self.files.append(p)
        return p

    def write_rows(self, name: str, header: list[str], rows: list[dict]) -> Path:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=header, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        w.writeheader()
        for r in rows:
            w.writerow({k: (cm.fmt_float(v) if isinstance(v, float) else v) for k, v in r.items()})
        return self.write_text(name, buf.getvalue())

    def add(self, path: Path) -> None:
        self.files.append(path)

    def manifest(self, cfg: ExperimentConfig, command: str) -> Path:
        doc = {
            "tool": "hcim",
            "version": __version__,
            "command": command,
            "config_sha256": cfg.digest(),
            "seed": cfg.seed,
            "created_utc": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "config": cfg.to_dict(),
            "outputs": [
                {"file": p.name, "sha256": hashlib.sha256(p.read_bytes()).hexdigest()} for p in self.files
            ],
        }
        p = self.root / "manifest.json"
        p.write_text(json.dumps(doc, indent=2) + "\n")
        return p


def _load_cost(cfg: ExperimentConfig) -> cm.CostTable:
    try:
        return cm.load_cost_table(cfg.cost_table)
    except (cm.CostTableError, FileNotFoundError) as exc:
        raise ConfigError(str(exc)) from None


def _load_workloads(cfg: ExperimentConfig) -> list[mapper.Workload]:
    try:
        return [mapper.resolve_workload(w) for w in cfg.workloads]
    except (mapper.WorkloadError, FileNotFoundError) as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_selftest(args: argparse.Namespace) -> int:
    if args.inject_fault:
        with inject_fault(args.inject_fault):
            results = selftest.run_all()
    else:
        results = selftest.run_all()
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print("selftest:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_MISMATCH


def _verify_jobs(cfg: ExperimentConfig, rng: np.random.Generator, vectors: int = 8):
    """(layers, weights, inputs) groups to push through the functional path.

    A bundled or file workload is checked layer by layer as an equivalent fc
    layer on sampled patch vectors: pooling and residual branches are not
    needed to compare each tile against the oracle.
    """
    if cfg.verify_weights:
        try:
            data = np.load(cfg.verify_weights)
            n = len([k for k in data.files if k.startswith("w")])
            weights = [data[f"w{i}"] for i in range(n)]
            inputs = data["inputs"]
        except (OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"{cfg.verify_weights}: {exc}") from None
        layers = [mapper.LayerSpec(f"fc{i + 1}", "fc", w.shape[0], w.shape[1]) for i, w in enumerate(weights)]
        return [(layers, weights, inputs)]
    if not cfg.workload_given:
        layers = mapper.toy_mlp()
        weights, inputs = mapper.random_network(layers, cfg.scheme, rng, batch=vectors)
        return [(layers, weights, inputs)]
    jobs = []
    for wl in _load_workloads(cfg):
        for layer in wl.compute_layers:
            fc = [mapper.LayerSpec(layer.name, "fc", layer.mvm_rows, layer.mvm_cols)]
            weights, inputs = mapper.random_network(fc, cfg.scheme, rng, batch=vectors)
            jobs.append((fc, weights, inputs))
    return jobs


VERIFY_COLUMNS = [
    "mode", "layer", "tiles_checked", "codes", "zero_codes", "sparsity",
    "overflow_saturations", "precharge_reads", "gated_columns", "cycles",
]


def cmd_verify(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    out = Outputs(Path(cfg.out))
    hw = cfg.hardware
    rows = []
    status = EXIT_OK
    modes = [mapper.parse_mode(m) for m in cfg.modes]
    psq_modes = [m for m in modes if m.kind == "hcim"] or [mapper.parse_mode("hcim_ternary")]
    for mode in psq_modes:
        rng = np.random.default_rng(cfg.seed)
        scheme = cfg.scheme.with_mode(mode.psq)
        telemetry = []
        try:
            for layers, weights, inputs in _verify_jobs(cfg, rng):
                res = mapper.run_functional(layers, weights, inputs, scheme, hw.xbar_rows, hw.xbar_cols)
                telemetry.extend(res.telemetry)
        except mapper.OracleMismatch as exc:
            print(f"FAIL {mode.name}: {exc}")
            status = EXIT_MISMATCH
            continue
        except mapper.WorkloadError as exc:
            raise ConfigError(str(exc)) from None
        for t in telemetry:
            rows.append({
                "mode": mode.name, "layer": t.name, "tiles_checked": t.tiles_checked, "codes": t.codes,
                "zero_codes": t.zeros, "sparsity": t.sparsity, "overflow_saturations": t.overflow,
                "precharge_reads": t.counters["precharge_reads"], "gated_columns": t.counters["gated_columns"],
                "cycles": t.counters["cycles"],
            })
        codes = sum(t.codes for t in telemetry)
        sparsity = sum(t.zeros for t in telemetry) / codes if codes else 0.0
        if mode.psq is PSQMode.BINARY and sparsity != 0.0:
            raise InvariantViolation("binary mode produced zero codes")
        print(f"PASS {mode.name}: {sum(t.tiles_checked for t in telemetry)} tiles bit-identical "
              f"to oracle, sparsity {sparsity:.4f}")
    out.write_rows("verify_sparsity.csv", VERIFY_COLUMNS, rows)
    out.manifest(cfg, "verify")
    return status


COMPARISON_COLUMNS = [
    "workload", "mode", "energy_pj", "latency_ns", "area_mm2", "latency_area", "edap",
    "norm_energy", "norm_latency_area", "norm_edap", "sparsity",
]


def _sparsity_for(cfg, wl, scheme, hw, rng):
    if cfg.sparsity == "measured":
        return mapper.measure_sparsity(wl, scheme, hw.xbar_rows, hw.xbar_cols, rng)
    return float(cfg.sparsity)


def cmd_estimate(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    cost = _load_cost(cfg)
    workloads = _load_workloads(cfg)
    out = Outputs(Path(cfg.out))
    modes = [mapper.parse_mode(m) for m in cfg.modes]
    reference = "hcim_ternary" if any(m.name == "hcim_ternary" for m in modes) else modes[0].name
    comparison, summaries = [], []
    for wl in workloads:
        rng = np.random.default_rng(cfg.seed)
        reports = {}
        for mode in modes:
            scheme = cfg.scheme.with_mode(mode.psq) if mode.psq else cfg.scheme
            sp = _sparsity_for(cfg, wl, scheme, cfg.hardware, rng) if mode.psq is PSQMode.TERNARY else 0.0
            try:
                rep = mapper.estimate(wl, scheme, mode, cost, cfg.hardware, sp)
            except cm.CostTableError as exc:
                raise ConfigError(str(exc)) from None
            reports[mode.name] = rep
            path = out.write_text(f"estimate_{wl.name}_{mode.name}.csv", rep.to_csv())
            if getattr(args, "check_totals", False):
                problems = cm.verify_report_csv(path.read_text())
                if problems:
                    raise InvariantViolation(f"{path.name}: " + "; ".join(problems))
            summaries.append(rep.summary())
        metrics = {name: r.metrics() for name, r in reports.items()}
        for key in ("energy_pj", "latency_area", "edap"):
            try:
                norm = cm.normalize({n: m[key] for n, m in metrics.items()}, reference)
            except ZeroDivisionError as exc:
                raise InvariantViolation(str(exc)) from None
            for n in metrics:
                metrics[n][f"norm_{key.replace('_pj', '')}"] = norm[n]
        for name, m in metrics.items():
            comparison.append({
                "workload": wl.name, "mode": name, "energy_pj": m["energy_pj"], "latency_ns": m["latency_ns"],
                "area_mm2": m["area_mm2"], "latency_area": m["latency_area"], "edap": m["edap"],
                "norm_energy": m["norm_energy"], "norm_latency_area": m["norm_latency_area"],
                "norm_edap": m["norm_edap"], "sparsity": reports[name].sparsity,
            })
    out.write_rows("comparison.csv", COMPARISON_COLUMNS, comparison)
    out.write_text("summary.json", json.dumps({"reference": reference, "runs": summaries}, indent=2) + "\n")
    if cfg.figures:
        from .plotting import plot_comparison

        out.add(plot_comparison(comparison, reference, out.root / "comparison.png"))
    out.manifest(cfg, "estimate")
    for row in comparison:
        print(f"{row['workload']:>14} {row['mode']:>13}  energy x{row['norm_energy']:.3f}  "
              f"latency*area x{row['norm_latency_area']:.3f}")
    return EXIT_OK


def _sweep_sparsity(cfg, cost, workloads, points):
    rows = []
    scheme = cfg.scheme.with_mode(PSQMode.TERNARY)
    for wl in workloads:
        base = None
        prev_e = None
        lat = None
        for f in points:
            rep = mapper.estimate(wl, scheme, "hcim_ternary", cost, cfg.hardware, float(f))
            dcim_e = rep.components()["dcim"].energy_pj
            base = dcim_e if base is None else base
            if prev_e is not None and dcim_e > prev_e * (1 + 1e-12):
                raise InvariantViolation(f"{wl.name}: DCiM energy rose between sparsity points")
            if lat is not None and rep.latency_ns != lat:
                raise InvariantViolation(f"{wl.name}: latency changed with sparsity")
            prev_e, lat = dcim_e, rep.latency_ns
            rows.append({
                "workload": wl.name, "sparsity": float(f), "dcim_energy_pj": dcim_e,
                "dcim_reduction": 1.0 - dcim_e / base if base else 0.0,
                "energy_pj": rep.energy_pj, "latency_ns": rep.latency_ns,
            })
    return rows, ["workload", "sparsity", "dcim_energy_pj", "dcim_reduction", "energy_pj", "latency_ns"], \
        ("dcim_reduction", "DCiM energy reduction")


def _sweep_adc_bits(cfg, cost, workloads, points):
    rows = []
    rng = np.random.default_rng(cfg.seed)
    xr = cfg.hardware.xbar_rows
    sample = rng.integers(0, xr + 1, size=4096)
    ref_scheme = cfg.scheme.with_mode(PSQMode.TERNARY)
    for wl in workloads:
        ref = mapper.estimate(wl, ref_scheme, "hcim_ternary", cost, cfg.hardware, 0.5 if cfg.sparsity == "measured" else cfg.sparsity)
        for b in points:
            try:
                rep = mapper.estimate(wl, cfg.scheme, f"adc{int(b)}", cost, cfg.hardware)
            except cm.CostTableError as exc:
                raise ConfigError(str(exc)) from None
            err = ideal_adc(sample, int(b), xr) - sample
            rows.append({
                "workload": wl.name, "adc_bits": int(b), "energy_pj": rep.energy_pj, "latency_ns": rep.latency_ns,
                "area_mm2": rep.area_mm2, "latency_area": rep.metrics()["latency_area"],
                "energy_vs_hcim_ternary": rep.energy_pj / ref.energy_pj,
                "adc_rms_error": float(np.sqrt(np.mean(np.square(err, dtype=np.float64)))),
            })
    return rows, ["workload", "adc_bits", "energy_pj", "latency_ns", "area_mm2", "latency_area",
                  "energy_vs_hcim_ternary", "adc_rms_error"], ("energy_vs_hcim_ternary", "ADC energy / HCiM ternary")


def _sweep_crossbar(cfg, cost, workloads, points):
    rows = []
    by_size = {128: "A", 64: "B"}
    scheme = cfg.scheme.with_mode(PSQMode.TERNARY)
    sp = 0.5 if cfg.sparsity == "measured" else cfg.sparsity
    for wl in workloads:
        prev = None
        for size in sorted((int(p) for p in points), reverse=True):
            if size not in by_size:
                raise ConfigError(f"crossbar size {size} has no preset (use 128 or 64)")
            hw = replace(mapper.HARDWARE_PRESETS[by_size[size]], timing=cfg.hardware.timing,
                         adc_sharing=cfg.hardware.adc_sharing)
            rep = mapper.estimate(wl, scheme, "hcim_ternary", cost, hw, sp)
            moved = rep.movement_events
            if prev is not None and moved < prev:
                raise InvariantViolation(f"{wl.name}: partial-sum movement fell as crossbars shrank")
            prev = moved
            xbars = sum(mapper.plan(l, scheme, size, size).crossbars for l in wl.compute_layers)
            rows.append({
                "workload": wl.name, "crossbar_size": size, "crossbars": xbars, "movement_events": moved,
                "energy_pj": rep.energy_pj, "latency_ns": rep.latency_ns, "area_mm2": rep.area_mm2,
            })
    return rows, ["workload", "crossbar_size", "crossbars", "movement_events", "energy_pj", "latency_ns",
                  "area_mm2"], ("movement_events", "partial-sum movement events")


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    axis = args.axis
    if args.points is not None:
        points = [p for p in args.points.split(",") if p.strip()]
    else:
        points = cfg.sweep_points.get(axis, [])
    if not points:
        raise ConfigError(f"sweep axis {axis!r} has no points")
    try:
        points = [float(p) if axis == "sparsity" else int(p) for p in points]
    except ValueError:
        raise ConfigError(f"invalid sweep points {points!r}") from None
    if axis == "sparsity" and any(not 0.0 <= p <= 1.0 for p in points):
        raise ConfigError("sparsity points must lie in [0, 1]")
    cost = _load_cost(cfg)
    workloads = _load_workloads(cfg)
    fn = {"sparsity": _sweep_sparsity, "adc_bits": _sweep_adc_bits, "crossbar_size": _sweep_crossbar}[axis]
    rows, header, (fig_y, fig_label) = fn(cfg, cost, workloads, points)
    out = Outputs(Path(cfg.out))
    out.write_rows(f"sweep_{axis}.csv", header, rows)
    if cfg.figures:
        from .plotting import plot_sweep

        out.add(plot_sweep(rows, axis, fig_y, out.root / f"sweep_{axis}.png", fig_label))
    out.manifest(cfg, f"sweep {axis}")
    for r in rows:
        print(", ".join(f"{k}={cm.fmt_float(v) if isinstance(v, float) else v}" for k, v in r.items()))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help=f"experiment config JSON (default: ${CONFIG_ENV}/hcim.json)")
    p.add_argument("--seed", type=int, help="RNG seed for random weights, inputs and sampling")
    p.add_argument("--out", help="output directory (default: results)")
    p.add_argument("--mode", action="append", help="hcim_ternary, hcim_binary or adcN; repeatable")
    p.add_argument("--sparsity", help="injected comparator zero fraction in [0, 1], or 'measured'")
    p.add_argument("--crossbar", choices=sorted(CROSSBARS), help="128x128 (config A) or 64x64 (config B)")
    p.add_argument("--profile", choices=sorted(PROFILES), help="precision profile")
    p.add_argument("--workload", action="append", help="bundled workload name or workload JSON path; repeatable")
    p.add_argument("--figures", action="store_true", help="also render PNG figures next to the CSVs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hcim", description="Verify and cost a compute-in-memory accelerator model.")
    parser.add_argument("--version", action="version", version=f"hcim {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("selftest", help="gate, word-level and pipeline suites")
    p.add_argument("--inject-fault", choices=["full_add_bit", "full_sub_bit"], help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("verify", help="functional run checked bit-for-bit against the software oracle")
    _common(p)
    p.add_argument("--weights", help="npz with w0, w1, ... and inputs (fc network)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("estimate", help="energy/latency/area reports per workload and mode")
    _common(p)
    p.add_argument("--check-totals", action="store_true", help="re-read each CSV and check TOTAL rows")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sweep", help="one CSV row per point along an axis")
    _common(p)
    p.add_argument("--axis", choices=SWEEP_AXES, required=True)
    p.add_argument("--points", help="comma-separated axis values (overrides config)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
