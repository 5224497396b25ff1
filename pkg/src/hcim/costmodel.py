"""Energy, latency and area accounting.

Component costs come from a :class:`CostTable`. Built-in defaults carry the
65nm macro numbers for the ADCs and the two DCiM configurations; the
remaining entries (crossbar, comparator, digital glue, data movement) are
user-supplied placeholders and are flagged as such in every report.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .dcim import EventCounters

COST_SCHEMA = "hcim-cost-table/1"
CSV_COLUMNS = ("layer", "component", "energy_pj", "latency_ns", "area_mm2")


class CostTableError(ValueError):
    pass


@dataclass(frozen=True)
class CostEntry:
    name: str
    energy_pj: float
    latency_ns: float
    area_mm2: float
    adc_bits: int | None = None
    user_supplied: bool = False

    def __post_init__(self) -> None:
        for attr in ("energy_pj", "latency_ns", "area_mm2"):
            v = getattr(self, attr)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v >= 0):
                raise CostTableError(f"{self.name}.{attr} must be a finite non-negative number, got {v!r}")


@dataclass(frozen=True)
class DcimEnergyParams:
    e_read_pj: float = 0.022
    e_compute_pj: float = 0.022
    e_store_pj: float = 0.011
    nongateable_fraction: float = 0.52

    def __post_init__(self) -> None:
        if not 0.0 <= self.nongateable_fraction <= 1.0:
            raise CostTableError("nongateable_fraction must lie in [0, 1]")
        if min(self.e_read_pj, self.e_compute_pj, self.e_store_pj) < 0:
            raise CostTableError("DCiM event energies must be non-negative")

    @property
    def per_column_op_pj(self) -> float:
        return self.e_read_pj + self.e_compute_pj + self.e_store_pj


@dataclass(frozen=True)
class CostTable:
    entries: dict[str, CostEntry]
    dcim: DcimEnergyParams = DcimEnergyParams()
    technology: str = "65nm"
    # Streaming steps behind one "process one column" macro figure.
    reference_steps: int = 4
    bytes_per_partial_sum: int = 4

    def __getitem__(self, name: str) -> CostEntry:
        try:
            return self.entries[name]
        except KeyError:
            raise CostTableError(f"unknown cost entry {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.entries

    def adc_for_bits(self, bits: int) -> CostEntry:
        for e in self.entries.values():
            if e.adc_bits == bits:
                return e
        raise CostTableError(f"no ADC cost entry with adc_bits={bits}")

    @property
    def user_supplied(self) -> list[str]:
        return sorted(n for n, e in self.entries.items() if e.user_supplied)

    def to_dict(self) -> dict:
        return {
            "schema": COST_SCHEMA,
            "technology": self.technology,
            "reference_steps": self.reference_steps,
            "bytes_per_partial_sum": self.bytes_per_partial_sum,
            "dcim_energy": {
                "e_read_pj": self.dcim.e_read_pj,
                "e_compute_pj": self.dcim.e_compute_pj,
                "e_store_pj": self.dcim.e_store_pj,
                "nongateable_fraction": self.dcim.nongateable_fraction,
            },
            "entries": [
                {
                    "name": e.name,
                    "energy_pj": e.energy_pj,
                    "latency_ns": e.latency_ns,
                    "area_mm2": e.area_mm2,
                    **({"adc_bits": e.adc_bits} if e.adc_bits is not None else {}),
                    **({"user_supplied": True} if e.user_supplied else {}),
                }
                for e in self.entries.values()
            ],
        }


def parse_cost_table(doc: dict) -> CostTable:
    if doc.get("schema") != COST_SCHEMA:
        raise CostTableError(f"cost table schema must be {COST_SCHEMA!r}, got {doc.get('schema')!r}")
    entries = {}
    for i, rec in enumerate(doc.get("entries", [])):
        try:
            e = CostEntry(
                name=str(rec["name"]),
                energy_pj=rec["energy_pj"],
                latency_ns=rec["latency_ns"],
                area_mm2=rec["area_mm2"],
                adc_bits=rec.get("adc_bits"),
                user_supplied=bool(rec.get("user_supplied", False)),
            )
        except KeyError as exc:
            raise CostTableError(f"entry #{i} is missing field {exc.args[0]!r}") from None
        if e.name in entries:
            raise CostTableError(f"duplicate cost entry {e.name!r}")
        entries[e.name] = e
    dcim = DcimEnergyParams(**doc.get("dcim_energy", {}))
    return CostTable(
        entries,
        dcim,
        technology=str(doc.get("technology", "65nm")),
        reference_steps=int(doc.get("reference_steps", 4)),
        bytes_per_partial_sum=int(doc.get("bytes_per_partial_sum", 4)),
    )


def load_cost_table(path: str | Path | None = None) -> CostTable:
    if path is None:
        text = resources.files("hcim.data").joinpath("cost_table.json").read_text()
        where = "<builtin cost_table.json>"
    else:
        text = Path(path).read_text()
        where = str(path)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CostTableError(f"{where}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return parse_cost_table(doc)


def default_cost_table() -> CostTable:
    return load_cost_table(None)


# ---------------------------------------------------------------------------
# Component models
# ---------------------------------------------------------------------------


def dcim_energy(counters: EventCounters, params: DcimEnergyParams) -> float:
    """DCiM energy in pJ from event counts.

    A fixed ``nongateable_fraction`` of the all-active energy is spent on
    every row operation regardless of sparsity; the rest scales with the
    read/compute/store events of non-gated columns.
    """
    possible = counters.precharge_reads + counters.gated_columns
    floor = params.nongateable_fraction * possible * params.per_column_op_pj
    active = (
        counters.precharge_reads * params.e_read_pj
        + counters.computes * params.e_compute_pj
        + counters.stores * params.e_store_pj
    )
    return floor + (1.0 - params.nongateable_fraction) * active


def dcim_counters(row_ops: int, columns: int, sparsity: float) -> EventCounters:
    """Synthetic event counts for ``row_ops`` operations at a given zero fraction."""
    if not 0.0 <= sparsity <= 1.0:
        raise ValueError("sparsity must lie in [0, 1]")
    total = row_ops * columns
    active = int(round(total * (1.0 - sparsity)))
    return EventCounters(
        row_ops=row_ops,
        precharge_reads=active,
        computes=active,
        stores=active,
        gated_columns=total - active,
    )


def adc_baseline_cost(columns: int, steps: int, adc: CostEntry, sharing: int = 1) -> tuple[float, float]:
    """(energy pJ, latency ns) to convert ``columns`` outputs for ``steps`` streaming steps."""
    if sharing < 1:
        raise ValueError("sharing must be >= 1")
    conversions = columns * steps
    return conversions * adc.energy_pj, conversions * adc.latency_ns / sharing


def per_conversion(entry: CostEntry, reference_steps: int) -> CostEntry:
    """Split a per-column macro figure evenly over its streaming steps."""
    return CostEntry(
        entry.name,
        entry.energy_pj / reference_steps,
        entry.latency_ns / reference_steps,
        entry.area_mm2,
        entry.adc_bits,
        entry.user_supplied,
    )


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class ComponentCost:
    energy_pj: float = 0.0
    latency_ns: float = 0.0
    area_mm2: float = 0.0

    def __iadd__(self, other: ComponentCost) -> ComponentCost:
        self.energy_pj += other.energy_pj
        self.latency_ns += other.latency_ns
        self.area_mm2 += other.area_mm2
        return self


@dataclass
class LayerReport:
    name: str
    breakdown: dict[str, ComponentCost] = field(default_factory=dict)
    sparsity: float = 0.0
    overflow: int = 0
    movement_events: int = 0
    dcim_events: dict[str, int] = field(default_factory=dict)

    def charge(self, component: str, energy: float = 0.0, latency: float = 0.0, area: float = 0.0) -> None:
        self.breakdown.setdefault(component, ComponentCost())
        self.breakdown[component] += ComponentCost(energy, latency, area)

    @property
    def energy_pj(self) -> float:
        return sum(c.energy_pj for c in self.breakdown.values())

    @property
    def latency_ns(self) -> float:
        return sum(c.latency_ns for c in self.breakdown.values())

    @property
    def area_mm2(self) -> float:
        return sum(c.area_mm2 for c in self.breakdown.values())


@dataclass
class RunReport:
    workload: str
    mode: str
    layers: list[LayerReport] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def energy_pj(self) -> float:
        return sum(layer.energy_pj for layer in self.layers)

    @property
    def latency_ns(self) -> float:
        return sum(layer.latency_ns for layer in self.layers)

    @property
    def area_mm2(self) -> float:
        return sum(layer.area_mm2 for layer in self.layers)

    @property
    def overflow(self) -> int:
        return sum(layer.overflow for layer in self.layers)

    @property
    def movement_events(self) -> int:
        return sum(layer.movement_events for layer in self.layers)

    @property
    def sparsity(self) -> float:
        """Mean of per-layer zero fractions weighted by DCiM row-op column slots."""
        slots = [layer.dcim_events.get("precharge_reads", 0) + layer.dcim_events.get("gated_columns", 0) for layer in self.layers]
        total = sum(slots)
        if total == 0:
            return 0.0
        return sum(layer.sparsity * s for layer, s in zip(self.layers, slots)) / total

    def components(self) -> dict[str, ComponentCost]:
        out: dict[str, ComponentCost] = {}
        for layer in self.layers:
            for name, c in layer.breakdown.items():
                out.setdefault(name, ComponentCost())
                out[name] += c
        return out

    def metrics(self) -> dict[str, float]:
        return {
            "energy_pj": self.energy_pj,
            "latency_ns": self.latency_ns,
            "area_mm2": self.area_mm2,
            **derived_metrics(self.energy_pj, self.latency_ns, self.area_mm2),
        }

    def csv_rows(self) -> list[tuple]:
        rows = []
        for layer in self.layers:
            for name in sorted(layer.breakdown):
                c = layer.breakdown[name]
                rows.append((layer.name, name, c.energy_pj, c.latency_ns, c.area_mm2))
        for name, c in sorted(self.components().items()):
            rows.append(("TOTAL", name, c.energy_pj, c.latency_ns, c.area_mm2))
        return rows

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in self.csv_rows():
            w.writerow([row[0], row[1], *(fmt_float(v) for v in row[2:])])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "workload": self.workload,
            "mode": self.mode,
            **{k: fmt_float(v) for k, v in self.metrics().items()},
            "sparsity": fmt_float(self.sparsity),
            "overflow_saturations": self.overflow,
            "movement_events": self.movement_events,
            "notes": list(self.notes),
        }


def fmt_float(v: float) -> str:
    return f"{v:.9g}"


def derived_metrics(energy_pj: float, latency_ns: float, area_mm2: float) -> dict[str, float]:
    return {
        "latency_area": latency_ns * area_mm2,
        "edap": energy_pj * latency_ns * area_mm2,
    }


def normalize(values: dict[str, float], reference: str) -> dict[str, float]:
    """Divide every value by ``values[reference]``."""
    ref = values[reference]
    if ref == 0:
        raise ZeroDivisionError(f"normalization reference {reference!r} has a zero metric")
    return {k: v / ref for k, v in values.items()}


def verify_report_csv(text: str, rel_tol: float = 1e-6) -> list[str]:
    """Check that TOTAL rows equal the per-layer rows; returns a list of problems."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        return [f"unexpected header {reader.fieldnames}"]
    sums: dict[str, list[float]] = {}
    totals: dict[str, list[float]] = {}
    for row in reader:
        vals = [float(row[c]) for c in CSV_COLUMNS[2:]]
        target = totals if row["layer"] == "TOTAL" else sums
        acc = target.setdefault(row["component"], [0.0, 0.0, 0.0])
        for i, v in enumerate(vals):
            acc[i] += v
    problems = []
    for comp in sorted(set(sums) | set(totals)):
        a, b = sums.get(comp, [0.0] * 3), totals.get(comp, [0.0] * 3)
        for col, x, y in zip(CSV_COLUMNS[2:], a, b):
            if not math.isclose(x, y, rel_tol=rel_tol, abs_tol=1e-9):
                problems.append(f"{comp}.{col}: layers sum to {x!r}, TOTAL says {y!r}")
    return problems
