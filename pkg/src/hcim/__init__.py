"""Crossbar compute-in-memory simulator with comparator-quantized partial sums.

Column sums are quantized to binary or ternary codes, accumulated with
scale factors by a bit-level model of a digital in-memory adder array, and
costed against ADC readout baselines.
"""

__version__ = "0.1.0"

from .quantkit import PROFILES, PSQMode, QuantScheme, ScaleFactorSet, profile  # noqa: E402
from .dcim import DcimArray, EventCounters, TimingParams  # noqa: E402
from .costmodel import CostTable, RunReport, load_cost_table  # noqa: E402
from .mapper import LayerSpec, Workload, estimate, load_workload, run_functional  # noqa: E402

__all__ = [
    "__version__",
    "PROFILES",
    "PSQMode",
    "QuantScheme",
    "ScaleFactorSet",
    "profile",
    "DcimArray",
    "EventCounters",
    "TimingParams",
    "CostTable",
    "RunReport",
    "load_cost_table",
    "LayerSpec",
    "Workload",
    "estimate",
    "load_workload",
    "run_functional",
]
