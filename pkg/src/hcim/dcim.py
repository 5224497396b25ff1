"""Bit-level model of the digital CiM scale-factor array.

Layout per column: ``steps * sf_bits`` rows of scale-factor magnitude bits
followed by ``ps_bits`` rows of the partial-sum accumulator (two's
complement). All columns are processed in parallel, so every signal below
is a numpy vector with one entry per column.

A row operation runs through a 3-stage Read/Compute/Store pipeline:

* Read latches the bit-line OR and NAND of the enabled scale-factor and
  partial-sum rows, plus the raw scale-factor bits for subtracting columns.
* Compute ripples the 1-bit adder/subtractor chain and picks carry or
  borrow through the p-controlled MUX.
* Store writes the result back to the partial-sum rows.

Columns whose p code is 00 are gated in all three stages.
"""

from __future__ import annotations

import contextlib
from dataclasses import asdict, dataclass, field

import numpy as np

from .quantkit import QuantScheme, ScaleFactorSet, decode_codes

_FAULTS: set[str] = set()


@contextlib.contextmanager
def inject_fault(name: str):
    """Test hook: break one gate equation ("full_add_bit" or "full_sub_bit")."""
    if name not in ("full_add_bit", "full_sub_bit"):
        raise ValueError(f"unknown fault site {name!r}")
    _FAULTS.add(name)
    try:
        yield
    finally:
        _FAULTS.discard(name)


# ---------------------------------------------------------------------------
# Gates
# ---------------------------------------------------------------------------


def _not(x):
    return 1 - x


def bitwise_read(a, b):
    """Bit-line read of two enabled rows: (or, nand, xor, and)."""
    or_ = a | b
    nand = _not(a & b)
    xor = or_ & nand
    and_ = _not(nand)
    return or_, nand, xor, and_


def full_add_bit(xor, and_, c_in):
    s = xor ^ c_in
    if "full_add_bit" in _FAULTS:
        return s, and_
    c_out = and_ | (xor & c_in)
    return s, c_out


def full_sub_bit(xor, b_raw, b_in):
    """Minuend A, subtrahend B; ``xor`` = A ^ B, ``b_raw`` = B read directly."""
    diff = xor ^ b_in
    if "full_sub_bit" in _FAULTS:
        return diff, (b_raw & xor) | (b_in & b_raw)
    b_out = (b_raw & xor) | (b_in & _not(xor)) | (b_in & b_raw)
    return diff, b_out


# ---------------------------------------------------------------------------
# Counters and timing
# ---------------------------------------------------------------------------


@dataclass
class EventCounters:
    cycles: int = 0
    row_ops: int = 0
    precharge_reads: int = 0
    computes: int = 0
    stores: int = 0
    raw_b_reads: int = 0
    gated_columns: int = 0
    overflow_saturations: int = 0
    load_writes: int = 0
    reset_stores: int = 0

    def snapshot(self) -> dict[str, int]:
        return {k: int(v) for k, v in asdict(self).items()}

    def __add__(self, other: EventCounters) -> EventCounters:
        return EventCounters(**{k: getattr(self, k) + getattr(other, k) for k in asdict(self)})


@dataclass(frozen=True)
class TimingParams:
    cycle_ns: float = 2.0  # 500 MHz
    pipeline_depth: int = 3
    phases_per_op: int = 1
    count_fill: bool = False


def timing_model(ops: int, columns: int, params: TimingParams = TimingParams()) -> tuple[int, float]:
    """(cycles, average latency per column in ns) for ``ops`` row operations."""
    if ops <= 0:
        return 0, 0.0
    cycles = ops * params.phases_per_op
    if params.count_fill:
        cycles += params.pipeline_depth - 1
    return cycles, cycles * params.cycle_ns / columns


# ---------------------------------------------------------------------------
# Array
# ---------------------------------------------------------------------------


@dataclass
class _RowOp:
    step: int
    add: np.ndarray  # bool per column
    sub: np.ndarray
    # Read-stage latches, (ps_bits, columns)
    a_bits: np.ndarray | None = None
    or_latch: np.ndarray | None = None
    nand_latch: np.ndarray | None = None
    raw_b_latch: np.ndarray | None = None
    # Compute-stage output
    result: np.ndarray | None = None

    @property
    def active(self) -> np.ndarray:
        return self.add | self.sub


def _to_bits(values: np.ndarray, width: int) -> np.ndarray:
    v = np.asarray(values, dtype=np.int64) & ((1 << width) - 1)
    return ((v[None, :] >> np.arange(width)[:, None]) & 1).astype(np.uint8)


def _from_bits_signed(bits: np.ndarray) -> np.ndarray:
    width = bits.shape[0]
    w = (np.int64(1) << np.arange(width, dtype=np.int64))[:, None]
    u = (bits.astype(np.int64) * w).sum(axis=0)
    return np.where(u >= (1 << (width - 1)), u - (1 << width), u)


@dataclass
class DcimArray:
    columns: int
    steps: int
    sf_bits: int
    ps_bits: int
    sf_mem: np.ndarray = field(init=False)
    sf_sign: np.ndarray = field(init=False)
    ps_mem: np.ndarray = field(init=False)
    counters: EventCounters = field(init=False, default_factory=EventCounters)

    def __post_init__(self) -> None:
        if self.sf_bits >= self.ps_bits:
            raise ValueError("sf_bits must be narrower than ps_bits")
        self.sf_mem = np.zeros((self.steps * self.sf_bits, self.columns), dtype=np.uint8)
        # Sign bits sit with the bit-line switch logic, outside the SRAM rows.
        self.sf_sign = np.ones((self.steps, self.columns), dtype=np.int8)
        self.ps_mem = np.zeros((self.ps_bits, self.columns), dtype=np.uint8)
        self._compute_slot: _RowOp | None = None
        self._store_slot: _RowOp | None = None

    @classmethod
    def for_scheme(cls, scheme: QuantScheme, columns: int) -> DcimArray:
        return cls(columns, scheme.steps, scheme.sf_bits, scheme.ps_bits)

    @property
    def rows(self) -> int:
        return self.steps * self.sf_bits + self.ps_bits

    @property
    def busy(self) -> bool:
        return self._compute_slot is not None or self._store_slot is not None

    # -- memory access -----------------------------------------------------

    def load(self, sf: ScaleFactorSet) -> None:
        if sf.shape != (self.steps, self.columns):
            raise ValueError(f"scale-factor shape {sf.shape} does not match array ({self.steps}, {self.columns})")
        if sf.sf_bits > self.sf_bits:
            raise ValueError(f"{sf.sf_bits}-bit scale factors do not fit {self.sf_bits}-bit rows")
        for j in range(self.steps):
            self.sf_mem[j * self.sf_bits : (j + 1) * self.sf_bits] = _to_bits(sf.magnitude[j], self.sf_bits)
        self.sf_sign[:] = sf.sign
        self.ps_mem[:] = 0
        self._compute_slot = self._store_slot = None
        self.counters = EventCounters(load_writes=self.steps * self.columns)

    def scale_magnitudes(self) -> np.ndarray:
        """Read back stored magnitudes, shape (steps, columns)."""
        w = (1 << np.arange(self.sf_bits, dtype=np.int64))[:, None]
        out = np.empty((self.steps, self.columns), dtype=np.int64)
        for j in range(self.steps):
            out[j] = (self.sf_mem[j * self.sf_bits : (j + 1) * self.sf_bits].astype(np.int64) * w).sum(axis=0)
        return out

    def read_partial_sums(self) -> np.ndarray:
        """Decode the accumulator rows; in-flight operations are drained first."""
        self.drain()
        return _from_bits_signed(self.ps_mem)

    def reset_partial_sums(self) -> None:
        self.drain()
        self.ps_mem[:] = 0
        self.counters.reset_stores += self.columns

    def write_partial_sums(self, values: np.ndarray) -> None:
        """Preset accumulators (test and drain-restore path; not counted)."""
        values = np.asarray(values, dtype=np.int64)
        lo, hi = -(1 << (self.ps_bits - 1)), (1 << (self.ps_bits - 1)) - 1
        if values.shape != (self.columns,) or np.any(values < lo) or np.any(values > hi):
            raise ValueError("partial sums must be one in-range value per column")
        self.drain()
        self.ps_mem[:] = _to_bits(values, self.ps_bits)

    # -- pipeline ----------------------------------------------------------

    def _decode_op(self, codes: np.ndarray, step: int) -> _RowOp:
        codes = np.asarray(codes)
        if codes.shape != (self.columns,):
            raise ValueError(f"expected {self.columns} p codes, got shape {codes.shape}")
        if not 0 <= step < self.steps:
            raise ValueError(f"step {step} outside [0, {self.steps})")
        p = decode_codes(codes).astype(np.int64)
        eff = p * self.sf_sign[step]
        return _RowOp(step, add=eff > 0, sub=eff < 0)

    def _read(self, op: _RowOp) -> None:
        active = op.active
        n_active = int(np.count_nonzero(active))
        self.counters.precharge_reads += n_active
        self.counters.gated_columns += self.columns - n_active
        self.counters.raw_b_reads += int(np.count_nonzero(op.sub))
        a = self.ps_mem.copy()
        prev = self._compute_slot
        if prev is not None:  # bypass the result that has not been stored yet
            a[:, prev.active] = prev.result[:, prev.active]
        sf_rows = self.sf_mem[op.step * self.sf_bits : (op.step + 1) * self.sf_bits]
        b = np.zeros_like(a)
        b[: self.sf_bits] = sf_rows  # magnitude is unsigned: zero-extend
        # Transmission gates are off for gated columns: bit-lines stay precharged.
        b = b * active
        a_en = a * active
        or_, nand, _, _ = bitwise_read(a_en, b)
        op.a_bits = a
        op.or_latch = or_
        op.nand_latch = nand
        op.raw_b_latch = b * op.sub

    def _compute(self, op: _RowOp) -> None:
        self.counters.computes += int(np.count_nonzero(op.active))
        sel_add = op.add.astype(np.uint8)
        cb = np.zeros(self.columns, dtype=np.uint8)
        out = np.empty_like(op.a_bits)
        for i in range(self.ps_bits):
            xor = op.or_latch[i] & op.nand_latch[i]
            and_ = _not(op.nand_latch[i])
            s, c_out = full_add_bit(xor, and_, cb)
            d, b_out = full_sub_bit(xor, op.raw_b_latch[i], cb)
            out[i] = np.where(sel_add, s, d)
            cb = np.where(sel_add, c_out, b_out).astype(np.uint8)
        a_msb, r_msb = op.a_bits[-1], out[-1]
        pos_over = op.add & (a_msb == 0) & (r_msb == 1)
        neg_over = op.sub & (a_msb == 1) & (r_msb == 0)
        if pos_over.any():
            out[:, pos_over] = 1
            out[-1, pos_over] = 0
        if neg_over.any():
            out[:, neg_over] = 0
            out[-1, neg_over] = 1
        self.counters.overflow_saturations += int(np.count_nonzero(pos_over | neg_over))
        out[:, ~op.active] = op.a_bits[:, ~op.active]
        op.result = out

    def _store(self, op: _RowOp) -> None:
        active = op.active
        self.counters.stores += int(np.count_nonzero(active))
        self.ps_mem[:, active] = op.result[:, active]

    def tick(self, codes: np.ndarray | None = None, step: int = 0) -> None:
        """Advance one clock; optionally issue a new row operation into Read."""
        new = self._decode_op(codes, step) if codes is not None else None
        if new is None and not self.busy:
            return
        self.counters.cycles += 1
        if self._store_slot is not None:
            self._store(self._store_slot)
        if self._compute_slot is not None:
            self._compute(self._compute_slot)
        if new is not None:
            self.counters.row_ops += 1
            self._read(new)
        self._store_slot = self._compute_slot
        self._compute_slot = new

    def drain(self) -> None:
        while self.busy:
            self.tick()

    def apply_step(self, codes: np.ndarray, step: int) -> None:
        """Issue one row operation and let it retire before returning."""
        self.tick(codes, step)
        self.drain()

    def run_steps(self, codes: np.ndarray) -> None:
        """Issue one row operation per step back to back, then drain.

        ``codes`` has shape (steps, columns); row ``j`` is applied with the
        scale factors of step ``j``.
        """
        codes = np.asarray(codes)
        for j in range(codes.shape[0]):
            self.tick(codes[j], j)
        self.drain()


def load_scale_factors(sf: ScaleFactorSet, ps_bits: int) -> DcimArray:
    steps, cols = sf.shape
    arr = DcimArray(cols, steps, sf.sf_bits, ps_bits)
    arr.load(sf)
    return arr
