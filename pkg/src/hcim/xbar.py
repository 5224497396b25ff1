"""Noise-free functional model of the analog crossbar.

Cells are unsigned ``bit_slice``-bit digits of the two's complement weight,
inputs arrive as unsigned ``bit_stream``-bit digits, and a column output is
the exact integer dot product of the two. Sign and positional weight are
not applied here; they live in the scale factors downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quantkit import PSQMode, QuantScheme, quantize_partial_sums, slice_significance


@dataclass(frozen=True)
class BitSlicedWeights:
    """One crossbar tile. ``cells[row, logical_col, slice]``, LSB slice first."""

    cells: np.ndarray
    bit_slice: int
    row_offset: int = 0
    col_offset: int = 0

    @property
    def rows(self) -> int:
        return self.cells.shape[0]

    @property
    def logical_cols(self) -> int:
        return self.cells.shape[1]

    @property
    def slices_per_weight(self) -> int:
        return self.cells.shape[2]

    @property
    def physical_columns(self) -> int:
        return self.logical_cols * self.slices_per_weight

    @property
    def physical(self) -> np.ndarray:
        """(rows, physical_columns) view; column index = logical * slices + slice."""
        return self.cells.reshape(self.rows, self.physical_columns)

    def reassemble(self) -> np.ndarray:
        """Signed integer weights recovered from the slices."""
        k = self.slices_per_weight
        sig = np.array([1 << (i * self.bit_slice) for i in range(k)], dtype=np.int64)
        sig[-1] = -sig[-1]
        return (self.cells.astype(np.int64) * sig).sum(axis=2)


@dataclass(frozen=True)
class BitStreamPlan:
    digits: np.ndarray  # (steps, n) unsigned, LSB step first
    bit_stream: int

    @property
    def steps(self) -> int:
        return self.digits.shape[0]

    def reassemble(self) -> np.ndarray:
        w = np.array([1 << (j * self.bit_stream) for j in range(self.steps)], dtype=np.int64)
        return (self.digits.astype(np.int64) * w[:, None]).sum(axis=0)


@dataclass(frozen=True)
class ComparatorBank:
    mode: PSQMode
    alpha: int = 0

    @property
    def comparators_per_column(self) -> int:
        return 1 if PSQMode(self.mode) is PSQMode.BINARY else 2

    @classmethod
    def for_scheme(cls, scheme: QuantScheme) -> ComparatorBank:
        return cls(scheme.mode, scheme.alpha)


def logical_cols_per_xbar(scheme: QuantScheme, crossbar_cols: int) -> int:
    n = crossbar_cols // scheme.slices_per_weight
    if n < 1:
        raise ValueError(
            f"a {scheme.weight_bits}-bit weight needs {scheme.slices_per_weight} columns; "
            f"crossbar has only {crossbar_cols}"
        )
    return n


def _check_weight_range(W: np.ndarray, weight_bits: int) -> None:
    lo, hi = -(1 << (weight_bits - 1)), (1 << (weight_bits - 1)) - 1
    bad = np.argwhere((W < lo) | (W > hi))
    if bad.size:
        r, c = (int(v) for v in bad[0])
        raise ValueError(f"weight W[{r}, {c}] = {int(W[r, c])} outside signed {weight_bits}-bit range [{lo}, {hi}]")


def slice_weights(
    W: np.ndarray, scheme: QuantScheme, crossbar_rows: int, crossbar_cols: int
) -> list[list[BitSlicedWeights]]:
    """Cut ``W`` (rows x logical columns) into a grid of bit-sliced crossbar tiles.

    ``grid[row_tile][col_tile]``. A logical column never straddles two tiles.
    """
    W = np.atleast_2d(np.asarray(W, dtype=np.int64))
    if scheme.bit_slice != 1:
        raise ValueError("signed weights need bit_slice == 1 (sign lives on a single MSB bit)")
    _check_weight_range(W, scheme.weight_bits)
    k, bs = scheme.slices_per_weight, scheme.bit_slice
    per_xbar = logical_cols_per_xbar(scheme, crossbar_cols)
    pattern = W & ((1 << scheme.weight_bits) - 1)
    cells = np.stack([(pattern >> (i * bs)) & ((1 << bs) - 1) for i in range(k)], axis=2).astype(np.uint8)
    n_rt = math.ceil(W.shape[0] / crossbar_rows)
    n_ct = math.ceil(W.shape[1] / per_xbar)
    grid = []
    for rt in range(n_rt):
        r0 = rt * crossbar_rows
        row = []
        for ct in range(n_ct):
            c0 = ct * per_xbar
            block = cells[r0 : r0 + crossbar_rows, c0 : c0 + per_xbar]
            row.append(BitSlicedWeights(np.ascontiguousarray(block), bs, r0, c0))
        grid.append(row)
    return grid


def stream_input(x: np.ndarray, scheme: QuantScheme) -> BitStreamPlan:
    x = np.asarray(x, dtype=np.int64).ravel()
    bad = np.flatnonzero((x < 0) | (x >= (1 << scheme.input_bits)))
    if bad.size:
        i = int(bad[0])
        raise ValueError(f"input x[{i}] = {int(x[i])} outside unsigned {scheme.input_bits}-bit range")
    mask = (1 << scheme.bit_stream) - 1
    digits = np.stack([(x >> (j * scheme.bit_stream)) & mask for j in range(scheme.steps)])
    return BitStreamPlan(digits, scheme.bit_stream)


def column_sums(tile: BitSlicedWeights, digits: np.ndarray) -> np.ndarray:
    """Integer column outputs for one streaming step (or a batch of steps)."""
    digits = np.asarray(digits, dtype=np.int64)
    if digits.shape[-1] != tile.rows:
        raise ValueError(f"digit vector length {digits.shape[-1]} != tile rows {tile.rows}")
    return digits @ tile.physical.astype(np.int64)


def compare(ps_vector: np.ndarray, bank: ComparatorBank) -> tuple[np.ndarray, int]:
    """Comparator outputs and the number of zero codes produced."""
    p = quantize_partial_sums(ps_vector, bank.mode, bank.alpha)
    return p, int(np.count_nonzero(p == 0))


def ideal_adc(ps_vector: np.ndarray, adc_bits: int, clip: int) -> np.ndarray:
    """Mid-rise uniform quantizer over [-clip, clip] with 2**adc_bits levels.

    Reconstruction levels sit at ``-clip + (k + 1/2) * step``; inputs on a
    decision boundary go to the upper level. Output is integer whenever
    ``clip`` is a multiple of ``2**(adc_bits - 1)``.
    """
    if adc_bits < 1 or clip <= 0:
        raise ValueError("adc_bits must be >= 1 and clip > 0")
    levels = 1 << adc_bits
    ps = np.asarray(ps_vector, dtype=np.int64)
    # Codes in exact integer arithmetic: k = floor((ps + clip) * levels / (2 * clip)).
    code = np.clip(((ps + clip) * levels) // (2 * clip), 0, levels - 1)
    twice = -2 * clip * levels + (2 * code + 1) * 2 * clip  # 2 * levels * reconstruction
    num, den = twice, 2 * levels
    if np.all(num % den == 0):
        return num // den
    return num / den


def ideal_column_reconstruction(tile: BitSlicedWeights, plan: BitStreamPlan, scheme: QuantScheme) -> np.ndarray:
    """Shift-and-add of exact column sums back to ``x @ W`` for the tile's logical columns."""
    sig = slice_significance(scheme)
    total = np.zeros(tile.logical_cols, dtype=np.int64)
    for j in range(plan.steps):
        cs = column_sums(tile, plan.digits[j]).reshape(tile.logical_cols, tile.slices_per_weight)
        total += (cs * sig).sum(axis=1) << (j * scheme.bit_stream)
    return total
