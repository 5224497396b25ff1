"""Fixed-point and partial-sum quantization primitives.

Everything here is a pure function over small value types. The PSQ
golden model at the bottom is the software reference the hardware path
(``xbar`` + ``dcim``) is checked against, so it deliberately shares no
code with those modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np


class PSQMode(str, Enum):
    BINARY = "binary"
    TERNARY = "ternary"


# 2-bit wire encoding of a ternary p value.
CODE_ZERO = 0b00
CODE_PLUS = 0b01
CODE_MINUS = 0b11
CODE_INVALID = 0b10

_ENCODE = {0: CODE_ZERO, 1: CODE_PLUS, -1: CODE_MINUS}
_DECODE = {CODE_ZERO: 0, CODE_PLUS: 1, CODE_MINUS: -1}


class InvalidCodeError(ValueError):
    """Raised when the reserved 2-bit pattern 10 shows up as a p code."""


@dataclass(frozen=True)
class QuantScheme:
    """Bit widths and PSQ settings for one layer (or a whole network).

    ``alpha`` is a raw-integer threshold on column sums and is only read in
    ternary mode.
    """

    input_bits: int = 4
    weight_bits: int = 4
    bit_stream: int = 1
    bit_slice: int = 1
    ps_bits: int = 8
    sf_bits: int = 4
    mode: PSQMode = PSQMode.TERNARY
    alpha: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", PSQMode(self.mode))
        for name in ("input_bits", "weight_bits", "bit_stream", "bit_slice", "ps_bits", "sf_bits"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.input_bits % self.bit_stream:
            raise ValueError(
                f"input_bits ({self.input_bits}) must be a multiple of bit_stream ({self.bit_stream})"
            )
        if self.weight_bits % self.bit_slice:
            raise ValueError(
                f"weight_bits ({self.weight_bits}) must be a multiple of bit_slice ({self.bit_slice})"
            )
        if self.sf_bits >= self.ps_bits:
            raise ValueError("sf_bits must be narrower than ps_bits")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")

    @property
    def steps(self) -> int:
        return self.input_bits // self.bit_stream

    @property
    def slices_per_weight(self) -> int:
        return self.weight_bits // self.bit_slice

    @property
    def ps_range(self) -> tuple[int, int]:
        return -(1 << (self.ps_bits - 1)), (1 << (self.ps_bits - 1)) - 1

    def with_alpha(self, alpha: int) -> QuantScheme:
        return replace(self, alpha=int(alpha))

    def with_mode(self, mode: PSQMode | str) -> QuantScheme:
        return replace(self, mode=PSQMode(mode))

    def to_dict(self) -> dict:
        return {
            "input_bits": self.input_bits,
            "weight_bits": self.weight_bits,
            "bit_stream": self.bit_stream,
            "bit_slice": self.bit_slice,
            "ps_bits": self.ps_bits,
            "sf_bits": self.sf_bits,
            "mode": self.mode.value,
            "alpha": self.alpha,
        }


PROFILES = {
    "cifar": QuantScheme(4, 4, 1, 1, 8, 4, PSQMode.TERNARY),
    "imagenet": QuantScheme(3, 3, 1, 1, 16, 8, PSQMode.TERNARY),
}


def profile(name: str) -> QuantScheme:
    try:
        return PROFILES[name]
    except KeyError:
        raise ValueError(f"unknown profile {name!r}; expected one of {sorted(PROFILES)}") from None


# ---------------------------------------------------------------------------
# Ternary codes
# ---------------------------------------------------------------------------


def encode_ternary(p: int) -> int:
    return _ENCODE[int(p)]


def decode_ternary(code: int) -> int:
    if code == CODE_INVALID:
        raise InvalidCodeError("p code 0b10 is not a valid ternary pattern")
    try:
        return _DECODE[int(code)]
    except KeyError:
        raise InvalidCodeError(f"p code {code!r} is not a 2-bit pattern") from None


def encode_codes(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p)
    if np.any((p < -1) | (p > 1)):
        raise ValueError("ternary values must lie in {-1, 0, +1}")
    out = np.full(p.shape, CODE_ZERO, dtype=np.uint8)
    out[p == 1] = CODE_PLUS
    out[p == -1] = CODE_MINUS
    return out


def decode_codes(codes: np.ndarray) -> np.ndarray:
    codes = np.asarray(codes)
    if np.any(codes == CODE_INVALID) or np.any(codes > 0b11):
        raise InvalidCodeError("p code vector contains the reserved pattern 0b10")
    out = np.zeros(codes.shape, dtype=np.int8)
    out[codes == CODE_PLUS] = 1
    out[codes == CODE_MINUS] = -1
    return out


# ---------------------------------------------------------------------------
# Partial-sum quantizer
# ---------------------------------------------------------------------------


def quantize_partial_sum(ps: int, scheme: QuantScheme) -> int:
    if scheme.mode is PSQMode.BINARY:
        return 1 if ps >= 0 else -1
    if ps >= scheme.alpha:
        return 1
    if ps <= -scheme.alpha:
        return -1
    return 0


def quantize_partial_sums(ps: np.ndarray, mode: PSQMode | str, alpha: int = 0) -> np.ndarray:
    """Vectorized :func:`quantize_partial_sum` over any integer array."""
    ps = np.asarray(ps)
    if PSQMode(mode) is PSQMode.BINARY:
        return np.where(ps >= 0, 1, -1).astype(np.int8)
    # ps >= alpha is checked first so alpha == 0 maps 0 to +1, as in the binary branch.
    return np.where(ps >= alpha, 1, np.where(ps <= -alpha, -1, 0)).astype(np.int8)


# ---------------------------------------------------------------------------
# Fixed point
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedPoint:
    sign: int
    magnitude: int
    exponent: int

    @property
    def value(self) -> float:
        return self.sign * self.magnitude * 2.0**self.exponent


def _round_half_up(x: np.ndarray | float) -> np.ndarray:
    return np.floor(np.asarray(x, dtype=np.float64) + 0.5).astype(np.int64)


def quantize_scale_factor(s: float, sf_bits: int, exponent: int) -> tuple[FixedPoint, bool]:
    """Round ``s`` to ``sign * magnitude * 2**exponent``; returns (value, saturated)."""
    if sf_bits < 1:
        raise ValueError("sf_bits must be >= 1")
    sign, mag, sat = quantize_scale_factors(np.array([s]), sf_bits, exponent)
    return FixedPoint(int(sign[0]), int(mag[0]), int(exponent)), bool(sat)


def quantize_scale_factors(
    values: np.ndarray, sf_bits: int, exponent: int
) -> tuple[np.ndarray, np.ndarray, int]:
    if sf_bits < 1:
        raise ValueError("sf_bits must be >= 1")
    values = np.asarray(values, dtype=np.float64)
    top = (1 << sf_bits) - 1
    raw = _round_half_up(np.abs(values) / 2.0**exponent)
    saturated = int(np.count_nonzero(raw > top))
    mag = np.minimum(raw, top)
    sign = np.where(values < 0, -1, 1).astype(np.int8)
    return sign, mag.astype(np.int64), saturated


def choose_exponent(max_abs: float, bits: int) -> int:
    """Smallest exponent at which ``max_abs`` rounds into ``bits`` unsigned bits."""
    if max_abs <= 0 or not math.isfinite(max_abs):
        return 0
    top = (1 << bits) - 1
    e = math.floor(math.log2(max_abs)) - bits - 1
    while math.floor(max_abs / 2.0**e + 0.5) > top:
        e += 1
    return e


@dataclass
class ScaleFactorSet:
    """Per (bit-stream step, physical column) signed fixed-point scale factors.

    Positional weights (input bit position and weight-slice significance)
    are already folded into the stored values. ``magnitude`` is in units of
    ``2**exponent``; the exponent is shared by the whole layer.
    """

    sign: np.ndarray
    magnitude: np.ndarray
    exponent: int
    sf_bits: int
    saturated: int = 0
    zero_entries: int = field(default=0)

    def __post_init__(self) -> None:
        self.sign = np.asarray(self.sign, dtype=np.int8)
        self.magnitude = np.asarray(self.magnitude, dtype=np.int64)
        if self.sign.shape != self.magnitude.shape or self.magnitude.ndim != 2:
            raise ValueError("sign and magnitude must be matching 2-D tables (steps x columns)")
        if np.any((self.sign != 1) & (self.sign != -1)):
            raise ValueError("scale-factor signs must be +1 or -1")
        if np.any(self.magnitude < 0) or np.any(self.magnitude >= (1 << self.sf_bits)):
            raise ValueError(f"scale-factor magnitudes must fit in {self.sf_bits} bits")

    @property
    def shape(self) -> tuple[int, int]:
        return self.magnitude.shape  # type: ignore[return-value]

    @property
    def signed(self) -> np.ndarray:
        """Signed integer values in units of ``2**exponent``."""
        return self.sign.astype(np.int64) * self.magnitude

    @property
    def values(self) -> np.ndarray:
        return self.signed * 2.0**self.exponent

    def columns(self, start: int, stop: int) -> ScaleFactorSet:
        return ScaleFactorSet(
            self.sign[:, start:stop].copy(),
            self.magnitude[:, start:stop].copy(),
            self.exponent,
            self.sf_bits,
        )

    @classmethod
    def from_values(cls, values: np.ndarray, sf_bits: int, exponent: int | None = None) -> ScaleFactorSet:
        values = np.asarray(values, dtype=np.float64)
        if exponent is None:
            exponent = choose_exponent(float(np.max(np.abs(values), initial=0.0)), sf_bits)
        sign, mag, sat = quantize_scale_factors(values, sf_bits, exponent)
        return cls(sign, mag, exponent, sf_bits, saturated=sat)

    @classmethod
    def zeros(cls, steps: int, columns: int, sf_bits: int) -> ScaleFactorSet:
        shape = (steps, columns)
        return cls(np.ones(shape, np.int8), np.zeros(shape, np.int64), 0, sf_bits)


# ---------------------------------------------------------------------------
# Calibration (stands in for training)
# ---------------------------------------------------------------------------


def calibrate_alpha(column_sums: np.ndarray, target_zero_fraction: float = 0.5) -> int:
    """Ternary threshold from the ``target_zero_fraction`` quantile of |column sums|.

    Uses the inverted-CDF quantile, so the result is always one of the
    observed magnitudes. Samples equal to alpha quantize to +-1, not 0.
    """
    samples = np.abs(np.asarray(column_sums, dtype=np.int64).ravel())
    if samples.size == 0:
        raise ValueError("no calibration data")
    if not 0.0 <= target_zero_fraction <= 1.0:
        raise ValueError("target_zero_fraction must lie in [0, 1]")
    if target_zero_fraction == 0.0:
        return 0
    return int(np.quantile(samples, target_zero_fraction, method="inverted_cdf"))


def least_squares_scale(ps: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form argmin_s sum (ps - p*s)^2 along axis 0.

    Returns the real-valued scale table and a boolean mask of entries that
    saw no non-zero p (those are set to 0).
    """
    ps = np.asarray(ps, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    if ps.shape != p.shape:
        raise ValueError("ps and p must have the same shape")
    num = np.sum(p * ps, axis=0)
    den = np.sum(p * p, axis=0)
    empty = den == 0
    s = np.divide(num, den, out=np.zeros_like(num), where=~empty)
    return s, empty


def calibrate_scale_factors(
    ps: np.ndarray, p: np.ndarray, sf_bits: int, exponent: int | None = None
) -> ScaleFactorSet:
    """Fit and quantize scale factors from (target, p) samples.

    ``ps`` and ``p`` have shape (samples, steps, columns); ``ps`` is the
    value each quantized output should reconstruct, positional weights
    included.
    """
    s, empty = least_squares_scale(ps, p)
    if s.ndim == 1:
        s = s[None, :]
        empty = empty[None, :]
    sf = ScaleFactorSet.from_values(s, sf_bits, exponent)
    sf.zero_entries = int(np.count_nonzero(empty))
    return sf


# ---------------------------------------------------------------------------
# Golden PSQ model
# ---------------------------------------------------------------------------


def slice_significance(scheme: QuantScheme) -> np.ndarray:
    """Signed positional weight of each weight slice, LSB slice first."""
    k = scheme.slices_per_weight
    sig = np.array([1 << (i * scheme.bit_slice) for i in range(k)], dtype=np.int64)
    sig[-1] = -sig[-1]
    return sig


def ideal_scale_table(scheme: QuantScheme, logical_cols: int) -> np.ndarray:
    """Folded positional weight 2**(j*bit_stream) * slice significance per (step, column)."""
    step_w = np.array([1 << (j * scheme.bit_stream) for j in range(scheme.steps)], dtype=np.int64)
    col_w = np.tile(slice_significance(scheme), logical_cols)
    return step_w[:, None] * col_w[None, :]


def _golden_digits(inputs: np.ndarray, weights: np.ndarray, scheme: QuantScheme):
    if scheme.bit_slice != 1:
        raise ValueError("signed weights need bit_slice == 1 (sign lives on a single MSB bit)")
    wb, ib = scheme.weight_bits, scheme.input_bits
    if np.any(weights < -(1 << (wb - 1))) or np.any(weights >= (1 << (wb - 1))):
        raise ValueError(f"weights outside the signed {wb}-bit range")
    if np.any(inputs < 0) or np.any(inputs >= (1 << ib)):
        raise ValueError(f"inputs outside the unsigned {ib}-bit range")
    pattern = np.where(weights < 0, weights + (1 << wb), weights)  # two's complement bit pattern
    k = np.arange(scheme.slices_per_weight)
    cells = (pattern[:, :, None] >> (k * scheme.bit_slice)) & ((1 << scheme.bit_slice) - 1)
    cells = cells.reshape(weights.shape[0], -1)  # column index = logical * slices + slice
    j = np.arange(scheme.steps)
    digits = (inputs[:, :, None] >> (j * scheme.bit_stream)) & ((1 << scheme.bit_stream) - 1)
    return digits, cells


def golden_psq_trace(
    inputs: np.ndarray,
    weights: np.ndarray,
    scheme: QuantScheme,
    sf: ScaleFactorSet | None,
    *,
    ideal: bool = False,
) -> np.ndarray:
    """Per-step accumulator contents, shape (steps + 1, batch, physical columns).

    ``trace[0]`` is all zeros; ``trace[j + 1]`` holds the saturating
    accumulator after step ``j``.
    """
    inputs = np.atleast_2d(np.asarray(inputs, dtype=np.int64))
    weights = np.atleast_2d(np.asarray(weights, dtype=np.int64))
    if inputs.shape[1] != weights.shape[0]:
        raise ValueError(
            f"dimension mismatch: inputs have {inputs.shape[1]} features, weights have {weights.shape[0]} rows"
        )
    digits, cells = _golden_digits(inputs, weights, scheme)
    n_phys = cells.shape[1]
    # column_sum[b, j, c] = sum_r digit[b, r, j] * cell[r, c]
    colsum = np.einsum("brj,rc->bjc", digits, cells)
    trace = np.zeros((scheme.steps + 1, inputs.shape[0], n_phys), dtype=np.int64)
    if ideal:
        s = ideal_scale_table(scheme, weights.shape[1])
        for j in range(scheme.steps):
            trace[j + 1] = trace[j] + colsum[:, j, :] * s[j]
        return trace
    if sf is None:
        raise ValueError("scale factors required outside ideal mode")
    if sf.shape != (scheme.steps, n_phys):
        raise ValueError(f"scale-factor table shape {sf.shape} != {(scheme.steps, n_phys)}")
    lo, hi = scheme.ps_range
    p = quantize_partial_sums(colsum, scheme.mode, scheme.alpha).astype(np.int64)
    s = sf.signed
    for j in range(scheme.steps):
        trace[j + 1] = np.clip(trace[j] + p[:, j, :] * s[j], lo, hi)
    return trace


def golden_psq_layer(
    inputs: np.ndarray,
    weights: np.ndarray,
    scheme: QuantScheme,
    sf: ScaleFactorSet | None,
    *,
    ideal: bool = False,
) -> np.ndarray:
    """Final per-physical-column partial sums of one crossbar tile.

    With ``ideal=True`` the quantizer and scale factors are bypassed and
    every column sum is weighted by its exact positional weight, so summing
    the slice columns of each logical column gives ``inputs @ weights``.
    """
    return golden_psq_trace(inputs, weights, scheme, sf, ideal=ideal)[-1]


def combine_slices(ps: np.ndarray, slices_per_weight: int) -> np.ndarray:
    """Sum the slice columns of each logical column (last axis)."""
    ps = np.asarray(ps, dtype=np.int64)
    return ps.reshape(*ps.shape[:-1], -1, slices_per_weight).sum(axis=-1)


# ---------------------------------------------------------------------------
# Inter-layer glue
# ---------------------------------------------------------------------------


def requantize(acc: np.ndarray, out_bits: int, scale: FixedPoint) -> np.ndarray:
    """round(acc * scale) clamped to [0, 2**out_bits - 1], in exact integer arithmetic."""
    if out_bits < 1:
        raise ValueError("out_bits must be >= 1")
    acc = np.asarray(acc, dtype=np.int64)
    prod = acc * (scale.sign * scale.magnitude)
    if scale.exponent >= 0:
        scaled = prod << scale.exponent
    else:
        sh = -scale.exponent
        scaled = (prod + (1 << (sh - 1))) >> sh
    return np.clip(scaled, 0, (1 << out_bits) - 1)


def requantize_activation(acc: int, out_bits: int, scale: FixedPoint) -> int:
    return int(requantize(np.array([acc]), out_bits, scale)[0])
