"""Exhaustive and randomized checks of the DCiM arithmetic.

Shared by ``hcim selftest`` and the test suite. Each suite returns a
:class:`SuiteResult`; summaries carry no timing so repeated runs print the
same text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .dcim import DcimArray, bitwise_read, full_add_bit, full_sub_bit
from .quantkit import ScaleFactorSet, encode_codes


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        head = f"{status} {self.name}: {self.cases} cases, {len(self.failures)} failures"
        if self.failures:
            head += " (first: " + self.failures[0] + ")"
        return head


def _borrow_reference(a: int, b: int, b_in: int) -> int:
    """B_out = ~A.B + B.B_in + B_in.~A, written term by term."""
    na = 1 - a
    return (na & b) | (b & b_in) | (b_in & na)


def gate_truth_tables() -> SuiteResult:
    res = SuiteResult("gate truth tables")
    for a, b, c in product((0, 1), repeat=3):
        _, _, xor, and_ = bitwise_read(a, b)
        s, c_out = full_add_bit(xor, and_, c)
        res.cases += 1
        if s + 2 * c_out != a + b + c:
            res.failures.append(f"full_add_bit A={a} B={b} Cin={c} -> sum={s} c_out={c_out}")
        d, b_out = full_sub_bit(xor, b, c)
        res.cases += 1
        if d - 2 * b_out != a - b - c:
            res.failures.append(f"full_sub_bit A={a} B={b} Bin={c} -> diff={d} b_out={b_out}")
        res.cases += 1
        if b_out != _borrow_reference(a, b, c):
            res.failures.append(f"full_sub_bit borrow identity A={a} B={b} Bin={c}")
    for a, b in product((0, 1), repeat=2):
        or_, nand, xor, and_ = bitwise_read(a, b)
        res.cases += 1
        if (or_, nand, xor, and_) != (a | b, 1 - (a & b), a ^ b, a & b):
            res.failures.append(f"bitwise_read A={a} B={b}")
    return res


def _word_check(ps: np.ndarray, mag: np.ndarray, sign_op: np.ndarray, sf_bits: int, ps_bits: int) -> np.ndarray:
    """Run one add/subtract per column; returns a boolean mask of wrong columns."""
    n = ps.size
    arr = DcimArray(n, 1, sf_bits, ps_bits)
    arr.load(ScaleFactorSet(np.ones((1, n), np.int8), mag[None, :], 0, sf_bits))
    arr.write_partial_sums(ps)
    arr.apply_step(encode_codes(sign_op), 0)
    lo, hi = -(1 << (ps_bits - 1)), (1 << (ps_bits - 1)) - 1
    return arr.read_partial_sums() != np.clip(ps + sign_op * mag, lo, hi)


def word_level_exhaustive() -> SuiteResult:
    res = SuiteResult("word-level exhaustive (8-bit PS, 4-bit SF)")
    ps, mag = (g.ravel() for g in np.meshgrid(np.arange(-128, 128), np.arange(16), indexing="ij"))
    for op in (1, -1):
        bad = _word_check(ps, mag, np.full(ps.size, op), 4, 8)
        res.cases += ps.size
        for i in np.flatnonzero(bad)[:5]:
            name = "full_add_bit" if op > 0 else "full_sub_bit"
            res.failures.append(f"{name} word PS={ps[i]} SF={mag[i]} op={'+' if op > 0 else '-'}")
    return res


def word_level_random(n: int = 100_000, seed: int = 0) -> SuiteResult:
    res = SuiteResult(f"word-level random (16-bit PS, 8-bit SF, n={n})")
    rng = np.random.default_rng(seed)
    ps = rng.integers(-(1 << 15), 1 << 15, size=n)
    mag = rng.integers(0, 1 << 8, size=n)
    op = rng.choice(np.array([-1, 1]), size=n)
    bad = _word_check(ps, mag, op, 8, 16)
    res.cases += n
    for i in np.flatnonzero(bad)[:5]:
        name = "full_add_bit" if op[i] > 0 else "full_sub_bit"
        res.failures.append(f"{name} word PS={ps[i]} SF={mag[i]} op={'+' if op[i] > 0 else '-'}")
    return res


def pipeline_transparency(trials: int = 50, seed: int = 1) -> SuiteResult:
    res = SuiteResult("pipeline transparency")
    rng = np.random.default_rng(seed)
    for t in range(trials):
        steps, cols = int(rng.integers(1, 9)), int(rng.integers(1, 33))
        sf = ScaleFactorSet(rng.choice(np.array([-1, 1]), (steps, cols)), rng.integers(0, 16, (steps, cols)), 0, 4)
        codes = encode_codes(rng.integers(-1, 2, (steps, cols)))
        piped = DcimArray(cols, steps, 4, 8)
        piped.load(sf)
        piped.run_steps(codes)
        serial = DcimArray(cols, steps, 4, 8)
        serial.load(sf)
        for j in range(steps):
            serial.apply_step(codes[j], j)
        res.cases += 1
        if not np.array_equal(piped.read_partial_sums(), serial.read_partial_sums()):
            res.failures.append(f"trial {t}: pipelined and serial results differ")
        elif piped.counters.cycles != steps + 2:
            res.failures.append(f"trial {t}: {piped.counters.cycles} cycles for {steps} pipelined ops")
    return res


def run_all() -> list[SuiteResult]:
    return [gate_truth_tables(), word_level_exhaustive(), word_level_random(), pipeline_transparency()]
