"""Young diagrams with an odd versus even number of steps.

A diagram of size ``w x h`` is a sequence ``x_1 <= ... <= x_h = w`` of
positive integers; its steps are the distinct values. ``D(w, h)`` is the
number of diagrams with an odd number of steps minus the number with an even
number. With ``x = h - w`` and ``t = h + w - 1``,
``D(w, h) = 2^(t/2) a1_tilde(x, t) = 2^((h+w-1)/2) Re a(h - w, h + w)``,
i.e. the exact engine's ``scaled_real`` entry at ``(h - w, h + w)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, exact_row, iter_exact_rows
from .reports import VerificationReport, csv_text

BRUTE_FORCE_MAX_SUM = 26
RED, GREEN, BLUE = (255, 0, 0), (0, 255, 0), (0, 0, 255)


@dataclass(frozen=True)
class DiagramSize:
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise DomainError(f"diagram sides must be >= 1, got {self.w}x{self.h}")

    @property
    def x(self) -> int:
        return self.h - self.w

    @property
    def t(self) -> int:
        return self.h + self.w - 1


def young_difference(w: int, h: int) -> int:
    """``D(w, h)`` exactly, from the Gaussian-integer path sum at ``(h - w, h + w)``."""
    size = DiagramSize(w, h)
    return exact_row(size.t + 1).scaled_real(size.x)


def young_brute_force(w: int, h: int) -> int:
    """``D(w, h)`` by listing every diagram. Limited to ``w + h <= 26``."""
    DiagramSize(w, h)
    if w + h > BRUTE_FORCE_MAX_SUM:
        raise DomainError(f"brute force is limited to w + h <= {BRUTE_FORCE_MAX_SUM}")
    diff = 0
    for head in itertools.combinations_with_replacement(range(1, w + 1), h - 1):
        steps = len(set(head) | {w})
        diff += 1 if steps % 2 else -1
    return diff


@dataclass(frozen=True, eq=False)
class SignGrid:
    """``cells[h-1, w-1] = sgn D(w, h)``; ``differences`` holds the exact values."""

    w_max: int
    h_max: int
    cells: np.ndarray
    differences: np.ndarray

    def sign(self, w: int, h: int) -> int:
        return int(self.cells[h - 1, w - 1])

    def difference(self, w: int, h: int) -> int:
        return int(self.differences[h - 1, w - 1])

    def to_ppm(self) -> bytes:
        """Binary P6 image, one pixel per cell, ``w`` to the right, ``h = 1`` on top."""
        palette = np.array([GREEN, BLUE, RED], dtype=np.uint8)  # sign -1, 0, +1
        pixels = palette[self.cells.astype(np.int64) + 1]
        header = f"P6\n{self.w_max} {self.h_max}\n255\n".encode("ascii")
        return header + pixels.tobytes()

    def to_csv(self) -> str:
        rows = (
            (w, h, int(self.differences[h - 1, w - 1]), int(self.cells[h - 1, w - 1]))
            for h in range(1, self.h_max + 1)
            for w in range(1, self.w_max + 1)
        )
        return csv_text(("w", "h", "difference", "sign"), rows)


def sign_map(w_max: int, h_max: int) -> SignGrid:
    """Signs of ``D(w, h)`` for ``1 <= w <= w_max``, ``1 <= h <= h_max``.

    One exact sweep: the row at time ``w + h`` serves the whole anti-diagonal.
    """
    if w_max < 1 or h_max < 1:
        raise DomainError("sign map needs positive dimensions")
    diffs = np.zeros((h_max, w_max), dtype=object)
    for row in iter_exact_rows(w_max + h_max, t_min=2):
        s = row.t
        for w in range(max(1, s - h_max), min(w_max, s - 1) + 1):
            h = s - w
            diffs[h - 1, w - 1] = row.scaled_real(h - w)
    cells = _exact_sign(diffs)
    return SignGrid(w_max, h_max, cells, diffs)


def _exact_sign(values: np.ndarray) -> np.ndarray:
    return np.vectorize(lambda v: (v > 0) - (v < 0), otypes=[np.int8])(values)


def _outside_region(w: int, h: int) -> bool:
    """``h / w > 3 + 2 sqrt 2``, decided in integers."""
    d = h - 3 * w
    return d > 0 and d * d > 8 * w * w


def predict_sign_outside(w: int, h: int) -> int:
    """Sign of ``D(w, h)`` for ``h / w > 3 + 2 sqrt 2``: ``+1`` iff ``w`` is odd."""
    DiagramSize(w, h)
    if not _outside_region(w, h):
        raise DomainError(f"{h}/{w} does not exceed 3 + 2*sqrt(2)")
    return 1 if w % 2 else -1


def predict_sign_middle(w: int, h: int) -> int:
    """Eventual sign of ``D(w, w + d)``: ``+1`` iff ``2w + d`` is 1, 2, 3 or 4 mod 8."""
    DiagramSize(w, h)
    return 1 if (2 * w + (h - w)) % 8 in (1, 2, 3, 4) else -1


def verify_young_outside(max_sum: int, w_max: int | None = None, h_max: int | None = None) -> VerificationReport:
    """Exhaustive exact check of the sign law for ``h/w > 3 + 2 sqrt 2``, ``w + h <= max_sum``."""
    report = VerificationReport(
        theorem="young-outside",
        domain={"max_sum": max_sum, "w_max": w_max, "h_max": h_max, "ratio": "h/w > 3+2*sqrt(2)"},
    )
    for row in iter_exact_rows(max_sum, t_min=2):
        s = row.t
        for w in range(1, s):
            h = s - w
            if (w_max and w > w_max) or (h_max and h > h_max):
                continue
            if not _outside_region(w, h):
                break  # the ratio only shrinks as w grows
            d = row.scaled_real(h - w)
            expected = 1 if w % 2 else -1
            report.checked += 1
            if (d > 0) - (d < 0) != expected:
                report.violations.append({"w": w, "h": h, "difference": d, "expected": expected})
    return report


def verify_young_middle(d_values, w_max: int) -> VerificationReport:
    """Exact scan of ``sgn D(w, w + d)`` against ``predict_sign_middle``.

    Per ``d`` the report records ``w0``: the largest violating ``w`` found
    (0 when there is none). A ``d`` whose last violation sits within four of
    ``w_max`` has not stabilized inside the scan and is listed as a violation.
    """
    d_values = sorted(set(int(d) for d in d_values))
    report = VerificationReport(theorem="young-middle", domain={"d": d_values, "w_max": w_max})
    last_bad = {d: 0 for d in d_values}
    counts = {d: 0 for d in d_values}
    t_top = 2 * w_max + max(d_values)
    for row in iter_exact_rows(t_top, t_min=2):
        s = row.t
        for d in d_values:
            if (s - d) % 2:
                continue
            w = (s - d) // 2
            if not 1 <= w <= w_max or w + d < 1:
                continue
            value = row.scaled_real(d)
            report.checked += 1
            if (value > 0) - (value < 0) != predict_sign_middle(w, w + d):
                last_bad[d] = w
                counts[d] += 1
    for d in d_values:
        report.thresholds[str(d)] = last_bad[d]
        report.notes[str(d)] = {"violations": counts[d]}
        if last_bad[d] > w_max - 4:
            report.violations.append({"d": d, "last_violation_w": last_bad[d], "reason": "no stabilization within the scan"})
    return report


def central_binomial_check(n: int) -> bool:
    """``D(2n+1, 2n+1) = (-1)^n C(2n, n)``."""
    return young_difference(2 * n + 1, 2 * n + 1) == (-1) ** n * math.comb(2 * n, n)
