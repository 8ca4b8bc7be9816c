"""Feynman-checkers wave function.

Three engines compute the same amplitude ``a(x, t, m, eps)``:

* ``brute_force_amplitude`` enumerates every checker path (oracle, t <= 24);
* ``exact_row`` / ``exact_path_sum`` run the path-sum recursion over Gaussian
  integers for ``m * eps = 1``;
* ``wave_row`` / ``iter_rows`` run the normalized floating-point recursion for
  any mass, up to t ~ 1e6.

Everything below works in lattice units (``eps = 1``) with the single
dimensionless mass ``mu = m * eps``; physical coordinates are converted by
``to_lattice``.

Recursion used by both DP engines. Split the path sum by the direction of the
last move: ``b+`` (last move up-right, even number of turns) is real and
``b-`` (last move up-left, odd number of turns) is ``-i`` times a real number.
Writing ``a = re + i*im``::

    im(x, t) = (im(x-1, t-1) - mu * re(x-1, t-1)) / sqrt(1 + mu^2)
    re(x, t) = (re(x+1, t-1) + mu * im(x+1, t-1)) / sqrt(1 + mu^2)

starting from ``a(1, 1) = i``. Rows are stored densely by ``j = (x + t) / 2``,
``j = 0..t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

ORACLE_T_MAX = 24


class DomainError(ValueError):
    """Input outside the domain of an operation."""


@dataclass(frozen=True)
class Params:
    """Particle mass ``m`` and lattice step ``eps``."""

    m: float = 1.0
    eps: float = 1.0

    def __post_init__(self):
        if not (self.m >= 0 and math.isfinite(self.m)):
            raise DomainError(f"mass must be finite and >= 0, got {self.m}")
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise DomainError(f"lattice step must be finite and > 0, got {self.eps}")

    @property
    def mu(self) -> float:
        """Dimensionless mass ``m * eps``; the only parameter lattice amplitudes see."""
        return self.m * self.eps

    @property
    def peak(self) -> float:
        """Velocity ``1 / sqrt(1 + mu^2)`` of the propagation fronts."""
        return 1.0 / math.sqrt(1.0 + self.mu**2)

    @classmethod
    def lattice(cls, mu: float) -> "Params":
        return cls(m=mu, eps=1.0)


@dataclass(frozen=True)
class LatticePoint:
    x: int
    t: int

    @property
    def in_support(self) -> bool:
        """True when at least one checker path reaches the point."""
        return self.t >= 1 and (self.x - self.t) % 2 == 0 and -self.t < self.x <= self.t


@dataclass(frozen=True)
class CheckerPath:
    """Sequence of moves, +1 for up-right and -1 for up-left."""

    moves: tuple

    def __post_init__(self):
        if not self.moves or self.moves[0] != 1:
            raise DomainError("a checker path starts with an up-right move")
        if any(m not in (1, -1) for m in self.moves):
            raise DomainError("moves must be +1 or -1")

    @property
    def end(self) -> LatticePoint:
        return LatticePoint(sum(self.moves), len(self.moves))

    @property
    def turns(self) -> int:
        return sum(1 for a, b in zip(self.moves, self.moves[1:]) if a != b)

    def weight(self, mu: float) -> complex:
        return (-1j * mu) ** self.turns


@dataclass(frozen=True)
class GaussianInteger:
    """Element ``re + i*im`` of Z[i] with arbitrary-precision parts."""

    re: int
    im: int

    def __add__(self, other):
        other = _as_gaussian(other)
        return GaussianInteger(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianInteger(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-_as_gaussian(other))

    def __mul__(self, other):
        o = _as_gaussian(other)
        return GaussianInteger(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __eq__(self, other):
        try:
            o = _as_gaussian(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(self.re, self.im)

    def conjugate(self) -> "GaussianInteger":
        return GaussianInteger(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def __str__(self):
        sign = "-" if self.im < 0 else "+"
        return f"{self.re} {sign} {abs(self.im)}i"


def _as_gaussian(value) -> GaussianInteger:
    if isinstance(value, GaussianInteger):
        return value
    if isinstance(value, (int, np.integer)):
        return GaussianInteger(int(value), 0)
    if isinstance(value, complex) and value.real.is_integer() and value.imag.is_integer():
        return GaussianInteger(int(value.real), int(value.imag))
    raise TypeError(f"cannot interpret {value!r} as a Gaussian integer")


I = GaussianInteger(0, 1)


def to_lattice(value: float, eps: float) -> int:
    """Convert a physical coordinate to lattice units, rejecting off-lattice input."""
    q = value / eps
    n = round(q)
    if abs(q - n) > 1e-9 * max(1.0, abs(q)):
        raise DomainError(f"{value} is not a multiple of the lattice step {eps}")
    return int(n)


# ---------------------------------------------------------------------------
# Oracle: literal path enumeration

@lru_cache(maxsize=32)
def turn_histogram(t: int) -> dict:
    """Map ``x -> counts`` where ``counts[k]`` is the number of checker paths
    from the origin to ``(x, t)`` with exactly ``k`` turns.

    Enumerates all ``2**(t-1)`` move sequences; exact integer counts.
    """
    if not 1 <= t <= ORACLE_T_MAX:
        raise DomainError(f"oracle enumeration needs 1 <= t <= {ORACLE_T_MAX}, got {t}")
    n_free = t - 1
    codes = np.arange(1 << n_free, dtype=np.int64)
    # bit i of the code (i = 0 is the second move) set means up-left
    left = np.zeros_like(codes)
    turns = np.zeros_like(codes)
    prev = np.zeros_like(codes)  # first move is up-right
    for i in range(n_free):
        bit = (codes >> i) & 1
        left += bit
        turns += bit ^ prev
        prev = bit
    ends = t - 2 * left
    out = {}
    for x in np.unique(ends):
        sel = turns[ends == x]
        out[int(x)] = np.bincount(sel, minlength=t).astype(object)
    return out


def _path_sum_from_counts(counts, mu: float) -> complex:
    re_terms, im_terms = [], []
    for k, c in enumerate(counts):
        if not c:
            continue
        mag = float(c) * mu**k
        # (-i)^k cycles through 1, -i, -1, i
        r = k % 4
        if r == 0:
            re_terms.append(mag)
        elif r == 1:
            im_terms.append(-mag)
        elif r == 2:
            re_terms.append(-mag)
        else:
            im_terms.append(mag)
    return complex(math.fsum(re_terms), math.fsum(im_terms))


def brute_force_amplitude(p: LatticePoint, params: Params) -> complex:
    """Amplitude ``a(x, t)`` by summing ``(-i mu)^turns`` over all checker paths."""
    if not 1 <= p.t <= ORACLE_T_MAX:
        raise DomainError(f"oracle enumeration needs 1 <= t <= {ORACLE_T_MAX}, got t={p.t}")
    if not p.in_support:
        return 0j
    counts = turn_histogram(p.t)[p.x]
    mu = params.mu
    if mu == 0:
        s = complex(counts[0])
    else:
        s = _path_sum_from_counts(counts, mu)
    return 1j * s * (1.0 + mu * mu) ** ((1 - p.t) / 2)


def brute_force_path_sum(p: LatticePoint) -> GaussianInteger:
    """Unnormalized path sum for ``mu = 1`` by enumeration, exactly in Z[i]."""
    if not p.in_support:
        return GaussianInteger(0, 0)
    counts = turn_histogram(p.t)[p.x]
    powers = (GaussianInteger(1, 0), GaussianInteger(0, -1), GaussianInteger(-1, 0), GaussianInteger(0, 1))
    total = GaussianInteger(0, 0)
    for k, c in enumerate(counts):
        total = total + powers[k % 4] * int(c)
    return total


def physical_brute_force_amplitude(x: float, t: float, m: float, eps: float) -> complex:
    """Evaluate the path sum directly on the lattice ``eps Z^2``.

    Steps are ``(+-eps, eps)``, weights ``(-i m eps)^turns`` and the prefactor
    ``(1 + m^2 eps^2)^((1 - t/eps)/2)``; no rescaling to unit step is used.
    """
    n_moves = round(t / eps)
    if abs(n_moves * eps - t) > 1e-9 * max(1.0, abs(t)) or not 1 <= n_moves <= ORACLE_T_MAX:
        raise DomainError(f"t={t} must be a positive multiple of eps={eps} with t/eps <= {ORACLE_T_MAX}")
    codes = np.arange(1 << (n_moves - 1), dtype=np.int64)
    pos = np.full(codes.shape, eps)
    turns = np.zeros_like(codes)
    prev = np.zeros_like(codes)
    for i in range(n_moves - 1):
        bit = (codes >> i) & 1
        pos += np.where(bit == 1, -eps, eps)
        turns += bit ^ prev
        prev = bit
    hits = turns[np.abs(pos - x) < eps / 2]
    counts = np.bincount(hits, minlength=n_moves).astype(object)
    s = _path_sum_from_counts(counts, m * eps) if m * eps else complex(counts[0])
    return (1 + (m * eps) ** 2) ** ((1 - t / eps) / 2) * 1j * s


# ---------------------------------------------------------------------------
# Float engine

@dataclass(frozen=True, eq=False)
class WaveRow:
    """All amplitudes at time ``t``; ``re[j] + 1j*im[j]`` is ``a(-t + 2j, t)``."""

    t: int
    mu: float
    re: np.ndarray = field(repr=False)
    im: np.ndarray = field(repr=False)

    @property
    def xs(self) -> np.ndarray:
        return np.arange(-self.t, self.t + 1, 2)

    def index(self, x: int) -> int | None:
        if (x + self.t) % 2 or not -self.t <= x <= self.t:
            return None
        return (x + self.t) // 2

    def amplitude(self, x: int) -> complex:
        j = self.index(x)
        return 0j if j is None else complex(float(self.re[j]), float(self.im[j]))

    def real(self, x: int):
        """``Re a(x, t)`` as a scalar of the row's dtype."""
        j = self.index(x)
        return self.re.dtype.type(0) if j is None else self.re[j]

    def imag(self, x: int):
        j = self.index(x)
        return self.im.dtype.type(0) if j is None else self.im[j]

    @property
    def values(self) -> np.ndarray:
        return self.re + 1j * self.im

    def probabilities(self) -> np.ndarray:
        return self.re**2 + self.im**2

    def total_probability(self) -> float:
        return math.fsum(self.probabilities())


class _FloatSweep:
    """Mutable DP state advanced one time step at a time."""

    def __init__(self, mu: float, capacity: int, dtype=np.float64):
        self.mu = float(mu)
        one = dtype(1)
        self.scale = one / np.sqrt(one + dtype(mu) * dtype(mu))
        mu = dtype(mu)
        self._mu = mu
        n = capacity + 2
        self._re, self._im = np.zeros(n, dtype), np.zeros(n, dtype)
        self._re2, self._im2 = np.zeros(n, dtype), np.zeros(n, dtype)
        self._tmp = np.zeros(n, dtype)
        self._im[1] = 1.0
        self.t = 1

    def advance(self):
        t, mu, s = self.t + 1, self._mu, self.scale
        re, im = self._re, self._im
        k = t  # previous row has t entries (j = 0..t-1)
        tmp = self._tmp[:k]
        np.multiply(re[:k], -mu, out=tmp)
        tmp += im[:k]
        np.multiply(tmp, s, out=self._im2[1 : k + 1])
        self._im2[0] = 0.0
        np.multiply(im[:k], mu, out=tmp)
        tmp += re[:k]
        np.multiply(tmp, s, out=self._re2[:k])
        self._re2[k] = 0.0
        self._re, self._re2 = self._re2, self._re
        self._im, self._im2 = self._im2, self._im
        self.t = t

    def snapshot(self) -> WaveRow:
        n = self.t + 1
        re, im = self._re[:n].copy(), self._im[:n].copy()
        re.flags.writeable = False
        im.flags.writeable = False
        return WaveRow(self.t, self.mu, re, im)


def rows_at(times: Iterable[int], params: Params, dtype=np.float64) -> Iterator[WaveRow]:
    """Yield the rows at the requested times (ascending) from a single sweep.

    ``dtype=np.longdouble`` runs the same recursion in extended precision.
    """
    wanted = sorted(set(int(t) for t in times))
    if not wanted:
        return
    if wanted[0] < 1:
        raise DomainError("rows exist for t >= 1 only")
    sweep = _FloatSweep(params.mu, wanted[-1], dtype)
    for t in wanted:
        while sweep.t < t:
            sweep.advance()
        yield sweep.snapshot()


def iter_rows(t_max: int, params: Params, t_min: int = 1, dtype=np.float64) -> Iterator[WaveRow]:
    """Yield every row ``t_min <= t <= t_max`` in order."""
    return rows_at(range(max(t_min, 1), t_max + 1), params, dtype)


def wave_row(t: int, params: Params, dtype=np.float64) -> WaveRow:
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    return next(rows_at([t], params, dtype))


# ---------------------------------------------------------------------------
# Exact engine, mu = 1

@dataclass(frozen=True, eq=False)
class ExactRow:
    """Exact row for ``mu = 1``: ``a(-t + 2j, t) = 2^((1-t)/2) (re[j] + i im[j])``.

    The unnormalized path sum is ``S = im[j] - i re[j]`` so that ``a = i 2^((1-t)/2) S``.
    """

    t: int
    re: np.ndarray = field(repr=False)
    im: np.ndarray = field(repr=False)

    def index(self, x: int) -> int | None:
        if (x + self.t) % 2 or not -self.t <= x <= self.t:
            return None
        return (x + self.t) // 2

    def scaled_real(self, x: int) -> int:
        """``2^((t-1)/2) Re a(x, t)`` as an exact integer."""
        j = self.index(x)
        return 0 if j is None else int(self.re[j])

    def scaled_imag(self, x: int) -> int:
        """``2^((t-1)/2) Im a(x, t)`` as an exact integer."""
        j = self.index(x)
        return 0 if j is None else int(self.im[j])

    def path_sum(self, x: int) -> GaussianInteger:
        return GaussianInteger(self.scaled_imag(x), -self.scaled_real(x))

    def amplitude(self, x: int) -> complex:
        f = 2.0 ** ((1 - self.t) / 2)
        return complex(self.scaled_real(x) * f, self.scaled_imag(x) * f)

    @property
    def xs(self) -> np.ndarray:
        return np.arange(-self.t, self.t + 1, 2)


def iter_exact_rows(t_max: int, t_min: int = 1) -> Iterator[ExactRow]:
    """Yield exact ``mu = 1`` rows for ``t_min <= t <= t_max`` from one sweep."""
    re = np.array([0, 0], dtype=object)
    im = np.array([0, 1], dtype=object)
    t = 1
    while t <= t_max:
        if t >= t_min:
            yield ExactRow(t, re, im)
        new_re = np.empty(t + 2, dtype=object)
        new_im = np.empty(t + 2, dtype=object)
        new_im[0] = 0
        new_im[1:] = im - re
        new_re[:-1] = re + im
        new_re[-1] = 0
        re, im = new_re, new_im
        t += 1


def exact_row(t: int) -> ExactRow:
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    return next(iter_exact_rows(t, t_min=t))


def exact_path_sum(p: LatticePoint) -> GaussianInteger:
    """Path sum ``S(x, t) = sum (-i)^turns`` exactly, for ``m * eps = 1``."""
    if p.t < 1 or (p.x - p.t) % 2 or not -p.t < p.x <= p.t:
        raise DomainError(f"no checker path reaches ({p.x}, {p.t})")
    return exact_row(p.t).path_sum(p.x)


# ---------------------------------------------------------------------------
# Derived quantities (lattice units)

def a1_tilde(x: int, t: int, params: Params) -> float:
    """``Re a(x, t + 1)``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return float(wave_row(t + 1, params).real(x))


def a2_tilde(x: int, t: int, params: Params) -> float:
    """``Im a(x + 1, t + 1)``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return float(wave_row(t + 1, params).imag(x + 1))


def a1_tilde_numerator(x: int, t: int) -> int:
    """Integer ``N`` with ``a1_tilde(x, t) = N * 2^(-t/2)`` for ``m = eps = 1``.

    ``N = -Im S(x, t + 1)``.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return exact_row(t + 1).scaled_real(x)


def a2_tilde_numerator(x: int, t: int) -> int:
    """Integer ``N`` with ``a2_tilde(x, t) = N * 2^(-t/2)`` for ``m = eps = 1``."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return exact_row(t + 1).scaled_imag(x + 1)


def probability(x: int, t: int, params: Params) -> float:
    return abs(wave_row(t, params).amplitude(x)) ** 2


# ---------------------------------------------------------------------------
# Physical coordinates

def amplitude(x: float, t: float, params: Params, engine: str = "float") -> complex:
    """``a(x, t, m, eps)`` for physical coordinates, via the rescaling identity."""
    xl, tl = to_lattice(x, params.eps), to_lattice(t, params.eps)
    if tl < 1:
        raise DomainError("the wave function is defined for t > 0")
    if engine == "oracle":
        return brute_force_amplitude(LatticePoint(xl, tl), params)
    if engine == "exact":
        if params.mu != 1:
            raise DomainError(f"the exact engine needs m*eps = 1, got {params.mu}")
        return exact_row(tl).amplitude(xl)
    if engine == "float":
        return wave_row(tl, params).amplitude(xl)
    raise DomainError(f"unknown engine {engine!r}")


def rescale_check(x: float, t: float, params: Params, tol: float = 1e-12) -> bool:
    """Compare the path sum on ``eps Z^2`` with the lattice-unit engine at ``mu = m*eps``."""
    xl, tl = to_lattice(x, params.eps), to_lattice(t, params.eps)
    lhs = physical_brute_force_amplitude(x, t, params.m, params.eps)
    rhs = wave_row(tl, Params.lattice(params.mu)).amplitude(xl)
    return abs(lhs - rhs) <= tol
