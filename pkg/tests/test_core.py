import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from checkers.core import (
    CheckerPath,
    DomainError,
    GaussianInteger,
    LatticePoint,
    Params,
    a1_tilde,
    a1_tilde_numerator,
    a2_tilde,
    a2_tilde_numerator,
    amplitude,
    brute_force_amplitude,
    brute_force_path_sum,
    exact_path_sum,
    exact_row,
    iter_exact_rows,
    physical_brute_force_amplitude,
    rescale_check,
    rows_at,
    to_lattice,
    turn_histogram,
    wave_row,
)

UNIT = Params()


# --- oracle values --------------------------------------------------------

@pytest.mark.parametrize("x, expected", [(3, 0.5j), (-1, 0.5), (1, 0.5 - 0.5j), (5, 0)])
def test_oracle_boundary_values_at_t3(x, expected):
    assert brute_force_amplitude(LatticePoint(x, 3), UNIT) == pytest.approx(expected, abs=1e-15)


def test_oracle_out_of_cone_is_exactly_zero_for_any_mass():
    for mu in (0.0, 0.3, 1.0, 2.5):
        assert brute_force_amplitude(LatticePoint(5, 3), Params.lattice(mu)) == 0
        assert brute_force_amplitude(LatticePoint(-3, 3), Params.lattice(mu)) == 0
        assert brute_force_amplitude(LatticePoint(0, 3), Params.lattice(mu)) == 0


def test_oracle_rejects_large_t():
    with pytest.raises(DomainError):
        brute_force_amplitude(LatticePoint(1, 25), UNIT)
    with pytest.raises(DomainError):
        brute_force_amplitude(LatticePoint(0, 0), UNIT)


def test_turn_histogram_counts_all_paths():
    for t in range(1, 13):
        hist = turn_histogram(t)
        assert sum(int(c.sum()) for c in hist.values()) == 2 ** (t - 1)
        # paths to (x, t) are C(t - 1, (t - x) / 2)
        for x, counts in hist.items():
            assert int(counts.sum()) == math.comb(t - 1, (t - x) // 2)


def test_checker_path_turns_and_weight():
    path = CheckerPath((1, -1, -1, 1, 1, 1, -1))
    assert path.turns == 3
    assert path.end == LatticePoint(1, 7)
    assert path.weight(1.0) == pytest.approx((-1j) ** 3)
    with pytest.raises(DomainError):
        CheckerPath((-1, 1))
    with pytest.raises(DomainError):
        CheckerPath((1, 0))


def test_path_enumeration_matches_turn_histogram():
    # literal path objects versus the vectorized histogram at t = 9
    import itertools

    t, mu = 9, 0.7
    total = {}
    for tail in itertools.product((1, -1), repeat=t - 1):
        p = CheckerPath((1,) + tail)
        total[p.end.x] = total.get(p.end.x, 0) + p.weight(mu)
    norm = 1j * (1 + mu * mu) ** ((1 - t) / 2)
    for x, s in total.items():
        assert brute_force_amplitude(LatticePoint(x, t), Params.lattice(mu)) == pytest.approx(norm * s, abs=1e-14)


# --- exact engine ---------------------------------------------------------

def test_exact_path_sum_small_values():
    # frozen from brute-force enumeration over Z[i]
    assert exact_path_sum(LatticePoint(3, 3)) == GaussianInteger(1, 0)
    assert exact_path_sum(LatticePoint(1, 3)) == GaussianInteger(-1, -1)
    assert exact_path_sum(LatticePoint(-1, 3)) == GaussianInteger(0, -1)
    with pytest.raises(DomainError):
        exact_path_sum(LatticePoint(0, 3))
    # x = 0, t = 4 has matching parity and is a valid endpoint
    assert exact_path_sum(LatticePoint(0, 4)) == brute_force_path_sum(LatticePoint(0, 4))
    with pytest.raises(DomainError):
        exact_path_sum(LatticePoint(5, 3))


def test_exact_path_sum_matches_oracle_in_gaussian_integers():
    for t in range(1, 17):
        row = exact_row(t)
        for x in range(-t + 2, t + 1, 2):
            assert row.path_sum(x) == brute_force_path_sum(LatticePoint(x, t))


def test_exact_amplitude_formula():
    for t in (3, 7, 12):
        row = exact_row(t)
        for x in range(-t + 2, t + 1, 2):
            s = complex(row.path_sum(x))
            assert row.amplitude(x) == pytest.approx(1j * 2 ** ((1 - t) / 2) * s, abs=1e-15)


def test_exact_boundary_values():
    # 2^((t-1)/2) a at the three boundary points, m = eps = 1
    for row in iter_exact_rows(300, t_min=2):
        t = row.t
        assert (row.scaled_real(t), row.scaled_imag(t)) == (0, 1)
        assert (row.scaled_real(2 - t), row.scaled_imag(2 - t)) == (1, 0)
        assert (row.scaled_real(t - 2), row.scaled_imag(t - 2)) == (1, 2 - t)
        assert row.scaled_real(-t) == row.scaled_imag(-t) == 0


# --- float engine ---------------------------------------------------------

def test_float_engine_matches_oracle_at_t20():
    rng = random.Random(7)
    for _ in range(3):
        params = Params.lattice(rng.uniform(1e-3, 1.0))
        row = wave_row(20, params)
        for x in range(-18, 21, 2):
            assert abs(row.amplitude(x) - brute_force_amplitude(LatticePoint(x, 20), params)) <= 1e-12


def test_float_engine_matches_exact_engine():
    for row, ex in zip(float_rows(200), iter_exact_rows(200)):
        assert max(abs(row.amplitude(x) - ex.amplitude(x)) for x in range(-ex.t, ex.t + 1, 2)) <= 1e-10


def float_rows(t_max):
    return rows_at(range(1, t_max + 1), UNIT)


def test_light_cone_and_parity_are_exact_zeros():
    row = wave_row(11, Params.lattice(0.4))
    assert row.amplitude(-11) == 0
    assert row.amplitude(13) == 0
    assert row.amplitude(0) == 0  # wrong parity
    assert row.amplitude(-13) == 0


def test_unitarity():
    for mu in (0.1, 0.5, 1.0, 3.0):
        assert abs(wave_row(1000, Params.lattice(mu)).total_probability() - 1) <= 1e-10


def test_massless_amplitude_is_i_on_the_right_ray():
    row = wave_row(9, Params(m=0.0))
    for x in range(-7, 10, 2):
        assert row.amplitude(x) == (1j if x == 9 else 0)
    assert brute_force_amplitude(LatticePoint(9, 9), Params(m=0.0)) == 1j
    assert brute_force_amplitude(LatticePoint(7, 9), Params(m=0.0)) == 0


def test_rows_are_read_only_and_independent():
    rows = list(rows_at([3, 5], UNIT))
    with pytest.raises(ValueError):
        rows[0].re[0] = 1.0
    assert rows[0].t == 3 and rows[1].t == 5
    assert rows[0].amplitude(3) == pytest.approx(0.5j)


def test_extended_precision_sweep_agrees_with_double():
    params = Params.lattice(0.37)
    a = wave_row(400, params)
    b = wave_row(400, params, dtype=np.longdouble)
    assert b.re.dtype == np.longdouble
    assert np.max(np.abs(a.re - b.re.astype(float))) < 1e-13


def test_params_validation():
    with pytest.raises(DomainError):
        Params(m=-1)
    with pytest.raises(DomainError):
        Params(eps=0)
    assert Params(m=2, eps=0.5).mu == 1
    assert Params().peak == pytest.approx(1 / math.sqrt(2))


# --- derived quantities ---------------------------------------------------

def test_a1_tilde_middle_values():
    assert a1_tilde(0, 5, UNIT) == pytest.approx(-1 / (2 * math.sqrt(2)), abs=1e-15)
    assert a1_tilde(0, 7, UNIT) == pytest.approx(0, abs=1e-15)
    assert a1_tilde(2, 5, UNIT) == pytest.approx(-1 / (2 * math.sqrt(2)), abs=1e-15)
    assert a1_tilde_numerator(0, 7) == 0
    assert a1_tilde_numerator(0, 5) == -2


def test_a2_tilde_values():
    assert a2_tilde(2, 2, UNIT) == pytest.approx(0.5, abs=1e-15)
    assert a2_tilde(0, 2, UNIT) == pytest.approx(-0.5, abs=1e-15)
    assert a2_tilde_numerator(2, 2) == 1
    for x in range(3, 9):
        assert a2_tilde(x, 2, UNIT) == 0


def test_derived_quantities_reject_negative_time():
    with pytest.raises(DomainError):
        a1_tilde(0, -1, UNIT)
    with pytest.raises(DomainError):
        a2_tilde(0, -1, UNIT)


# --- rescaling ------------------------------------------------------------

def test_rescale_example():
    params = Params(m=2, eps=0.5)
    assert rescale_check(1.5, 1.5, params)
    assert amplitude(1.5, 1.5, params) == pytest.approx(0.5j)
    assert amplitude(1.5, 1.5, params, engine="exact") == pytest.approx(0.5j)
    assert amplitude(1.5, 1.5, params, engine="oracle") == pytest.approx(0.5j)


def test_rescale_rejects_off_lattice_input():
    with pytest.raises(DomainError):
        rescale_check(0.2, 1.0, Params(m=1, eps=0.5))
    with pytest.raises(DomainError):
        to_lattice(0.3, 0.25)


def test_rescale_random_points():
    rng = random.Random(3)
    for _ in range(100):
        eps = rng.choice((0.25, 0.5, 1.0, 2.0))
        m = rng.uniform(0.01, 1.0) / eps
        t = rng.randint(1, 20)
        x = rng.randrange(-t + 2, t + 1, 2)
        assert rescale_check(x * eps, t * eps, Params(m=m, eps=eps))


def test_physical_oracle_prefactor():
    # a(t, t) = i (1 + m^2 eps^2)^((1 - t/eps)/2)
    m, eps, t = 0.8, 0.5, 3.0
    expected = 1j * (1 + (m * eps) ** 2) ** ((1 - t / eps) / 2)
    assert physical_brute_force_amplitude(t, t, m, eps) == pytest.approx(expected, abs=1e-15)


# --- Gaussian integers ----------------------------------------------------

def test_gaussian_integer_arithmetic():
    a, b = GaussianInteger(3, -2), GaussianInteger(-1, 5)
    assert a + b == GaussianInteger(2, 3)
    assert a - b == GaussianInteger(4, -7)
    assert a * b == GaussianInteger(7, 17)
    assert a.conjugate() == GaussianInteger(3, 2)
    assert a.norm() == 13
    assert 2 * a == GaussianInteger(6, -4)
    assert complex(a) == 3 - 2j
    assert str(a) == "3 - 2i"
    assert len({a, GaussianInteger(3, -2)}) == 1


def test_gaussian_integer_is_arbitrary_precision():
    big = GaussianInteger(2**200, 1)
    assert (big * big.conjugate()).re == 2**400 + 1


@given(st.integers(-10**30, 10**30), st.integers(-10**30, 10**30),
       st.integers(-10**30, 10**30), st.integers(-10**30, 10**30))
def test_gaussian_norm_is_multiplicative(a, b, c, d):
    u, v = GaussianInteger(a, b), GaussianInteger(c, d)
    assert (u * v).norm() == u.norm() * v.norm()
    assert u * v == v * u


# --- properties -----------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.floats(1e-3, 1.0), st.integers(1, 14), st.data())
def test_float_engine_equals_oracle_property(mu, t, data):
    x = data.draw(st.integers(-t + 2, t).filter(lambda v: (v - t) % 2 == 0))
    params = Params.lattice(mu)
    assert abs(wave_row(t, params).amplitude(x) - brute_force_amplitude(LatticePoint(x, t), params)) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 5.0), st.integers(1, 400))
def test_unitarity_property(mu, t):
    assert abs(wave_row(t, Params.lattice(mu)).total_probability() - 1) <= 1e-10
