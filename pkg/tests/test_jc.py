import math

import numpy as np
import pytest
from scipy.linalg import expm

from osmgsc.basis import EXCITED, GROUND
from osmgsc.jc import (JCParams, excitation_number, ground_amplitude, jc_block, jc_block_angles,
                       jc_exact_osmgsc_impossible, jc_f_k, jc_hamiltonian,
                       jc_propagator_analytic, jc_success_bound)
from osmgsc.numerics import expm_hermitian
from osmgsc.states import ThermalSpec, cooling_success, thermal_state

PAPER = JCParams(omega=1.0, delta=1.0, g=0.2, n_max=12)


def resonant_f(t, g, k):
    return sum(np.cos(g * math.sqrt(n) * t) ** 2 for n in range(1, k + 1))


def test_hamiltonian_elements():
    h = jc_hamiltonian(PAPER)
    d = PAPER.dims
    assert h[d.flat(0, EXCITED), d.flat(1, GROUND)] == pytest.approx(0.2)
    assert h[d.flat(0, GROUND), d.flat(0, GROUND)] == pytest.approx(-0.5)
    assert h[d.flat(2, EXCITED), d.flat(3, GROUND)] == pytest.approx(0.2 * math.sqrt(3))
    assert np.array_equal(h, h.conj().T)


def test_hamiltonian_conserves_excitations():
    p = JCParams(1.0, 1.3, 0.4, 10)
    h, n = jc_hamiltonian(p), excitation_number(p)
    assert np.max(np.abs(h @ n - n @ h)) <= 1e-12


def test_block_angles_examples():
    a = jc_block_angles(1, PAPER)
    assert a.eps_plus == pytest.approx(0.7) and a.eps_minus == pytest.approx(0.3)
    assert a.theta_n == math.pi / 4
    for delta in (0.4, 1.7):
        p = JCParams(1.0, delta, 0.0)
        a = jc_block_angles(3, p)
        assert a.theta_n == 0
        assert a.eps_plus == pytest.approx(2.5 + abs(delta - 1) / 2)
        assert a.eps_minus == pytest.approx(2.5 - abs(delta - 1) / 2)


@pytest.mark.parametrize("delta", [0.2, 0.9, 1.1, 3.0])
def test_block_angle_branch(delta):
    p = JCParams(1.0, delta, 0.01)
    theta = jc_block_angles(2, p).theta_n
    assert math.copysign(1, theta) == math.copysign(1, delta - 1)
    assert -math.pi / 4 < theta <= math.pi / 4
    assert math.tan(2 * theta) == pytest.approx(2 * 0.01 * math.sqrt(2) / (delta - 1))


@pytest.mark.parametrize("delta", [1.0, 0.3, 1.8])
def test_block_matches_2x2_expm(delta):
    p = JCParams(1.0, delta, 0.35)
    for n in (1, 2, 5):
        w, g = p.omega, p.g
        hb = np.array([[w * (n - 1) + delta / 2, g * math.sqrt(n)],
                       [g * math.sqrt(n), w * n - delta / 2]])
        for t in (0.7, 13.0):
            assert np.allclose(jc_block(n, t, p), expm(-1j * hb * t), atol=1e-12)


def test_resonant_ground_amplitude_is_cosine():
    t = np.linspace(0, 200, 401)
    for n in (1, 2, 3, 7):
        assert np.allclose(np.abs(ground_amplitude(n, t, PAPER)) ** 2,
                           np.cos(0.2 * math.sqrt(n) * t) ** 2, atol=1e-12)


def test_analytic_propagator_entries():
    assert np.allclose(jc_propagator_analytic(0.0, PAPER).matrix, np.eye(24))
    t = 37.0
    u = jc_propagator_analytic(t, PAPER)
    assert u.entry(0, GROUND, 0, GROUND) == pytest.approx(np.exp(1j * 0.5 * t))
    for n in range(1, 12):
        a = jc_block_angles(n, PAPER)
        c2, s2 = math.cos(a.theta_n) ** 2, math.sin(a.theta_n) ** 2
        gg = np.exp(-1j * a.eps_plus * t) * s2 + np.exp(-1j * a.eps_minus * t) * c2
        ee = np.exp(-1j * a.eps_plus * t) * c2 + np.exp(-1j * a.eps_minus * t) * s2
        assert u.entry(n, GROUND, n, GROUND) == pytest.approx(gg, abs=1e-13)
        assert u.entry(n - 1, EXCITED, n - 1, EXCITED) == pytest.approx(ee, abs=1e-13)
        # 2x2 unitarity of the block
        coupling = u.entry(n - 1, EXCITED, n, GROUND)
        assert abs(gg) ** 2 + abs(coupling) ** 2 == pytest.approx(1, abs=1e-13)


@pytest.mark.parametrize("delta", [1.0, 0.6, 1.5])
@pytest.mark.parametrize("t", [1.0, 50.0, 150.0, 200.0])
def test_analytic_matches_numeric(delta, t):
    p = JCParams(1.0, delta, 0.2, 12)
    diff = jc_propagator_analytic(t, p).matrix - expm_hermitian(jc_hamiltonian(p), t)
    assert np.max(np.abs(diff)) <= 1e-8


def test_ground_phase_unit_modulus():
    t = np.linspace(0, 500, 1001)
    assert np.allclose(np.abs(ground_amplitude(0, t, PAPER)), 1)


def test_f_k_examples():
    assert jc_f_k(150.0, PAPER, 3) == pytest.approx(0.04, abs=0.005)
    assert jc_f_k(0.0, PAPER, 5) == pytest.approx(5)
    t = np.linspace(0, 300, 1201)
    for k in (1, 3, 6):
        assert np.allclose(jc_f_k(t, PAPER, k), resonant_f(t, 0.2, k), atol=1e-12)
    with pytest.raises(ValueError):
        jc_f_k(1.0, PAPER, 12)


def test_f_k_matches_propagator_entries():
    t = 77.7
    u = jc_propagator_analytic(t, PAPER)
    direct = sum(abs(u.entry(n, GROUND, n, GROUND)) ** 2 for n in range(1, 4))
    assert jc_f_k(t, PAPER, 3) == pytest.approx(direct / abs(u.entry(0, 0, 0, 0)) ** 2, abs=1e-13)


def test_f_k_nondecreasing_in_k():
    t = np.random.default_rng(3).uniform(0, 500, 300)
    for k in range(1, 10):
        assert np.all(jc_f_k(t, PAPER, k) <= jc_f_k(t, PAPER, k + 1))


def test_success_bound_value():
    x = math.exp(-1)
    f3 = float(resonant_f(150.0, 0.2, 3))
    expected = 1 - x * (f3 + (1 - x) ** -2 * x ** 3)
    assert jc_success_bound(150.0, PAPER, 1.0, 3) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(0.9396, abs=1e-4)


def test_success_bound_cold_limit():
    assert jc_success_bound(150.0, PAPER, 1e-3, 3) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        jc_success_bound(150.0, PAPER, 0.0, 3)


@pytest.mark.parametrize("temp", [0.5, 1.0, 2.0])
def test_bound_below_simulated_success(temp):
    rng = np.random.default_rng(int(temp * 10))
    big = JCParams(1.0, 1.0, 0.2, 40)
    rho = thermal_state(ThermalSpec(1.0, temp, big.n_max))
    for t in rng.uniform(0, 200, 20):
        p_c = cooling_success(jc_propagator_analytic(t, big), rho)
        assert p_c >= jc_success_bound(t, PAPER, temp, 3)


def test_exact_cooling_impossible_scan():
    # the sampled minimum is the brute-force minimum of the closed form on the same grid
    t = np.linspace(0, 500, 50000)
    brute = float(np.min(resonant_f(t, 0.2, 3)))
    got = jc_exact_osmgsc_impossible(PAPER, 3, (0, 500), 50000)
    assert got == pytest.approx(brute, abs=1e-12)
    assert 0.005 < got < 0.04
    near_150 = jc_exact_osmgsc_impossible(PAPER, 3, (140, 160), 20001)
    assert near_150 == pytest.approx(0.01413, abs=2e-4)


def test_single_block_reaches_zero():
    g = 0.2
    for j in range(3):
        t0 = math.pi * (2 * j + 1) / (2 * g)
        assert jc_f_k(t0, PAPER, 1) <= 1e-28
    assert jc_exact_osmgsc_impossible(PAPER, 1, (0, 100), 100001) <= 1e-6


def test_uncoupled_never_cools():
    p = JCParams(1.0, 1.0, 0.0, 8)
    assert np.allclose(jc_f_k(np.linspace(0, 100, 51), p, 4), 4)
