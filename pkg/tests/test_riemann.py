import math

import numpy as np
import pytest

from nrxx.riemann import GAMMA, EulerState, solve_riemann

G = GAMMA
TUBE_L = EulerState(0.445, 0.698 * math.sqrt(2), 0.445 * 13.21)
TUBE_R = EulerState(0.5, 0.0, 0.5 * 1.9)


def conserved_flux(rho, u, p, speed):
    """Mass, momentum and energy fluxes in a frame moving with ``speed``."""
    E = p / (G - 1) + 0.5 * rho * u * u
    return np.array([rho * (u - speed), rho * u * (u - speed) + p, E * (u - speed) + p * u])


def test_equal_states_no_waves():
    s = EulerState(1.0, 0.3, 2.0)
    sol = solve_riemann(s, s)
    assert sol.p_star == pytest.approx(2.0, rel=1e-12)
    assert sol.u_star == pytest.approx(0.3, abs=1e-12)
    assert sol.rho_star_left == pytest.approx(1.0, rel=1e-12)


def test_shock_tube_structure():
    sol = solve_riemann(TUBE_L, TUBE_R)
    speeds = sol.wave_speeds()
    assert set(speeds) == {"left_head", "left_tail", "contact", "right_shock"}
    assert speeds["left_head"] < speeds["left_tail"] < speeds["contact"] < speeds["right_shock"]
    assert TUBE_R.p < sol.p_star < TUBE_L.p


def test_right_shock_rankine_hugoniot():
    sol = solve_riemann(TUBE_L, TUBE_R)
    S = sol.wave_speeds()["right_shock"]
    ahead = conserved_flux(TUBE_R.rho, TUBE_R.u, TUBE_R.p, S)
    behind = conserved_flux(sol.rho_star_right, sol.u_star, sol.p_star, S)
    # in the shock frame the jump conditions say the fluxes match
    np.testing.assert_allclose(behind, ahead, rtol=1e-10, atol=1e-10)


def test_left_rarefaction_invariants():
    sol = solve_riemann(TUBE_L, TUBE_R)
    L = TUBE_L
    assert sol.p_star / sol.rho_star_left**G == pytest.approx(L.p / L.rho**G, rel=1e-12)
    c_star = math.sqrt(G * sol.p_star / sol.rho_star_left)
    assert sol.u_star + 2 * c_star / (G - 1) == pytest.approx(L.u + 2 * L.c / (G - 1), rel=1e-12)
    # inside the fan the same invariants hold pointwise
    sp = sol.wave_speeds()
    xi = np.linspace(sp["left_head"], sp["left_tail"], 7)[1:-1]
    rho, u, p = sol.sample(xi)
    np.testing.assert_allclose(p / rho**G, L.p / L.rho**G, rtol=1e-12)
    c = np.sqrt(G * p / rho)
    np.testing.assert_allclose(u + 2 * c / (G - 1), L.u + 2 * L.c / (G - 1), rtol=1e-12)
    np.testing.assert_allclose(u - c, xi, atol=1e-12)


def test_sample_piecewise_states():
    sol = solve_riemann(TUBE_L, TUBE_R)
    sp = sol.wave_speeds()
    rho, u, p = sol.sample([sp["left_head"] - 1, sp["contact"] - 1e-9, sp["contact"] + 1e-9, sp["right_shock"] + 1])
    np.testing.assert_allclose(rho, [TUBE_L.rho, sol.rho_star_left, sol.rho_star_right, TUBE_R.rho])
    np.testing.assert_allclose(p[1:3], sol.p_star)
    np.testing.assert_allclose(u[1:3], sol.u_star)


def test_fan_continuous_at_edges():
    sol = solve_riemann(TUBE_L, TUBE_R)
    sp = sol.wave_speeds()
    for edge in (sp["left_head"], sp["left_tail"]):
        a = np.array(sol.sample(edge - 1e-10)).ravel()
        b = np.array(sol.sample(edge + 1e-10)).ravel()
        np.testing.assert_allclose(a, b, rtol=1e-8)


def test_symmetric_collision():
    sol = solve_riemann(EulerState(1.0, 1.0, 1.0), EulerState(1.0, -1.0, 1.0))
    assert sol.u_star == pytest.approx(0.0, abs=1e-12)
    sp = sol.wave_speeds()
    assert sp["left_shock"] == pytest.approx(-sp["right_shock"], rel=1e-12)
    assert sol.rho_star_left == pytest.approx(sol.rho_star_right, rel=1e-12)


def test_two_rarefactions_mirror():
    a, b = EulerState(1.0, -0.5, 1.0), EulerState(1.0, 0.5, 1.0)
    sol = solve_riemann(a, b)
    assert sol.u_star == pytest.approx(0.0, abs=1e-12)
    assert sol.p_star < 1.0
    rho, u, p = sol.sample([-0.3, 0.3])
    assert rho[0] == pytest.approx(rho[1], rel=1e-12)
    assert u[0] == pytest.approx(-u[1], abs=1e-12)


def test_vacuum_rejected():
    with pytest.raises(ValueError, match="vacuum"):
        solve_riemann(EulerState(1.0, -20.0, 1.0), EulerState(1.0, 20.0, 1.0))
