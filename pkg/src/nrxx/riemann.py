"""Exact Riemann solver for the 1D Euler equations of an ideal gas.

Reference solution for the near-continuum shock tube. A BGK gas with three
velocity dimensions has gamma = 5/3 and p = rho * theta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

GAMMA = 5.0 / 3.0


@dataclass(frozen=True)
class EulerState:
    rho: float
    u: float
    p: float

    @property
    def c(self) -> float:
        return math.sqrt(GAMMA * self.p / self.rho)


def _pressure_function(p, s: EulerState, g=GAMMA):
    if p > s.p:
        A = 2.0 / ((g + 1) * s.rho)
        B = (g - 1) / (g + 1) * s.p
        return (p - s.p) * math.sqrt(A / (p + B))
    return 2 * s.c / (g - 1) * ((p / s.p) ** ((g - 1) / (2 * g)) - 1)


@dataclass(frozen=True)
class RiemannSolution:
    left: EulerState
    right: EulerState
    p_star: float
    u_star: float
    rho_star_left: float
    rho_star_right: float
    gamma: float = GAMMA

    def wave_speeds(self) -> dict:
        """Speeds of the wave edges, keyed by name."""
        g = self.gamma
        L, R = self.left, self.right
        out = {"contact": self.u_star}
        if self.p_star > L.p:
            out["left_shock"] = L.u - L.c * math.sqrt((g + 1) / (2 * g) * self.p_star / L.p + (g - 1) / (2 * g))
        else:
            c_star = L.c * (self.p_star / L.p) ** ((g - 1) / (2 * g))
            out["left_head"] = L.u - L.c
            out["left_tail"] = self.u_star - c_star
        if self.p_star > R.p:
            out["right_shock"] = R.u + R.c * math.sqrt((g + 1) / (2 * g) * self.p_star / R.p + (g - 1) / (2 * g))
        else:
            c_star = R.c * (self.p_star / R.p) ** ((g - 1) / (2 * g))
            out["right_head"] = R.u + R.c
            out["right_tail"] = self.u_star + c_star
        return out

    def sample(self, xi) -> tuple:
        """(rho, u, p) at similarity coordinates ``xi = (x - x0) / t``."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        rho, u, p = (np.empty_like(xi) for _ in range(3))
        for k, s in enumerate(xi):
            rho[k], u[k], p[k] = self._sample_one(s)
        return rho, u, p

    def _sample_one(self, s):
        g = self.gamma
        L, R = self.left, self.right
        ps, us = self.p_star, self.u_star
        if s <= us:
            if ps > L.p:
                sl = L.u - L.c * math.sqrt((g + 1) / (2 * g) * ps / L.p + (g - 1) / (2 * g))
                return (L.rho, L.u, L.p) if s <= sl else (self.rho_star_left, us, ps)
            head = L.u - L.c
            tail = us - L.c * (ps / L.p) ** ((g - 1) / (2 * g))
            if s <= head:
                return L.rho, L.u, L.p
            if s >= tail:
                return self.rho_star_left, us, ps
            c = 2 / (g + 1) * (L.c + (g - 1) / 2 * (L.u - s))
            u = 2 / (g + 1) * (L.c + (g - 1) / 2 * L.u + s)
            rho = L.rho * (c / L.c) ** (2 / (g - 1))
            return rho, u, L.p * (c / L.c) ** (2 * g / (g - 1))
        if ps > R.p:
            sr = R.u + R.c * math.sqrt((g + 1) / (2 * g) * ps / R.p + (g - 1) / (2 * g))
            return (R.rho, R.u, R.p) if s >= sr else (self.rho_star_right, us, ps)
        head = R.u + R.c
        tail = us + R.c * (ps / R.p) ** ((g - 1) / (2 * g))
        if s >= head:
            return R.rho, R.u, R.p
        if s <= tail:
            return self.rho_star_right, us, ps
        c = 2 / (g + 1) * (R.c - (g - 1) / 2 * (R.u - s))
        u = 2 / (g + 1) * (-R.c + (g - 1) / 2 * R.u + s)
        rho = R.rho * (c / R.c) ** (2 / (g - 1))
        return rho, u, R.p * (c / R.c) ** (2 * g / (g - 1))


def _star_density(p_star, s: EulerState, g=GAMMA):
    r = p_star / s.p
    if r > 1:
        q = (g - 1) / (g + 1)
        return s.rho * (r + q) / (q * r + 1)
    return s.rho * r ** (1 / g)


def solve_riemann(left: EulerState, right: EulerState) -> RiemannSolution:
    du = right.u - left.u
    if 2 * (left.c + right.c) / (GAMMA - 1) <= du:
        raise ValueError("initial data generate vacuum")

    def residual(p):
        return _pressure_function(p, left) + _pressure_function(p, right) + du

    hi = max(left.p, right.p)
    while residual(hi) < 0:
        hi *= 2
    p_star = brentq(residual, 1e-14 * hi, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    u_star = 0.5 * (left.u + right.u) + 0.5 * (_pressure_function(p_star, right) - _pressure_function(p_star, left))
    return RiemannSolution(
        left, right, p_star, u_star, _star_density(p_star, left), _star_density(p_star, right)
    )
