"""Hermite moment algebra for distributions in 3D velocity space.

A distribution is stored as coefficients ``f_alpha`` of the weighted Hermite
basis about a frame ``(u, theta)``::

    H_{theta,alpha}(v) = (2 pi)^{-3/2} theta^{-(|alpha|+3)/2} exp(-|v|^2/2) prod_d He_{alpha_d}(v_d),
    v = (xi - u) / sqrt(theta)

Coefficients are kept for ``|alpha| <= M + 1``; the top degree holds the
closure slots, which are only populated transiently by the spatial scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import _kernels as kern

D = 3


class InadmissibleStateError(ArithmeticError):
    """Raised when a recovered density or temperature is not positive."""


def hermite_table(n: int, x) -> np.ndarray:
    """Return ``[He_0(x), ..., He_n(x)]`` stacked along the first axis."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = x
    for k in range(1, n):
        out[k + 1] = x * out[k] - k * out[k - 1]
    return out


def hermite_eval(n: int, x):
    """Probabilists' Hermite polynomial He_n evaluated by recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    val = hermite_table(n, x)[n]
    return float(val) if np.ndim(val) == 0 else val


@lru_cache(maxsize=None)
def hermite_max_root(n: int, tol: float = 1e-14, maxiter: int = 200) -> float:
    """Largest root of He_n.

    Newton's iteration started above the largest root decreases
    monotonically onto it, since every derivative of He_n is positive there.
    """
    if n < 1:
        raise ValueError("He_n has no roots for n < 1")
    if n == 1:
        return 0.0
    x = math.sqrt(4.0 * n + 2.0)
    for _ in range(maxiter):
        h = hermite_table(n, x)
        step = h[n] / (n * h[n - 1])
        x -= step
        if abs(step) < tol:
            return x
    raise RuntimeError(f"Newton iteration for the largest root of He_{n} did not converge")


class MultiIndexTable:
    """Graded enumeration of multi-indices ``|alpha| <= M + 1`` with neighbor maps.

    ``plus[k, j]``, ``minus[k, j]`` and ``minus2[k, j]`` hold the offsets of
    ``alpha + e_j``, ``alpha - e_j`` and ``alpha - 2 e_j`` (``-1`` when the
    neighbor is outside the table or has a negative component).
    """

    def __init__(self, M: int):
        if M < 1:
            raise ValueError("order M must be at least 1")
        self.M = M
        self.top = M + 1
        alphas = [
            (a1, a2, n - a1 - a2)
            for n in range(self.top + 1)
            for a1 in range(n, -1, -1)
            for a2 in range(n - a1, -1, -1)
        ]
        self.alpha = np.array(alphas, dtype=np.int64)
        self.index_of = {a: k for k, a in enumerate(alphas)}
        self.size = len(alphas)
        self.degree = self.alpha.sum(axis=1)
        self.nstate = int(np.count_nonzero(self.degree <= M))

        def lookup(a):
            return self.index_of.get(tuple(a), -1) if min(a) >= 0 else -1

        eye = np.eye(D, dtype=np.int64)
        self.plus = np.array([[lookup(a + eye[j]) for j in range(D)] for a in self.alpha], dtype=np.int64)
        self.minus = np.array([[lookup(a - eye[j]) for j in range(D)] for a in self.alpha], dtype=np.int64)
        self.minus2 = np.array([[lookup(a - 2 * eye[j]) for j in range(D)] for a in self.alpha], dtype=np.int64)
        self.i_e = np.array([self.index_of[tuple(eye[j])] for j in range(D)], dtype=np.int64)
        self.i_2e = np.array([self.index_of[tuple(2 * eye[j])] for j in range(D)], dtype=np.int64)
        # closure slots and the order-M coefficient each one is differenced from
        self.slots = np.flatnonzero(self.degree == self.top).astype(np.int64)
        self.slot_src = self.minus[self.slots, 0].copy()
        self.factorial = np.array([math.prod(math.factorial(int(k)) for k in a) for a in self.alpha], dtype=float)

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"MultiIndexTable(M={self.M}, size={self.size})"


@lru_cache(maxsize=None)
def index_table(M: int) -> MultiIndexTable:
    return MultiIndexTable(M)


@dataclass(frozen=True)
class MacroState:
    rho: float
    u: np.ndarray
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float).reshape(D))

    @property
    def admissible(self) -> bool:
        return self.rho > 0 and self.theta > 0


@dataclass(frozen=True, eq=False)
class MomentRep:
    """Hermite coefficients of one distribution about the frame ``(u, theta)``."""

    u: np.ndarray
    theta: float
    coeffs: np.ndarray
    M: int
    table: MultiIndexTable = field(init=False, repr=False)

    def __post_init__(self):
        table = index_table(self.M)
        u = np.asarray(self.u, dtype=float).reshape(D)
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (table.size,):
            raise ValueError(f"expected {table.size} coefficients for M={self.M}, got {coeffs.shape}")
        if not self.theta > 0:
            raise ValueError("frame temperature must be positive")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "table", table)

    def __getitem__(self, alpha: Sequence[int]) -> float:
        return float(self.coeffs[self.table.index_of[tuple(alpha)]])

    @property
    def frame(self):
        return self.u, self.theta

    def with_coeffs(self, coeffs) -> "MomentRep":
        return MomentRep(self.u, self.theta, coeffs, self.M)

    @classmethod
    def zeros(cls, M: int, u=(0.0, 0.0, 0.0), theta: float = 1.0) -> "MomentRep":
        return cls(u, theta, np.zeros(index_table(M).size), M)

    @classmethod
    def from_dict(cls, M: int, values: dict, u=(0.0, 0.0, 0.0), theta: float = 1.0) -> "MomentRep":
        table = index_table(M)
        c = np.zeros(table.size)
        for alpha, v in values.items():
            c[table.index_of[tuple(alpha)]] = v
        return cls(u, theta, c, M)


def maxwellian(state: MacroState, M: int) -> MomentRep:
    """The local Maxwellian is rho times the zeroth basis function of its own frame."""
    if not state.admissible:
        raise InadmissibleStateError(f"inadmissible Maxwellian state {state}")
    c = np.zeros(index_table(M).size)
    c[0] = state.rho
    return MomentRep(state.u, state.theta, c, M)


def macro_from_rep(rep: MomentRep) -> MacroState:
    t = rep.table
    rho, u0, u1, u2, theta = kern.macro_row(rep.coeffs, rep.u, rep.theta, t.i_e, t.i_2e)
    if not (rho > 0 and theta > 0):
        raise InadmissibleStateError(f"recovered rho={rho}, theta={theta}")
    return MacroState(rho, np.array([u0, u1, u2]), theta)


def _check_frame(u_new, theta_new):
    u_new = np.asarray(u_new, dtype=float).reshape(D)
    if not theta_new > 0:
        raise ValueError(f"target frame temperature must be positive, got {theta_new}")
    return u_new, float(theta_new)


def project(rep: MomentRep, u_new, theta_new, method: str = "exact", substeps: int = 10) -> MomentRep:
    """Re-expand ``rep`` about the frame ``(u_new, theta_new)``.

    ``method="exact"`` sums the terminating exponential series of the
    straight-path homotopy; ``method="rk4"`` integrates the same homotopy
    ODE with ``substeps`` classical Runge-Kutta steps.
    """
    u_new, theta_new = _check_frame(u_new, theta_new)
    t = rep.table
    out = np.empty(t.size)
    if method == "exact":
        kern.project_row(rep.coeffs, rep.u, rep.theta, u_new, theta_new, t.minus, t.minus2, t.top, out)
    elif method == "rk4":
        du = rep.u - u_new
        dth = 0.5 * (rep.theta - theta_new)
        h = 1.0 / substeps
        y = rep.coeffs.copy()
        k1, k2, k3, k4 = (np.empty(t.size) for _ in range(4))
        for _ in range(substeps):
            kern.homotopy_rhs_row(y, du, dth, t.minus, t.minus2, k1)
            kern.homotopy_rhs_row(y + 0.5 * h * k1, du, dth, t.minus, t.minus2, k2)
            kern.homotopy_rhs_row(y + 0.5 * h * k2, du, dth, t.minus, t.minus2, k3)
            kern.homotopy_rhs_row(y + h * k3, du, dth, t.minus, t.minus2, k4)
            y += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        out = y
    else:
        raise ValueError(f"unknown projection method {method!r}")
    return MomentRep(u_new, theta_new, out, rep.M)


def to_standard(rep: MomentRep) -> MomentRep:
    state = macro_from_rep(rep)
    std = project(rep, state.u, state.theta)
    c = std.coeffs.copy()
    c[rep.table.i_e] = 0.0
    return std.with_coeffs(c)


def flux_moments(rep: MomentRep, j: int = 0) -> MomentRep:
    """Coefficients of ``xi_j f`` in the frame of ``rep``, valid for ``|alpha| <= M``.

    ``j`` is the zero-based velocity component. The closure-degree entries of
    the result are zero.
    """
    t = rep.table
    out = np.empty(t.size)
    kern.flux_row(rep.coeffs, rep.u, rep.theta, j, t.minus, t.plus, t.alpha, t.nstate, out)
    return rep.with_coeffs(out)


def linear_combine(a: float, rep_a: MomentRep, b: float, rep_b: MomentRep, frame) -> MomentRep:
    u, theta = frame
    pa = project(rep_a, u, theta)
    pb = project(rep_b, u, theta)
    return pa.with_coeffs(a * pa.coeffs + b * pb.coeffs)


def collision_relax(rep_std: MomentRep, nu: float, dt: float) -> MomentRep:
    """Exact BGK relaxation of a standard representation over ``dt``.

    Orders ``2 <= |alpha| <= M`` decay by ``exp(-nu dt)``; closure slots are
    returned as zero.
    """
    if nu < 0 or dt < 0:
        raise ValueError("nu and dt must be non-negative")
    t = rep_std.table
    c = rep_std.coeffs.copy()
    c[(t.degree >= 2) & (t.degree <= t.M)] *= math.exp(-nu * dt)
    c[t.degree > t.M] = 0.0
    return rep_std.with_coeffs(c)


def eval_distribution(rep: MomentRep, xi) -> np.ndarray:
    """Pointwise value of the truncated expansion at velocities ``xi`` (..., 3)."""
    xi = np.asarray(xi, dtype=float)
    t = rep.table
    v = (xi - rep.u) / math.sqrt(rep.theta)
    he = [hermite_table(t.top, v[..., d]) for d in range(D)]
    total = np.zeros(v.shape[:-1])
    for k, (a1, a2, a3) in enumerate(t.alpha):
        f = rep.coeffs[k]
        if f != 0.0:
            total += f * rep.theta ** (-0.5 * (a1 + a2 + a3)) * he[0][a1] * he[1][a2] * he[2][a3]
    weight = np.exp(-0.5 * np.sum(v * v, axis=-1)) * (2 * np.pi * rep.theta) ** (-D / 2)
    return weight * total
