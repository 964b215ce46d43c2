"""Second-order Runge-Kutta-Chebyshev stepping and Strang splitting.

The convection operator (which carries the regularization diffusion through
the closure slots) is advanced with an s-stage RKC scheme whose stage count
follows from the diffusive stability bound; the BGK collision is solved
exactly in between, with adjacent half-steps merged into one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _kernels as kern
from .spatial import Field, convection_rhs, max_signal_speed, theta_over_nu_max

DEFAULT_EPSILON = 10.0
CLASSICAL_EPSILON = 2.0 / 13.0


def chebyshev_T(j: int, x: float, derivative: int = 0) -> float:
    """T_j(x) or its first/second derivative, by the (differentiated) recurrence."""
    if j < 0:
        raise ValueError("j must be non-negative")
    if derivative not in (0, 1, 2):
        raise ValueError("only derivatives 0, 1, 2 are supported")
    t0, t1 = 1.0, x
    d0, d1 = 0.0, 1.0
    s0, s1 = 0.0, 0.0
    if j == 0:
        return (t0, d0, s0)[derivative]
    for _ in range(1, j):
        t0, t1 = t1, 2 * x * t1 - t0
        d0, d1 = d1, 2 * t0 + 2 * x * d1 - d0
        s0, s1 = s1, 4 * d0 + 2 * x * s1 - s0
    return (t1, d1, s1)[derivative]


def beta(s: int) -> float:
    """Real-axis stability length used for stage selection."""
    return 0.34 * (s * s - 1)


@dataclass(frozen=True)
class RkcCoeffs:
    s: int
    epsilon: float
    omega0: float
    omega1: float
    a: np.ndarray
    b: np.ndarray
    mu: np.ndarray
    nu: np.ndarray
    mu_tilde: np.ndarray
    gamma_tilde: np.ndarray


def rkc_coeffs(s: int, epsilon: float = DEFAULT_EPSILON) -> RkcCoeffs:
    """Coefficients of the s-stage second-order RKC scheme with damping ``epsilon``.

    Arrays are indexed by stage ``j = 0..s``; entries a stage does not use
    are zero.
    """
    if s < 2:
        raise ValueError("second-order RKC needs at least two stages")
    w0 = 1.0 + epsilon / (s * s)
    w1 = chebyshev_T(s, w0, 1) / chebyshev_T(s, w0, 2)
    b = np.zeros(s + 1)
    for j in range(2, s + 1):
        b[j] = chebyshev_T(j, w0, 2) / chebyshev_T(j, w0, 1) ** 2
    b[0] = b[1] = b[2]
    a = np.array([1.0 - b[j] * chebyshev_T(j, w0) for j in range(s + 1)])
    mu = np.zeros(s + 1)
    nu = np.zeros(s + 1)
    mu_t = np.zeros(s + 1)
    gamma_t = np.zeros(s + 1)
    mu_t[1] = b[1] * w1
    for j in range(2, s + 1):
        mu[j] = 2 * b[j] * w0 / b[j - 1]
        nu[j] = -b[j] / b[j - 2]
        mu_t[j] = 2 * b[j] * w1 / b[j - 1]
        gamma_t[j] = -a[j - 1] * mu_t[j]
    return RkcCoeffs(s, epsilon, w0, w1, a, b, mu, nu, mu_t, gamma_t)


def rkc_recursion(y0, rhs: Callable, combine: Callable, dt: float, coeffs: RkcCoeffs):
    """Run the RKC stage recursion.

    ``combine(w0, y0, w1, y1, w2, y2, wf1, f1, wf0, f0)`` forms
    ``w0*y0 + w1*y1 + w2*y2 + wf1*f1 + wf0*f0`` where ``f1 = rhs(y1)`` and
    ``f0 = rhs(y0)``; for plain arrays this is ordinary arithmetic.
    """
    f0 = rhs(y0)
    prev2 = y0
    prev = combine(0.0, y0, 1.0, y0, 0.0, y0, coeffs.mu_tilde[1] * dt, f0, 0.0, f0)
    for j in range(2, coeffs.s + 1):
        f_prev = rhs(prev)
        mu, nu = coeffs.mu[j], coeffs.nu[j]
        nxt = combine(
            1.0 - mu - nu, y0, mu, prev, nu, prev2,
            coeffs.mu_tilde[j] * dt, f_prev, coeffs.gamma_tilde[j] * dt, f0,
        )
        prev2, prev = prev, nxt
    return prev


def _array_combine(w0, y0, w1, y1, w2, y2, wf1, f1, wf0, f0):
    return w0 * y0 + w1 * y1 + w2 * y2 + wf1 * f1 + wf0 * f0


def rkc_integrate(f: Callable, y0, dt: float, coeffs: RkcCoeffs):
    """One RKC step for an autonomous ODE ``y' = f(y)`` on plain arrays."""
    return rkc_recursion(np.asarray(y0, dtype=float), f, _array_combine, dt, coeffs)


class StageError(ArithmeticError):
    pass


def rkc_step(field: Field, dt: float, coeffs: RkcCoeffs, reconstruction: bool = True) -> Field:
    """Advance the convection part by ``dt``; every stage is re-standardized."""
    t = field.table
    stage = [0]

    def rhs(state: Field):
        return convection_rhs(state, reconstruction)

    def combine(w0, y0, w1, y1, w2, y2, wf1, f1, wf0, f0):
        stage[0] += 1
        c, u, th, status = kern.rkc_combine_cells(
            y0.coeffs, y0.u, y0.theta, y1.coeffs, y1.u, y1.theta, y2.coeffs, y2.u, y2.theta,
            f0, f1, w0, w1, w2, wf1, wf0, t.nstate, t.top, t.i_e, t.i_2e, t.minus, t.minus2,
        )
        if status >= 0:
            raise StageError(f"inadmissible state in cell {status} at RKC stage {stage[0]} (t={field.t})")
        return field.copy(coeffs=c, u=u, theta=th)

    out = rkc_recursion(field, rhs, combine, dt, coeffs)
    out.t = field.t + dt
    return out


def euler_step(field: Field, dt: float, reconstruction: bool = True) -> Field:
    t = field.table
    f0 = convection_rhs(field, reconstruction)
    c, u, th, status = kern.rkc_combine_cells(
        field.coeffs, field.u, field.theta, field.coeffs, field.u, field.theta,
        field.coeffs, field.u, field.theta, f0, f0, 0.0, 1.0, 0.0, dt, 0.0,
        t.nstate, t.top, t.i_e, t.i_2e, t.minus, t.minus2,
    )
    if status >= 0:
        raise StageError(f"inadmissible state in cell {status} (t={field.t})")
    return field.copy(coeffs=c, u=u, theta=th, t=field.t + dt)


@dataclass(frozen=True)
class StepPlan:
    dt: float
    s: int
    lambda_max: float
    diffusion_bound: float


def select_timestep(field: Field, cfl: float) -> float:
    if not 0 < cfl <= 1:
        raise ValueError("CFL number must lie in (0, 1]")
    lam = max_signal_speed(field)
    if lam <= 0:
        raise ValueError("maximal signal speed is zero")
    return cfl * field.grid.dx / lam


def diffusion_bound(field: Field) -> float:
    return 2 * (field.M + 1) / field.grid.dx**2 * theta_over_nu_max(field)


def stage_count(dt: float, lambda_max: float, dx: float, M: int, theta_over_nu: float, cfl: float) -> int:
    """Smallest s >= 2 with dt (lam/dx + 2(M+1)/dx^2 (theta/nu)_max) <= cfl beta(s) / 2."""
    need = 2.0 * dt * (lambda_max / dx + 2 * (M + 1) / dx**2 * theta_over_nu) / cfl
    # beta(s) >= need  <=>  s^2 >= 1 + need / 0.34
    s = max(2, math.ceil(math.sqrt(1.0 + need / 0.34)))
    while s > 2 and beta(s - 1) >= need:
        s -= 1
    while beta(s) < need:
        s += 1
    return s


def select_stages(dt: float, field: Field, cfl: float) -> int:
    return stage_count(dt, max_signal_speed(field), field.grid.dx, field.M, theta_over_nu_max(field), cfl)


def collide(field: Field, dt: float) -> Field:
    """Exact BGK relaxation of every cell over ``dt`` (cells standard)."""
    t = field.table
    c = field.coeffs.copy()
    mask = (t.degree >= 2) & (t.degree <= t.M)
    c[:, mask] *= np.exp(-field.nu * dt)[:, None]
    c[:, t.degree > t.M] = 0.0
    return field.copy(coeffs=c)


def plan_step(
    field: Field, cfl: float, integrator: str = "rkc", dt_factor: float = 1.0, stages: Optional[int] = None
) -> StepPlan:
    """Time step and stage count for the next convection step.

    ``dt_factor`` shrinks the CFL step (for time-refinement studies);
    ``stages`` pins the RKC stage count instead of selecting the smallest
    admissible one.
    """
    lam = max_signal_speed(field)
    dx = field.grid.dx
    dt = dt_factor * select_timestep(field, cfl)
    bound = diffusion_bound(field)
    if integrator == "rkc":
        s = stages if stages is not None else stage_count(dt, lam, dx, field.M, theta_over_nu_max(field), cfl)
    elif integrator == "euler":
        # forward Euler: beta = 2, so the same bound fixes dt with s = 1
        dt = min(dt, dt_factor * cfl / (lam / dx + bound))
        s = 1
    else:
        raise ValueError(f"unknown integrator {integrator!r}")
    return StepPlan(dt, s, lam, bound)


def _convect(field, plan, epsilon, reconstruction, integrator):
    if integrator == "euler":
        return euler_step(field, plan.dt, reconstruction)
    return rkc_step(field, plan.dt, rkc_coeffs(plan.s, epsilon), reconstruction)


def _clip(plan: StepPlan, remaining: float, field: Field, cfl: float, integrator: str, pinned: bool = False) -> StepPlan:
    if plan.dt < remaining:
        return plan
    s = plan.s
    if integrator == "rkc" and not pinned:
        s = stage_count(remaining, plan.lambda_max, field.grid.dx, field.M, theta_over_nu_max(field), cfl)
    return StepPlan(remaining, s, plan.lambda_max, plan.diffusion_bound)


def strang_advance(
    field: Field,
    t_end: float,
    cfl: float = 0.95,
    *,
    epsilon: float = DEFAULT_EPSILON,
    reconstruction: bool = True,
    integrator: str = "rkc",
    merged: bool = True,
    dt_factor: float = 1.0,
    stages: Optional[int] = None,
    max_steps: Optional[int] = None,
    callback: Optional[Callable[[StepPlan, Field], None]] = None,
) -> Field:
    """Advance ``field`` to ``t_end`` with collision/convection Strang splitting.

    With ``merged=True`` the closing half-collision of one step and the
    opening half-collision of the next are applied as a single relaxation
    over ``(dt_n + dt_{n+1}) / 2``; ``merged=False`` runs the plain
    half/full/half sequence. The final step is shortened to land on
    ``t_end``. ``dt_factor`` and ``stages`` are passed to :func:`plan_step`;
    ``max_steps`` stops early after that many steps.
    """
    if t_end < field.t:
        raise ValueError("t_end lies before the current time")
    if t_end == field.t:
        return field.copy()
    if stages is not None and stages < 2:
        raise ValueError("RKC needs at least two stages")

    def next_plan(f):
        plan = plan_step(f, cfl, integrator, dt_factor, stages)
        return _clip(plan, t_end - f.t, f, cfl, integrator, stages is not None)

    steps = 0
    plan = next_plan(field)
    if merged:
        field = collide(field, 0.5 * plan.dt)
    while True:
        if not merged:
            field = collide(field, 0.5 * plan.dt)
        t_before = field.t
        last = plan.dt >= t_end - t_before
        field = _convect(field, plan, epsilon, reconstruction, integrator)
        field.t = t_end if last else t_before + plan.dt
        steps += 1
        if callback is not None:
            callback(plan, field)
        if last or (max_steps is not None and steps >= max_steps):
            return collide(field, 0.5 * plan.dt)
        upcoming = next_plan(field)
        if merged:
            field = collide(field, 0.5 * (plan.dt + upcoming.dt))
        else:
            field = collide(field, 0.5 * plan.dt)
        plan = upcoming
