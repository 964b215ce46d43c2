"""Finite volume machinery on a uniform 1D grid.

Cells hold standard representations. One evaluation of the convection
operator runs: closure fill, reconstruction, HLL flux, divergence.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels as kern
from .moments import (
    InadmissibleStateError,
    MacroState,
    MomentRep,
    hermite_max_root,
    index_table,
)


class BoundaryCondition(str, enum.Enum):
    PERIODIC = "periodic"
    COPY = "copy"


@dataclass(frozen=True)
class GridSpec:
    N: int
    x_min: float
    x_max: float

    def __post_init__(self):
        if self.N < 3:
            raise ValueError("need at least 3 cells")
        if not self.x_max > self.x_min:
            raise ValueError("empty domain")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.N

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.N) + 0.5) * self.dx


@dataclass
class Field:
    """Cellwise Hermite coefficients (struct of arrays) plus grid data.

    ``coeffs`` has shape (N, K) with each row in the frame ``u[i], theta[i]``.
    Between steps every row is a standard representation with empty closure
    slots.
    """

    coeffs: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    grid: GridSpec
    bc: BoundaryCondition
    kn: float
    M: int
    t: float = 0.0
    table: object = field(init=False, repr=False)

    def __post_init__(self):
        self.table = index_table(self.M)
        self.bc = BoundaryCondition(self.bc)
        self.coeffs = np.ascontiguousarray(self.coeffs, dtype=float)
        self.u = np.ascontiguousarray(self.u, dtype=float)
        self.theta = np.ascontiguousarray(self.theta, dtype=float)
        N = self.grid.N
        if self.coeffs.shape != (N, self.table.size) or self.u.shape != (N, 3) or self.theta.shape != (N,):
            raise ValueError("field arrays do not match the grid and order")
        if self.kn <= 0:
            raise ValueError("Knudsen number must be positive")

    @classmethod
    def from_macro(cls, grid, bc, kn, M, rho, u, theta, t=0.0):
        """Local Maxwellian in every cell."""
        rho = np.broadcast_to(np.asarray(rho, dtype=float), (grid.N,))
        u = np.broadcast_to(np.asarray(u, dtype=float), (grid.N, 3))
        theta = np.broadcast_to(np.asarray(theta, dtype=float), (grid.N,))
        if np.any(rho <= 0) or np.any(theta <= 0):
            raise InadmissibleStateError("initial data must have positive density and temperature")
        coeffs = np.zeros((grid.N, index_table(M).size))
        coeffs[:, 0] = rho
        return cls(coeffs, u.copy(), theta.copy(), grid, bc, kn, M, t)

    def copy(self, **changes) -> "Field":
        base = dict(coeffs=self.coeffs.copy(), u=self.u.copy(), theta=self.theta.copy())
        base.update(changes)
        return replace(self, **base)

    @property
    def rho(self) -> np.ndarray:
        return self.coeffs[:, 0]

    @property
    def nu(self) -> np.ndarray:
        return self.rho / self.kn

    def cell(self, i: int) -> MomentRep:
        return MomentRep(self.u[i], self.theta[i], self.coeffs[i], self.M)

    def conserved_totals(self) -> np.ndarray:
        """Grid sums of rho, rho u (3) and rho |u|^2 + 3 rho theta, times dx."""
        rho = self.rho
        mom = rho[:, None] * self.u
        energy = rho * np.sum(self.u**2, axis=1) + 3 * rho * self.theta
        return np.concatenate([[rho.sum()], mom.sum(axis=0), [energy.sum()]]) * self.grid.dx


@dataclass
class InterfaceStates:
    """Reconstructed states at the N + 1 interfaces x_{-1/2}, ..., x_{N-1/2}.

    Entry k sits between cells k - 1 and k (cells -1 and N are ghosts).
    """

    left: np.ndarray
    u_left: np.ndarray
    theta_left: np.ndarray
    right: np.ndarray
    u_right: np.ndarray
    theta_right: np.ndarray
    lam_left: np.ndarray
    lam_right: np.ndarray
    M: int

    def __len__(self):
        return self.lam_left.shape[0]

    def left_rep(self, k: int) -> MomentRep:
        return MomentRep(self.u_left[k], self.theta_left[k], self.left[k], self.M)

    def right_rep(self, k: int) -> MomentRep:
        return MomentRep(self.u_right[k], self.theta_right[k], self.right[k], self.M)


def _signal_constant(M: int) -> float:
    return hermite_max_root(M + 1)


def closure_first_order(field: Field) -> np.ndarray:
    """Cell coefficients with the closure slots filled by central differences."""
    t = field.table
    cp, _, tp = kern.pad_cells(field.coeffs, field.u, field.theta, field.bc is BoundaryCondition.PERIODIC, 1)
    kern.closure_central(cp, tp, field.kn, field.grid.dx, t.slots, t.slot_src)
    return cp[1:-1]


def _raise_reconstruction(status: int, N: int):
    p, side = divmod(status, 2)
    i = p - 2
    face = f"{i + 0.5:+g}" if side == 0 else f"{i - 0.5:+g}"
    raise InadmissibleStateError(f"inadmissible reconstructed state at interface x_{{{face}}} (cell {i} of {N})")


def reconstruct(field: Field, reconstruction: bool = True) -> InterfaceStates:
    """Left/right interface states with closure slots and signal speeds.

    With ``reconstruction=False`` the slopes vanish and the states are the
    cell values carrying central-difference closures.
    """
    t = field.table
    N = field.grid.N
    cp, up, tp = kern.pad_cells(field.coeffs, field.u, field.theta, field.bc is BoundaryCondition.PERIODIC, 2)
    kern.closure_central(cp, tp, field.kn, field.grid.dx, t.slots, t.slot_src)
    fl, ul, tl, fr, ur, tr, lam_l, lam_r, status = kern.reconstruct_padded(
        cp, up, tp, field.kn, field.grid.dx, reconstruction, _signal_constant(field.M),
        t.nstate, t.top, t.i_e, t.i_2e, t.minus, t.minus2, t.slots, t.slot_src,
    )
    if status >= 0:
        _raise_reconstruction(status, N)
    k = slice(1, N + 2)
    k1 = slice(2, N + 3)
    return InterfaceStates(fl[k], ul[k], tl[k], fr[k1], ur[k1], tr[k1], lam_l[k], lam_r[k], field.M)


def hll_flux(left: MomentRep, right: MomentRep, lam_left: float, lam_right: float, frame=None) -> MomentRep:
    """HLL flux through one interface, expressed in ``frame`` (default: left frame)."""
    if lam_left > lam_right:
        raise ValueError("signal speeds out of order")
    t = left.table
    u, theta = frame if frame is not None else left.frame
    u = np.asarray(u, dtype=float)
    out = np.empty(t.size)
    kern.hll_row(
        left.coeffs, left.u, left.theta, right.coeffs, right.u, right.theta,
        float(lam_left), float(lam_right), u, float(theta),
        t.minus, t.minus2, t.plus, t.alpha, t.nstate, t.top, out,
    )
    return MomentRep(u, theta, out, left.M)


def interface_speeds(left: MacroState, right: MacroState, M: int):
    """(lambda_L, lambda_R) from the macroscopic states on both sides."""
    C = _signal_constant(M)
    cl, cr = C * math.sqrt(left.theta), C * math.sqrt(right.theta)
    return min(left.u[0] - cl, right.u[0] - cr), max(left.u[0] + cl, right.u[0] + cr)


def convection_rhs(field: Field, reconstruction: bool = True) -> np.ndarray:
    """Time derivative of each cell's coefficients, in the cell's own frame."""
    t = field.table
    rhs, status = kern.convection_rhs_cells(
        field.coeffs, field.u, field.theta, field.bc is BoundaryCondition.PERIODIC,
        field.kn, field.grid.dx, reconstruction, _signal_constant(field.M),
        t.nstate, t.top, t.i_e, t.i_2e, t.minus, t.minus2, t.plus, t.alpha, t.slots, t.slot_src,
    )
    if status >= 0:
        _raise_reconstruction(status, field.grid.N)
    return rhs


def max_signal_speed(field: Field) -> float:
    """Largest |lambda| over the interfaces, from the cell velocities and temperatures.

    Only u and theta enter, so the value is unchanged by the collision step.
    """
    C = _signal_constant(field.M)
    c = C * np.sqrt(field.theta)
    return float(np.max(np.abs(field.u[:, 0]) + c))


def theta_over_nu_max(field: Field) -> float:
    return float(np.max(field.theta * field.kn / field.rho))


def uniform_field(grid, bc, kn, M, rho=1.0, u=(0.0, 0.0, 0.0), theta=1.0) -> Field:
    return Field.from_macro(grid, bc, kn, M, rho, u, theta)
