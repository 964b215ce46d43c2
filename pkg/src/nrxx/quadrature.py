"""Tensor Gauss-Hermite quadrature for Hermite moments.

Used as an independent check of the projection and flux recurrences: the
coefficient of ``alpha`` in the frame ``(u, theta)`` is

    f_alpha = theta^{|alpha|/2} / alpha! * int f(xi) He_alpha((xi - u)/sqrt(theta)) dxi
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .moments import MomentRep, eval_distribution, hermite_table, index_table


def _grid(weight_frame, nodes):
    u_w, theta_w = weight_frame
    x, w = hermegauss(nodes)
    s = math.sqrt(theta_w)
    axes = [np.asarray(u_w, dtype=float)[d] + s * x for d in range(3)]
    # hermegauss integrates against exp(-x^2/2); undo the weight so plain
    # integrands can be summed.
    w_axis = w * np.exp(0.5 * x * x) * s
    return axes, w_axis


def quadrature_coefficients(
    func: Callable[[np.ndarray], np.ndarray],
    frame,
    M: int,
    weight_frame=None,
    nodes: int = 40,
) -> np.ndarray:
    """Hermite coefficients (``|alpha| <= M + 1``) of ``func`` about ``frame``.

    ``func`` maps velocities of shape (..., 3) to values. Nodes are placed in
    ``weight_frame`` (default: ``frame``), which should match the Gaussian
    envelope of ``func`` for the rule to be exact.
    """
    u, theta = frame
    u = np.asarray(u, dtype=float)
    table = index_table(M)
    axes, w_axis = _grid(weight_frame if weight_frame is not None else frame, nodes)
    xi = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    vals = func(xi) * w_axis[:, None, None] * w_axis[None, :, None] * w_axis[None, None, :]
    s = math.sqrt(theta)
    he = [hermite_table(table.top, (axes[d] - u[d]) / s) for d in range(3)]
    out = np.empty(table.size)
    for k, (a1, a2, a3) in enumerate(table.alpha):
        integral = np.einsum("ijk,i,j,k->", vals, he[0][a1], he[1][a2], he[2][a3])
        out[k] = theta ** (0.5 * (a1 + a2 + a3)) / table.factorial[k] * integral
    return out


def quadrature_project(rep: MomentRep, u_new, theta_new, nodes: int = 40) -> np.ndarray:
    """Coefficients of the truncated expansion ``rep`` about a new frame."""
    return quadrature_coefficients(
        lambda xi: eval_distribution(rep, xi), (u_new, theta_new), rep.M, weight_frame=rep.frame, nodes=nodes
    )


def quadrature_flux(rep: MomentRep, j: int = 0, nodes: int = 40) -> np.ndarray:
    """Coefficients of ``xi_j f`` in the frame of ``rep``."""
    return quadrature_coefficients(
        lambda xi: xi[..., j] * eval_distribution(rep, xi), rep.frame, rep.M, weight_frame=rep.frame, nodes=nodes
    )
