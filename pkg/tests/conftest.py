import numpy as np
import pytest

from nrxx.moments import MomentRep, index_table


def random_rep(rng, M, closure=True, scale=0.05, standard_low=False):
    """Admissible random representation: a perturbed Maxwellian in a random frame.

    Degree-k coefficients are drawn with size ``scale * rho * theta^(k/2)`` so
    the macroscopic state stays well inside the admissible set.
    """
    t = index_table(M)
    u = rng.uniform(-1, 1, 3)
    theta = rng.uniform(0.5, 2.0)
    rho = rng.uniform(0.5, 2.0)
    c = scale * rho * theta ** (0.5 * t.degree) * rng.standard_normal(t.size)
    c[0] = rho
    if standard_low:
        c[t.i_e] = 0.0
        c[t.i_2e] -= c[t.i_2e].mean()
    if not closure:
        c[t.degree > M] = 0.0
    return MomentRep(u, theta, c, M)


def random_frame_shift(rng, rep, max_du=1.0):
    du = rng.standard_normal(3)
    du *= rng.uniform(0, max_du) / np.linalg.norm(du)
    ratio = np.exp(rng.uniform(np.log(0.5), np.log(2.0)))
    return rep.u + du, rep.theta * ratio


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
