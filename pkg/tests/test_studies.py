import math

import numpy as np
import pytest

from nrxx.scenarios import ScenarioConfig
from nrxx.studies import block_average, convergence_study, l1_error, loglog_slope, observed_orders, scaling_benchmark


def test_block_average():
    fine = np.arange(12.0)
    np.testing.assert_array_equal(block_average(fine, 3), [1.5, 5.5, 9.5])
    vec = np.arange(24.0).reshape(12, 2)
    assert block_average(vec, 4).shape == (4, 2)
    with pytest.raises(ValueError, match="blocks"):
        block_average(fine, 5)


def test_block_average_preserves_integral():
    rng = np.random.default_rng(3)
    fine = rng.random(64)
    assert block_average(fine, 8).sum() * 8 == pytest.approx(fine.sum(), rel=1e-14)


def test_l1_error_of_cell_averages():
    # cell averages of x on [0, 2]: coarse vs fine block-averaged agree exactly
    fine_x = (np.arange(40) + 0.5) * 2 / 40
    coarse_x = (np.arange(10) + 0.5) * 2 / 10
    assert l1_error(coarse_x, fine_x, 2.0) == pytest.approx(0.0, abs=1e-14)
    assert l1_error(coarse_x + 0.1, fine_x, 2.0) == pytest.approx(0.2, rel=1e-12)


def test_observed_orders_and_slope():
    grids = [10, 20, 40, 80]
    errs = [3.0 * n**-1.5 for n in grids]
    orders = observed_orders(grids, errs)
    assert math.isnan(orders[0])
    np.testing.assert_allclose(orders[1:], 1.5, rtol=1e-12)
    assert loglog_slope(grids, [n**2.5 for n in grids]) == pytest.approx(2.5, rel=1e-12)


def test_convergence_grid_validation():
    base = ScenarioConfig(t_end=0.01)
    with pytest.raises(ValueError, match="multiple"):
        convergence_study(base, [20, 30], 40)
    with pytest.raises(ValueError, match="finer"):
        convergence_study(base, [20, 40], 40)


def test_convergence_study_small():
    rows = convergence_study(ScenarioConfig(t_end=0.05), [10, 20], 80)
    assert [r.N for r in rows] == [10, 20]
    assert rows[1].err_rho < rows[0].err_rho
    assert rows[1].order_rho > 0.5 and math.isnan(rows[0].order_rho)


def test_scaling_grid_validation():
    with pytest.raises(ValueError, match="factor of 8"):
        scaling_benchmark(ScenarioConfig(t_end=0.01), [10, 20, 40])
    with pytest.raises(ValueError, match="factor of 8"):
        scaling_benchmark(ScenarioConfig(t_end=0.01), [10, 12, 14, 16])
