"""Multistart searches for main methods and their start/stop companions.

The heavy searches run with coarse settings here; the acceptance suite
re-runs the headline recoveries at full precision.
"""

import numpy as np
import pytest

from essprk.errors import DomainError, OrderConditionsInfeasible
from essprk.optimizer import (
    MainSearchOutcome,
    SearchConfig,
    optimize_main,
    optimize_start_stop,
)
from essprk.order_conditions import (
    EffectiveOrderSpec,
    effective_order,
    effective_order_residuals,
    elementary_weights,
)
from essprk.ssp import ssp_coefficient

COARSE = SearchConfig(restarts=2, seed=0)


def wrap(tableau, spec):
    return MainSearchOutcome(
        tableau=tableau,
        ssp=ssp_coefficient(tableau),
        residuals=effective_order_residuals(elementary_weights(tableau), spec),
        spec=spec,
    )


class TestSearchConfig:
    def test_defaults_valid(self):
        SearchConfig()

    @pytest.mark.parametrize(
        "kw",
        [
            {"restarts": 0},
            {"max_iterations": 0},
            {"residual_tol": 0.0},
            {"penalty_weights": ()},
            {"penalty_weights": (1e2, 1e2)},
            {"penalty_weights": (1e4, 1e2)},
            {"penalty_weights": (-1.0, 1.0)},
        ],
    )
    def test_rejects_bad_settings(self, kw):
        with pytest.raises(DomainError):
            SearchConfig(**kw)


class TestMainSearch:
    def test_recovers_three_stage_optimum(self):
        out = optimize_main(3, EffectiveOrderSpec(3, 2), COARSE, radius_tol=1e-4)
        assert out.converged
        assert out.ssp.coefficient == pytest.approx(1.0, abs=2e-3)
        assert np.max(np.abs(out.residuals)) <= 1e-10
        assert effective_order(out.tableau) >= 3

    def test_deterministic_for_fixed_seed(self):
        a = optimize_main(3, EffectiveOrderSpec(3, 2), COARSE, radius_tol=1e-3)
        b = optimize_main(3, EffectiveOrderSpec(3, 2), COARSE, radius_tol=1e-3)
        assert np.array_equal(a.tableau.A, b.tableau.A)
        assert np.array_equal(a.tableau.b, b.tableau.b)

    def test_more_restarts_never_hurt(self):
        one = optimize_main(
            3, EffectiveOrderSpec(3, 2), SearchConfig(restarts=1, seed=0),
            radius_tol=1e-3,
        )
        two = optimize_main(3, EffectiveOrderSpec(3, 2), COARSE, radius_tol=1e-3)
        assert two.ssp.coefficient >= one.ssp.coefficient - 1e-12

    def test_order_five_returns_zero_coefficient_report(self):
        out = optimize_main(4, EffectiveOrderSpec(5, 2), COARSE)
        assert not out.converged
        assert out.ssp.coefficient == 0.0
        # four stages leave the deepest chain weight at zero, off by 1/120
        assert np.max(np.abs(out.residuals)) == pytest.approx(1 / 120, abs=1e-6)

    def test_unreachable_order_raises(self):
        with pytest.raises(OrderConditionsInfeasible) as info:
            optimize_main(2, EffectiveOrderSpec(3, 2), SearchConfig(restarts=1, seed=0))
        assert np.max(np.abs(info.value.best_residuals)) == pytest.approx(
            1 / 6, abs=1e-6
        )

    def test_stage_count_validated(self):
        with pytest.raises(DomainError):
            optimize_main(1, EffectiveOrderSpec(3, 2))


class TestStartStopSearch:
    def test_companions_for_classical_method(self, ssprk33):
        main = wrap(ssprk33, EffectiveOrderSpec(3, 2))
        out = optimize_start_stop(
            main, SearchConfig(restarts=1, seed=0), radius_tol=1e-3
        )
        assert out.success
        assert out.start.s == 4
        assert out.stop.s == 3
        assert out.min_radius >= main.ssp.coefficient - 1e-3
        assert out.worst_residual <= 1e-10
        assert out.starting.free == ()

    def test_order_five_rejected(self, rk4):
        main = wrap(rk4, EffectiveOrderSpec(5, 4))
        with pytest.raises(DomainError, match="orders 3 and 4"):
            optimize_start_stop(main)

    def test_stage_counts_validated(self, ssprk33):
        main = wrap(ssprk33, EffectiveOrderSpec(3, 2))
        with pytest.raises(DomainError):
            optimize_start_stop(main, start_stages=1)
