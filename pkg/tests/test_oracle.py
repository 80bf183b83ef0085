"""Reference solvers: determinism and feasibility of what they return."""

import numpy as np
import pytest

from cptlottery import (
    OracleConfig,
    oracle_design,
    oracle_fixed,
    oracle_gain,
    oracle_loss,
)

from conftest import split_weights


@pytest.fixture
def cfg():
    return OracleConfig(grid_points=20_000, multistarts=6, sample_count=5_000, seed=7)


class TestDeterminism:
    def test_gain(self, canada, cfg):
        h = split_weights(canada, 12, 5).h_plus
        a = oracle_gain(canada, h, 1.3, cfg)
        b = oracle_gain(canada, h, 1.3, cfg)
        assert np.array_equal(a[0], b[0]) and a[1] == b[1]

    def test_loss(self, canada, cfg):
        h = split_weights(canada, 12, 5).h_minus
        a = oracle_loss(canada, h, 1.3, cfg)
        b = oracle_loss(canada, h, 1.3, cfg)
        assert np.array_equal(a[0], b[0]) and a[1] == b[1]

    def test_design(self, canada, cfg):
        a = oracle_design(canada, 5, cfg)
        b = oracle_design(canada, 5, cfg)
        assert (a.n_minus, a.v_star, a.profit) == (b.n_minus, b.v_star, b.profit)

    def test_fixed(self, usa, cfg):
        a = oracle_fixed(usa, 5, -2.0, cfg)
        b = oracle_fixed(usa, 5, -2.0, cfg)
        assert (a.n_minus, a.v_star, a.profit) == (b.n_minus, b.v_star, b.profit)


class TestFeasibility:
    def test_gain_constraints(self, canada, cfg):
        h = split_weights(canada, 12, 5).h_plus
        y, _ = oracle_gain(canada, h, 2.0, cfg)
        assert abs(float(h @ y) - 2.0) <= 1e-9 * 2.0
        assert np.all(np.diff(y) >= -1e-12)
        assert y[0] >= -1e-12

    def test_loss_constraints(self, canada, cfg):
        h = split_weights(canada, 12, 5).h_minus
        y, _ = oracle_loss(canada, h, 2.0, cfg)
        assert abs(float(h @ y) - 2.0) <= 1e-9 * 2.0
        assert np.all(np.diff(y) <= 1e-12)
        assert np.all(y >= -1e-12)

    def test_trivial_cases(self, canada, cfg):
        hp = split_weights(canada, 6, 5).h_plus
        y, obj = oracle_gain(canada, hp, 0.0, cfg)
        assert np.all(y == 0.0) and obj == 0.0
        assert oracle_gain(canada, hp, 1.0, cfg)[0] == pytest.approx([1.0 / hp[0]], rel=1e-7)
        hm = split_weights(canada, 6, 1).h_minus
        assert oracle_loss(canada, hm, 1.0, cfg)[0] == pytest.approx([1.0 / hm[0]], rel=1e-9)

    def test_size_limits(self, canada, cfg):
        with pytest.raises(ValueError):
            oracle_gain(canada, np.full(13, 0.05), 1.0, cfg)
        with pytest.raises(ValueError):
            oracle_design(canada, 9, cfg)
        with pytest.raises(ValueError):
            oracle_fixed(canada, 9, -2.0, cfg)

    def test_two_ticket_designs(self, canada, usa, cfg):
        d = oracle_design(canada, 2, cfg)
        assert (d.n_minus, d.n_plus) == (1, 1)
        f = oracle_fixed(usa, 2, -2.0, cfg)
        assert f.status in ("finite", "zero")
