"""Single-shot estimator, witness and success/error rate scans."""

from dataclasses import replace

import numpy as np
import pytest

from halfparity import closedform
from halfparity.config import SimulationConfig
from halfparity.estimator import (
    RateGrid,
    default_axis,
    scan_rates,
    single_shot_estimate,
    sustained_crossing,
    witness,
)
from halfparity.states import initial_state
from halfparity.trajectory import TrajectoryRecord, run_trajectory


def make_record(cfg, heat=0.0, steps=0.0, outcome=0.0):
    """Record scaffold with prescribed heat series and readout level."""
    n = cfg.n_steps
    return TrajectoryRecord(
        traj_index=0, config=cfg, wiener=np.zeros(n),
        record=np.broadcast_to(np.asarray(outcome, float), (n,)).copy(),
        running_outcome=np.broadcast_to(np.asarray(outcome, float), (n,)).copy(),
        populations=np.full((n + 1, 4), 0.25),
        heat_steps=np.broadcast_to(np.asarray(steps, float), (n,)).copy(),
        heat_steps_even=np.zeros(n), heat_steps_eo=np.zeros(n),
        heat=np.broadcast_to(np.asarray(heat, float), (n + 1,)).copy(),
        concurrence=np.zeros(n + 1),
        states=np.tile(initial_state(), (n + 1, 1)),
        state_steps=np.arange(n + 1, dtype=np.int64),
    )


def conditioned_record(cfg, j):
    """Record whose heat series follows the closed forms at fixed readout j:
    cumulative heat from the conditioned mean, per-step increments sized to
    the conditioned fluctuation."""
    t = cfg.times()
    heat = closedform.heat_given_outcome(j, t, cfg.gamma, cfg.epsilon)
    sigma_root = np.sqrt(closedform.heat_fluctuation(j, t[:-1], cfg.gamma))
    steps = 2.0 * cfg.epsilon * np.sqrt(cfg.gamma * cfg.dt) * sigma_root
    return make_record(cfg, heat=heat, steps=steps, outcome=j)


def test_witness_quiet_odd_frozen():
    cfg = SimulationConfig(t_max=2.0)
    rec = make_record(cfg)
    value = witness(rec, 1.0, 1.0)
    assert value == pytest.approx(-0.054439664473757657, rel=1e-12)
    nodes = np.arange(1000, 2000) * cfg.dt
    assert value == pytest.approx(
        -float(np.mean(closedform.heat_fluctuation(0.0, nodes))), rel=1e-12
    )


def test_witness_pinned_even():
    cfg = SimulationConfig(t_max=10.0)
    rec = make_record(cfg, heat=cfg.epsilon, outcome=1.0)
    value = witness(rec, 8.0, 1.0)
    assert 0.0 < 2.0 - value < 1e-6


def test_witness_rejects_inefficient_records():
    cfg = SimulationConfig(t_max=2.0, eta=0.5)
    with pytest.raises(ValueError):
        witness(make_record(cfg), 0.5, 0.5)


def test_witness_bound_chain():
    # a negative witness always certifies that the conditioned fluctuation
    # dominates the squared mean heat on window average
    cfg = SimulationConfig(t_max=10.0)
    for j in (0.0, 0.2, 0.5, 1.0):
        rec = conditioned_record(cfg, j)
        for t_i, delta_t in ((0.0, 0.3), (1.0, 2.0), (6.0, 4.0)):
            w = witness(rec, t_i, delta_t)
            if w < 0.0:
                k0 = round(t_i / cfg.dt)
                k1 = round((t_i + delta_t) / cfg.dt)
                t = np.arange(k0, k1) * cfg.dt
                q = closedform.heat_given_outcome(j, t, cfg.gamma)
                sig = closedform.heat_fluctuation(j, t, cfg.gamma)
                assert np.mean(sig - 2.0 * q * q) >= 0.0


def test_window_validation():
    cfg = SimulationConfig(t_max=2.0)
    rec = make_record(cfg)
    with pytest.raises(ValueError):
        witness(rec, -0.1, 0.5)
    with pytest.raises(ValueError):
        witness(rec, 0.5, 0.0)
    with pytest.raises(ValueError):
        witness(rec, 1.8, 0.5)  # extends past t_max
    with pytest.raises(ValueError):
        single_shot_estimate(rec, 0.0, 0.5, cfg.dt / 2.0)  # tau below dt
    with pytest.raises(ValueError):
        single_shot_estimate(rec, 0.00051, 0.0002, 0.3)  # window holds no step


def test_single_shot_frozen_even_record():
    cfg = SimulationConfig(t_max=10.0)
    rec = make_record(cfg, heat=cfg.epsilon, steps=0.0, outcome=1.0)
    assert single_shot_estimate(rec, 8.0, 1.0, 0.3) == 2.0


def test_single_shot_by_hand():
    # five coarse steps, every window sum done with explicit arithmetic
    cfg = SimulationConfig(gamma=0.05, dt=0.2, t_max=1.0)
    rec = make_record(cfg)
    rec.heat_steps[:] = [0.02, -0.04, 0.06, 0.02, -0.02]
    rec.heat[:] = [0.0, 0.1, 0.2, 0.1, 0.4, 0.2]
    # scale 2 eps sqrt(gamma dt) = 0.2, so scaled squares are
    # [0.01, 0.04, 0.09, 0.01, 0.01]
    expected = 0.5 * (
        (2.0 * 0.01 - np.sqrt((0.04 + 0.09) / 2.0))
        + (2.0 * 0.04 - np.sqrt((0.09 + 0.01) / 2.0))
    )
    assert single_shot_estimate(rec, 0.2, 0.4, 0.4) == pytest.approx(
        expected, rel=1e-12
    )
    # averaging windows that run past the end truncate there
    expected_tail = 0.5 * (
        (2.0 * 0.01 - np.sqrt((0.01 + 0.01) / 2.0))
        + (2.0 * 0.16 - np.sqrt(0.01 / 1.0))
    )
    assert single_shot_estimate(rec, 0.6, 0.4, 0.6) == pytest.approx(
        expected_tail, rel=1e-12
    )


def test_conditioned_odd_record_is_flagged_everywhere():
    # with zero mean heat and a fluctuation that never vanishes, the
    # estimate is negative in every window, including t_i = 0
    cfg = SimulationConfig(t_max=10.0)
    rec = conditioned_record(cfg, 0.0)
    for t_i, delta_t, tau in (
        (0.0, 0.3, 0.3), (0.0, 10.0, 0.1), (3.0, 0.3, 0.3),
        (5.0, 5.0, 5.0), (9.5, 0.5, 0.3),
    ):
        assert single_shot_estimate(rec, t_i, delta_t, tau) < 0.0


def test_conditioned_even_record_reads_positive_late():
    cfg = SimulationConfig(t_max=10.0)
    rec = conditioned_record(cfg, 1.0)
    late = single_shot_estimate(rec, 8.0, 2.0, 0.3)
    assert late >= 0.0
    assert late == pytest.approx(2.0, abs=0.01)
    assert single_shot_estimate(rec, 6.0, 4.0, 0.3) >= 0.0


def test_estimate_is_scale_normalized():
    # the estimator reads Q/eps and dQ/(2 eps sqrt(Gamma dt)), so scaling
    # the heat data together with eps changes nothing
    cfg = SimulationConfig(t_max=2.0)
    rec = conditioned_record(cfg, 0.3)
    scaled = TrajectoryRecord(
        traj_index=rec.traj_index, config=replace(cfg, epsilon=3.0),
        wiener=rec.wiener, record=rec.record,
        running_outcome=rec.running_outcome, populations=rec.populations,
        heat_steps=3.0 * rec.heat_steps,
        heat_steps_even=3.0 * rec.heat_steps_even,
        heat_steps_eo=3.0 * rec.heat_steps_eo, heat=3.0 * rec.heat,
        concurrence=rec.concurrence, states=rec.states,
        state_steps=rec.state_steps,
    )
    for t_i, delta_t, tau in ((0.0, 0.3, 0.3), (0.5, 1.0, 0.1)):
        assert single_shot_estimate(scaled, t_i, delta_t, tau) == pytest.approx(
            single_shot_estimate(rec, t_i, delta_t, tau), rel=1e-12
        )
        assert witness(scaled, t_i, delta_t) == pytest.approx(
            witness(rec, t_i, delta_t), rel=1e-12
        )


def test_scale_invariance_of_integrated_records():
    # re-integrating with a larger eps perturbs the populations at
    # O(eps^2 dt) through the deterministic phase term, so the estimates
    # agree only up to that step artifact
    base = SimulationConfig(t_max=2.0, master_seed=14)
    scaled = SimulationConfig(t_max=2.0, epsilon=3.0, master_seed=14)
    for i in range(5):
        a = run_trajectory(base, i)
        b = run_trajectory(scaled, i)
        for t_i, delta_t, tau in ((0.0, 0.3, 0.3), (1.0, 1.0, 1.0)):
            assert abs(
                single_shot_estimate(a, t_i, delta_t, tau)
                - single_shot_estimate(b, t_i, delta_t, tau)
            ) < 0.05


def test_scan_matches_single_estimates():
    cfg = SimulationConfig(t_max=2.0, n_traj=40, master_seed=5)
    t_i_values = np.array([0.0, 0.5, 1.0, 1.5])
    delta_t_values = np.array([0.5, 1.0])
    result = scan_rates(
        cfg, taus=(0.3, "delta_t"),
        t_i_values=t_i_values, delta_t_values=delta_t_values,
        cells=((0.5, 1.0, 0.3),),
    )
    records = [run_trajectory(cfg, i) for i in range(cfg.n_traj)]
    final_c = np.array([r.final_concurrence() for r in records])
    final_j = np.array([r.final_outcome for r in records])
    np.testing.assert_array_equal(result.final_concurrences, final_c)
    np.testing.assert_array_equal(result.final_outcomes, final_j)
    entangled = final_c >= 0.8
    n_ent = int(entangled.sum())
    assert result.grids[0].n_entangled == n_ent
    assert result.grids[0].n_separable == cfg.n_traj - n_ent

    for grid, tau in zip(result.grids, (0.3, None)):
        for i, t_i in enumerate(t_i_values):
            for l, delta_t in enumerate(delta_t_values):
                window = min(delta_t, cfg.t_max - t_i)
                tau_l = delta_t if tau is None else tau
                flags = np.array([
                    single_shot_estimate(r, t_i, window, tau_l) < 0.0
                    for r in records
                ])
                assert grid.success[i, l] == np.mean(flags[entangled])
                assert grid.error[i, l] == np.mean(flags[~entangled])

    cell = result.cells[0]
    flags = np.array(
        [single_shot_estimate(r, 0.5, 1.0, 0.3) < 0.0 for r in records]
    )
    assert cell.success_rate == np.mean(flags[entangled])
    assert cell.error_rate == np.mean(flags[~entangled])
    assert cell.n_entangled == n_ent


def test_rate_grid_nan_structure():
    cfg = SimulationConfig(t_max=2.0, n_traj=10, master_seed=3)
    grid = scan_rates(cfg).grids[0]
    assert grid.success.shape == (26, 26)
    # the delta_t = 0 column and the t_i = t_max row hold no steps
    nan_mask = np.isnan(grid.success)
    assert nan_mask.sum() == 26 + 26 - 1
    assert np.all(nan_mask[:, 0])
    assert np.all(nan_mask[-1, :])
    valid = ~nan_mask
    assert np.all(grid.success[valid] >= 0.0)
    assert np.all(grid.success[valid] <= 1.0)
    np.testing.assert_array_equal(nan_mask, np.isnan(grid.error))
    # windows that merely reach past t_max are truncated, not dropped
    assert np.isfinite(grid.success[20, 25])


def test_zero_class_rates_are_nan():
    cfg = SimulationConfig(t_max=2.0, n_traj=5, master_seed=1)
    all_entangled = scan_rates(
        cfg, t_i_values=[0.0, 1.0], delta_t_values=[0.5], threshold=0.0
    ).grids[0]
    assert all_entangled.n_separable == 0
    assert np.all(np.isnan(all_entangled.error))
    assert np.all(np.isfinite(all_entangled.success))
    all_separable = scan_rates(
        cfg, t_i_values=[0.0, 1.0], delta_t_values=[0.5], threshold=2.0
    ).grids[0]
    assert all_separable.n_entangled == 0
    assert np.all(np.isnan(all_separable.success))


def test_scan_validation():
    cfg = SimulationConfig(t_max=2.0, n_traj=2, master_seed=0)
    with pytest.raises(ValueError):
        scan_rates(cfg, t_i_values=[-0.5, 0.0], delta_t_values=[0.5])
    with pytest.raises(ValueError):
        scan_rates(cfg, taus=(cfg.dt / 3.0,))
    with pytest.raises(ValueError):
        scan_rates(cfg, cells=((1.9, 0.5, 0.3),))
    with pytest.raises(ValueError):
        scan_rates(cfg, cells=((0.0, 0.5, cfg.dt / 3.0),))


def _grid(success_cols, delta_t_values=(0.3,)):
    success = np.asarray(success_cols, dtype=float)
    if success.ndim == 1:
        success = success[:, None]
    return RateGrid(
        t_i_values=np.arange(success.shape[0], dtype=float),
        delta_t_values=np.asarray(delta_t_values, dtype=float),
        tau=None, eta=1.0, threshold=0.8,
        success=success, error=np.zeros_like(success),
        n_entangled=10, n_separable=10,
    )


def test_sustained_crossing_cases():
    assert sustained_crossing(_grid([0.9, 0.8, 0.7])) == 0.0
    assert sustained_crossing(_grid([0.6, 0.4, 0.7, 0.8, 0.9])) == 2.0
    assert sustained_crossing(_grid([0.9, 0.4, 0.9, 0.4, 0.9])) == 4.0
    assert np.isnan(sustained_crossing(_grid([0.4, 0.3, 0.2])))
    assert np.isnan(sustained_crossing(_grid([np.nan, np.nan])))
    # invalid cells neither qualify nor break a run
    assert sustained_crossing(_grid([np.nan, 0.7, 0.8])) == 1.0
    assert sustained_crossing(_grid([0.4, 0.6, 0.7, np.nan])) == 1.0
    # nearest delta_t row wins
    two = _grid(
        np.column_stack(([0.0, 0.0], [1.0, 1.0])), delta_t_values=(0.1, 0.3)
    )
    assert sustained_crossing(two, delta_t=0.28) == 0.0
    assert np.isnan(sustained_crossing(two, delta_t=0.12))


def test_default_axis():
    cfg = SimulationConfig(t_max=4.0)
    axis = default_axis(cfg)
    assert axis.shape == (26,)
    assert axis[0] == 0.0
    assert axis[-1] == 4.0
    np.testing.assert_allclose(default_axis(cfg, points=5, span=1.0),
                               [0.0, 0.25, 0.5, 0.75, 1.0])
    with pytest.raises(ValueError):
        default_axis(cfg, points=1)
    with pytest.raises(ValueError):
        default_axis(cfg, span=5.0)
    with pytest.raises(ValueError):
        default_axis(cfg, span=0.0)


def test_rate_grid_cell_lookup():
    grid = _grid(
        np.array([[0.1, 0.2], [0.3, 0.4]]), delta_t_values=(0.5, 1.0)
    )
    cell = grid.cell(0.9, 0.6)
    assert cell.t_i == 1.0
    assert cell.delta_t == 0.5
    assert cell.tau == 0.5  # tracks the window when the grid's tau is None
    assert cell.success_rate == 0.3
    assert replace(grid, tau=0.2).cell(0.0, 1.0).tau == 0.2


def _isotonic_fit(y):
    # pool adjacent violators, unit weights
    levels = []
    weights = []
    for value in y:
        levels.append(float(value))
        weights.append(1.0)
        while len(levels) > 1 and levels[-2] > levels[-1]:
            pooled = (
                levels[-1] * weights[-1] + levels[-2] * weights[-2]
            ) / (weights[-1] + weights[-2])
            total = weights[-1] + weights[-2]
            levels[-2:] = [pooled]
            weights[-2:] = [total]
    return np.concatenate(
        [np.full(int(w), v) for v, w in zip(levels, weights)]
    )


def test_success_trend_in_start_time():
    # for fixed delta_t and tau the success rate is non-decreasing in t_i up
    # to statistical noise: the residual of a non-decreasing isotonic fit
    # stays small in every column
    cfg = SimulationConfig(n_traj=400, master_seed=11)
    result = scan_rates(cfg, taus=("delta_t", 0.4))
    for grid in result.grids:
        for l in range(grid.delta_t_values.shape[0]):
            col = grid.success[:, l]
            seen = np.isfinite(col)
            if seen.sum() < 2:
                continue
            residual = col[seen] - _isotonic_fit(col[seen])
            assert np.sqrt(np.mean(residual**2)) < 0.05
