import numpy as np
import pytest

from declip.clipping import hard_clip, masks_from_clipped, threshold_for_input_sdr
from declip.frames import FrameParams, FramePlan, TFCoeffs, analysis
from declip.signals import SampleMask, Signal
from declip.solver import (
    SolverConfig,
    declip_sspew,
    lambda_schedule,
    smooth_gradient,
    smooth_objective,
)
from declip.wavio import synth_signal

SMALL = FrameParams(window_length=128, hop=32, fft_length=128)


def all_reliable(n):
    return SampleMask(np.ones(n, bool), np.zeros(n, bool), np.zeros(n, bool))


def clipped_instance(seed, n=512, target=5.0, rate=8000):
    rng = np.random.default_rng(seed)
    x = Signal(0.9 * rng.standard_normal(n) / 3.0, rate)
    theta = threshold_for_input_sdr(x, target)
    y = hard_clip(x, theta)
    return x, y, masks_from_clipped(y, theta), theta


class TestLambdaSchedule:
    def test_geometric_with_exact_endpoints(self):
        cfg = SolverConfig(lambda_init=1e-1, lambda_target=1e-4, n_outer=20)
        grid = lambda_schedule(cfg)
        assert len(grid) == 20
        assert grid[0] == pytest.approx(1e-1)
        assert grid[-1] == 1e-4
        ratios = grid[1:] / grid[:-1]
        assert np.allclose(ratios, ratios[0], rtol=1e-9)

    def test_single_stage(self):
        cfg = SolverConfig(n_outer=1, lambda_init=1e-1, lambda_target=1e-3)
        assert lambda_schedule(cfg).tolist() == [1e-3]

    def test_nonincreasing(self):
        grid = lambda_schedule(SolverConfig(n_outer=7))
        assert all(b <= a for a, b in zip(grid, grid[1:]))


class TestSolverConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SolverConfig(lambda_target=0.0)
        with pytest.raises(ValueError):
            SolverConfig(lambda_target=1.0, lambda_init=0.1)
        with pytest.raises(ValueError):
            SolverConfig(n_outer=0)
        with pytest.raises(ValueError):
            SolverConfig(step=1.5)
        with pytest.raises(ValueError):
            SolverConfig(shrinkage="soft")
        with pytest.raises(ValueError):
            SolverConfig(restart="gradient")

    def test_ew_uses_singleton_shape(self):
        cfg = SolverConfig(shrinkage="EW")
        shape = cfg.effective_shape()
        assert (shape.time_extent, shape.freq_extent) == (1, 1)


class TestSmoothObjective:
    def test_zero_at_consistent_fit(self):
        rng = np.random.default_rng(0)
        y = Signal(0.4 * rng.standard_normal(512), 8000)
        z = analysis(y, SMALL)
        obj = smooth_objective(z, y, all_reliable(512), theta=1.0)
        assert obj == pytest.approx(0.0, abs=1e-20)

    def test_overshoot_is_free(self):
        # reconstruction exceeding theta on a high-clipped sample costs nothing
        y = Signal(np.zeros(512), 8000)
        x = np.zeros(512)
        x[200] = 0.9  # well above theta
        mask = all_reliable(512)
        mask.reliable[200] = False
        mask.high[200] = True
        z = analysis(Signal(x, 8000), SMALL)
        # the only residual source could be sample 200; reliable part matches
        y.samples[200] = 0.5
        assert smooth_objective(z, y, mask, theta=0.5) == pytest.approx(0.0, abs=1e-18)

    def test_hinge_contribution_hand_value(self):
        theta = 0.5
        y = Signal(np.zeros(512), 8000)
        x = np.zeros(512)
        x[100] = theta - 0.2  # undershoot by 0.2 on a high-clipped sample
        mask = all_reliable(512)
        mask.reliable[100] = False
        mask.high[100] = True
        y.samples[100] = theta
        z = analysis(Signal(x, 8000), SMALL)
        assert smooth_objective(z, y, mask, theta) == pytest.approx(0.02, abs=1e-12)

    def test_dimension_mismatch(self):
        y = Signal(np.zeros(512), 8000)
        z = analysis(y, SMALL)
        with pytest.raises(ValueError):
            smooth_objective(z, Signal(np.zeros(256), 8000), all_reliable(256), 0.5)


class TestSmoothGradient:
    def test_zero_at_global_minimum(self):
        rng = np.random.default_rng(1)
        y = Signal(0.3 * rng.standard_normal(512), 8000)
        z = analysis(y, SMALL)
        g = smooth_gradient(z, y, all_reliable(512), theta=1.0)
        assert np.max(np.abs(g.grid)) <= 1e-12

    def test_all_reliable_reduces_to_analysis_residual(self):
        rng = np.random.default_rng(2)
        y = Signal(0.3 * rng.standard_normal(512), 8000)
        plan = FramePlan(SMALL, 512)
        z = TFCoeffs(
            plan.forward(rng.standard_normal(512)), SMALL, 512, 8000
        )
        g = smooth_gradient(z, y, all_reliable(512), theta=5.0)
        expected = plan.forward(plan.backward(z.grid) - y.samples)
        assert np.max(np.abs(g.grid - expected)) <= 1e-12

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(3)
        for trial in range(5):
            x, y, mask, theta = clipped_instance(100 + trial)
            plan = FramePlan(SMALL, 512)
            grid = plan.forward(rng.standard_normal(512) * 0.3)
            z = TFCoeffs(grid, SMALL, 512, 8000)
            g = smooth_gradient(z, y, mask, theta)
            d = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
            d /= np.linalg.norm(d)
            eps = 1e-6
            plus = smooth_objective(TFCoeffs(grid + eps * d, SMALL, 512, 8000), y, mask, theta)
            minus = smooth_objective(TFCoeffs(grid - eps * d, SMALL, 512, 8000), y, mask, theta)
            fd = (plus - minus) / (2 * eps)
            inner = float(np.sum(np.conj(g.grid) * d).real)
            assert fd == pytest.approx(inner, rel=1e-5)


def tiny_config(**overrides):
    base = dict(
        lambda_target=1e-6,
        lambda_init=1e-2,
        n_outer=4,
        n_inner=40,
        frame=SMALL,
    )
    base.update(overrides)
    return SolverConfig(**base)


class TestDeclipSspew:
    def test_zero_signal_fixed_point(self):
        y = Signal(np.zeros(512), 8000)
        recon, trace = declip_sspew(y, all_reliable(512), 0.5, tiny_config())
        assert not recon.samples.any()
        assert all(r.objective == 0.0 for r in trace.records)

    def test_all_reliable_converges_to_observation(self):
        rng = np.random.default_rng(4)
        y = Signal(0.4 * rng.standard_normal(512), 8000)
        cfg = tiny_config(lambda_target=1e-8, lambda_init=1e-4, n_outer=6, n_inner=60)
        recon, _ = declip_sspew(y, all_reliable(512), 5.0, cfg)
        assert np.max(np.abs(recon.samples - y.samples)) <= 1e-4

    def test_trace_structure(self):
        x, y, mask, theta = clipped_instance(7)
        cfg = tiny_config()
        recon, trace = declip_sspew(y, mask, theta, cfg, ground_truth=x)
        assert len(trace) == cfg.n_outer
        lams = trace.lambdas
        assert lams[-1] == cfg.lambda_target
        assert all(b <= a for a, b in zip(lams, lams[1:]))
        assert all(r.inner_iterations == cfg.n_inner for r in trace.records)
        assert all(r.sdr_all is not None for r in trace.records)
        assert all(r.sdr_clipped is not None for r in trace.records)
        assert all(r.sdr_reliable is not None for r in trace.records)

    def test_sdr_columns_absent_without_truth(self):
        x, y, mask, theta = clipped_instance(8)
        _, trace = declip_sspew(y, mask, theta, tiny_config())
        assert all(r.sdr_all is None for r in trace.records)

    def test_deterministic(self):
        x, y, mask, theta = clipped_instance(9)
        r1, t1 = declip_sspew(y, mask, theta, tiny_config(), ground_truth=x)
        r2, t2 = declip_sspew(y, mask, theta, tiny_config(), ground_truth=x)
        assert np.array_equal(r1.samples, r2.samples)
        assert [rec.objective for rec in t1.records] == [
            rec.objective for rec in t2.records
        ]
        assert [rec.restarts for rec in t1.records] == [
            rec.restarts for rec in t2.records
        ]

    def test_improves_over_observation(self):
        x, y, mask, theta = clipped_instance(10, target=7.0)
        cfg = tiny_config(n_outer=8, n_inner=80)
        recon, trace = declip_sspew(y, mask, theta, cfg, ground_truth=x)
        assert trace.records[-1].sdr_all > 7.0

    def test_objective_nonincreasing_without_momentum(self):
        x, y, mask, theta = clipped_instance(11)
        cfg = tiny_config(momentum=False, step=1.0, n_outer=6, n_inner=50)
        _, trace = declip_sspew(y, mask, theta, cfg)
        objs = trace.objectives
        assert all(b <= a * (1 + 1e-12) for a, b in zip(objs, objs[1:]))

    def test_sparsity_trend_on_sine(self):
        # stage-end support grows as lambda decreases, once past the initial
        # pruning of the dense warm start
        x = synth_signal("sine", 0.5, 44100, seed=0)
        theta = threshold_for_input_sdr(x, 5.0)
        y = hard_clip(x, theta)
        mask = masks_from_clipped(y, theta)
        cfg = SolverConfig(
            n_outer=10,
            n_inner=100,
            frame=FrameParams(window_length=2048, hop=512, fft_length=2048),
        )
        _, trace = declip_sspew(y, mask, theta, cfg)
        nnz = [r.nonzero_coeffs for r in trace.records]
        start = int(np.argmin(nnz))
        tail = nnz[start:]
        assert len(tail) >= cfg.n_outer // 2
        assert all(b >= a for a, b in zip(tail, tail[1:]))

    def test_stage_callback_extras(self):
        x, y, mask, theta = clipped_instance(12)
        seen = []

        def cb(stage, lam, x_hat):
            seen.append((stage, lam, x_hat.shape))
            return {"marker": float(stage)}

        _, trace = declip_sspew(y, mask, theta, tiny_config(), stage_callback=cb)
        assert [s for s, _, _ in seen] == [1, 2, 3, 4]
        assert [r.extras["marker"] for r in trace.records] == [1.0, 2.0, 3.0, 4.0]

    def test_restart_counted(self):
        x, y, mask, theta = clipped_instance(13, target=3.0)
        cfg = tiny_config(n_outer=6, n_inner=80, lambda_init=1e-1)
        _, trace = declip_sspew(y, mask, theta, cfg)
        assert all(r.restarts >= 0 for r in trace.records)

    def test_inconsistent_observation_rejected(self):
        y = Signal(np.full(512, 0.9), 8000)
        with pytest.raises(ValueError):
            declip_sspew(y, all_reliable(512), 0.5, tiny_config())

    def test_mask_length_mismatch(self):
        y = Signal(np.zeros(512), 8000)
        with pytest.raises(ValueError):
            declip_sspew(y, all_reliable(256), 0.5, tiny_config())
