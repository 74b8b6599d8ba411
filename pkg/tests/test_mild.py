"""Tests for the mild-solution machinery: trajectories, the Duhamel term,
and the Picard iteration with its contraction certificate."""

import dataclasses
import math

import numpy as np
import pytest
from scipy.integrate import quad_vec

from mnns.errors import (
    ConfigError,
    ExponentError,
    FieldError,
    GuardError,
)
from mnns.exponents import MixedExponents
from mnns.grid import ScalarField, TensorGrid, VectorField
from mnns.mild import (
    ContractionCertificate,
    SolverConfig,
    Trajectory,
    bilinear_probe,
    duhamel_bilinear,
    load_trajectory,
    local_solve,
    nonlinear_term,
    picard_solve,
    save_trajectory,
    time_mesh,
    xspace_norm,
    y_shape_constant,
    yspace_norm,
)
from mnns.sampling import taylor_green_2d, taylor_green_3d
from mnns.spectral import heat_propagate, leray_project, vector_gradient


def torus3(m=16):
    return TensorGrid((m, m, m), (np.pi, np.pi, np.pi), periodic=True)


def base_config(**overrides):
    kwargs = dict(
        p=MixedExponents((3.0, 3.0, 3.0)),
        q=MixedExponents((6.0, 6.0, 6.0)),
        T=1.0,
        nodes=6,
        quad_nodes=12,
        picard_tol=1e-6,
        max_iter=10,
        mesh_span=256.0,
    )
    kwargs.update(overrides)
    return SolverConfig(**kwargs)


def rel_l2(a: VectorField, b: VectorField) -> float:
    num = den = 0.0
    for ca, cb in zip(a.components, b.components):
        num += float(np.sum((ca.samples - cb.samples) ** 2))
        den += float(np.sum(cb.samples**2))
    return math.sqrt(num / den) if den > 0.0 else math.sqrt(num)


class TestSolverConfig:
    def test_delta_is_the_q_reciprocal_sum(self):
        cfg = base_config()
        assert cfg.delta == pytest.approx(0.5)

    def test_rejects_subcritical_axis(self):
        with pytest.raises(ConfigError, match="must lie in \\(2, inf\\)"):
            base_config(p=MixedExponents((2.0, 4.0, 4.0)))

    def test_rejects_q_below_p(self):
        with pytest.raises(ConfigError, match="q_k must lie in"):
            base_config(q=MixedExponents((2.5, 6.0, 6.0)))

    def test_rejects_noncritical_sum(self):
        with pytest.raises(ConfigError, match="sum of 1/p_k must equal 1"):
            base_config(p=MixedExponents((4.0, 4.0, 4.0)))

    def test_two_axis_impossibility_is_explained(self):
        with pytest.raises(ConfigError, match="outside this solver's scope"):
            SolverConfig(
                p=MixedExponents((3.0, 3.0)), q=MixedExponents((6.0, 6.0))
            )

    def test_rejects_degenerate_delta(self):
        with pytest.raises(ConfigError, match="delta"):
            base_config(q=MixedExponents((40.0, 40.0, 40.0)))

    @pytest.mark.parametrize(
        "field,value",
        [
            ("T", 0.0),
            ("nodes", 1),
            ("quad_nodes", 0),
            ("picard_tol", 0.0),
            ("max_iter", 0),
            ("mesh_span", 1.0),
        ],
    )
    def test_rejects_bad_knobs(self, field, value):
        with pytest.raises(ConfigError):
            base_config(**{field: value})

    def test_with_horizon_changes_only_t(self):
        cfg = base_config()
        shrunk = cfg.with_horizon(0.25)
        assert shrunk.T == 0.25
        assert dataclasses.replace(shrunk, T=cfg.T) == cfg


class TestTimeMesh:
    def test_endpoints_and_geometry(self):
        cfg = base_config(nodes=5, mesh_span=16.0, T=2.0)
        ts = time_mesh(cfg)
        assert len(ts) == 5
        assert ts[-1] == pytest.approx(2.0)
        assert ts[0] == pytest.approx(2.0 / 16.0)
        ratios = [b / a for a, b in zip(ts, ts[1:])]
        assert all(r == pytest.approx(ratios[0]) for r in ratios)


class TestTrajectory:
    def test_heat_flow_evaluates_exactly_off_node(self):
        grid = torus3()
        a0 = taylor_green_3d(grid, amplitude=0.8)
        cfg = base_config()
        traj = Trajectory.from_heat_flow(a0, time_mesh(cfg), cfg.delta)
        for s in (0.37, traj.times[0] / 3.0, 0.999):
            direct = heat_propagate(a0, s)
            assert (traj.state_at(s) - direct).max_abs() <= 1e-12

    def test_node_evaluation_returns_stored_state(self):
        grid = torus3(8)
        a0 = taylor_green_3d(grid)
        cfg = base_config(nodes=4)
        traj = Trajectory.from_heat_flow(a0, time_mesh(cfg), cfg.delta)
        for i, t in enumerate(traj.times):
            assert traj.state_at(t) is traj.states[i]

    def test_rejects_out_of_range_times(self):
        grid = torus3(8)
        traj = Trajectory.from_heat_flow(
            taylor_green_3d(grid), (0.5, 1.0), 0.5
        )
        with pytest.raises(FieldError):
            traj.state_at(0.0)
        with pytest.raises(FieldError):
            traj.state_at(1.5)

    def test_rejects_unsorted_times(self):
        grid = torus3(8)
        a0 = taylor_green_3d(grid)
        with pytest.raises(FieldError, match="increase strictly"):
            Trajectory.build(a0, (1.0, 0.5), [a0, a0], 0.5)

    def test_rejects_misaligned_states(self):
        grid = torus3(8)
        a0 = taylor_green_3d(grid)
        with pytest.raises(FieldError, match="align"):
            Trajectory.build(a0, (0.5, 1.0), [a0], 0.5)

    def test_rejects_divergent_state(self):
        grid = torus3(8)
        a0 = taylor_green_3d(grid)
        bad = VectorField.from_profiles(
            grid,
            (
                lambda x, y, z: np.sin(x),
                lambda x, y, z: np.zeros(np.broadcast(x, y, z).shape),
                lambda x, y, z: np.zeros(np.broadcast(x, y, z).shape),
            ),
        )
        with pytest.raises(FieldError, match="divergence"):
            Trajectory.build(a0, (0.5, 1.0), [a0, bad], 0.5)


class TestStateNorms:
    def test_single_node_hand_value(self):
        """X and Y norms of a one-node trajectory reduce to weighted sums."""
        grid = TensorGrid((16, 16, 16), (np.pi, np.pi, np.pi), periodic=True)
        a0 = taylor_green_3d(grid, amplitude=1.0)
        cfg = base_config()
        t = 0.25
        traj = Trajectory.build(a0, (t,), [a0], cfg.delta)
        from mnns.norms import aggregate_norm

        state_q = aggregate_norm(a0.components, cfg.q)
        state_p = aggregate_norm(a0.components, cfg.p)
        grads = [g for row in vector_gradient(a0) for g in row]
        grad_p = aggregate_norm(grads, cfg.p)
        expected_x = t ** 0.25 * state_q + t ** 0.5 * grad_p
        expected_y = state_p + t ** 0.5 * grad_p
        assert xspace_norm(traj, cfg) == pytest.approx(expected_x, rel=1e-12)
        assert yspace_norm(traj, cfg) == pytest.approx(expected_y, rel=1e-12)

    def test_dimension_mismatch_rejected(self):
        grid = TensorGrid((16, 16), (np.pi, np.pi), periodic=True)
        u = taylor_green_2d(grid)
        traj = Trajectory.build(u, (1.0,), [u], 0.5)
        with pytest.raises(ExponentError):
            xspace_norm(traj, base_config())


class TestNonlinearTerm:
    def test_constant_advection_of_shear(self):
        """(e_2 . grad)(sin x2, 0, 0) = (cos x2, 0, 0), already solenoidal."""
        grid = torus3()
        zeros = lambda x, y, z: np.zeros(np.broadcast(x, y, z).shape)
        u = VectorField.from_profiles(
            grid, (zeros, lambda x, y, z: np.ones(np.broadcast(x, y, z).shape), zeros)
        )
        v = VectorField.from_profiles(grid, (lambda x, y, z: np.sin(y), zeros, zeros))
        got = nonlinear_term(u, vector_gradient(v))
        expected = VectorField.from_profiles(
            grid, (lambda x, y, z: np.cos(y), zeros, zeros)
        )
        assert (got - expected).max_abs() <= 1e-12

    def test_planar_vortex_self_advection_projects_away(self):
        """The two-axis vortex pushes against a pure pressure gradient."""
        grid = TensorGrid((32, 32), (np.pi, np.pi), periodic=True)
        u = taylor_green_2d(grid, amplitude=1.7)
        got = nonlinear_term(u, vector_gradient(u))
        assert got.max_abs() <= 1e-12

    def test_three_axis_vortex_convects(self):
        grid = torus3()
        u = taylor_green_3d(grid)
        assert nonlinear_term(u, vector_gradient(u)).max_abs() > 0.01


class TestDuhamelBilinear:
    def test_matches_adaptive_quadrature(self):
        """The graded midpoint rule agrees with quad_vec on the same integrand."""
        grid = torus3()
        a0 = taylor_green_3d(grid, amplitude=1.0)
        cfg = base_config(quad_nodes=24)
        times = time_mesh(cfg)
        traj = Trajectory.build(a0, times, [a0] * len(times), cfg.delta)

        shape = (3,) + grid.numpy_shape
        for t in (times[0], times[-1]):

            def integrand(s):
                us = traj.state_at(s)
                term = nonlinear_term(us, vector_gradient(us))
                flowed = heat_propagate(term, t - s)
                return np.stack([c.samples for c in flowed.components])

            val, _ = quad_vec(integrand, 0.0, t, epsabs=1e-12, epsrel=1e-10)
            oracle = VectorField.from_component_samples(
                grid, [-val[i] for i in range(3)]
            )
            got = duhamel_bilinear(traj, traj, t, cfg)
            assert rel_l2(got, oracle) <= 1e-3

    def test_quadrature_refinement_converges_fast(self):
        grid = torus3()
        a0 = taylor_green_3d(grid, amplitude=1.0)
        cfg = base_config()
        times = time_mesh(cfg)
        traj = Trajectory.build(a0, times, [a0] * len(times), cfg.delta)
        t = times[-1]
        results = {}
        for K in (8, 16, 32):
            results[K] = duhamel_bilinear(
                traj, traj, t, dataclasses.replace(cfg, quad_nodes=K)
            )
        coarse = rel_l2(results[8], results[32])
        fine = rel_l2(results[16], results[32])
        assert fine < coarse / 2.0

    def test_rejects_time_outside_horizon(self):
        grid = torus3(8)
        a0 = taylor_green_3d(grid)
        cfg = base_config(nodes=2)
        traj = Trajectory.from_heat_flow(a0, time_mesh(cfg), cfg.delta)
        with pytest.raises(FieldError):
            duhamel_bilinear(traj, traj, 1.5, cfg)

    def test_rejects_mismatched_meshes(self):
        grid = torus3(8)
        a0 = taylor_green_3d(grid)
        u = Trajectory.from_heat_flow(a0, (0.5, 1.0), 0.5)
        v = Trajectory.from_heat_flow(a0, (0.4, 1.0), 0.5)
        with pytest.raises(FieldError, match="share"):
            duhamel_bilinear(u, v, 1.0, base_config())


class TestPicardSolve:
    def test_small_data_converges_with_certificate(self):
        grid = torus3()
        a0 = taylor_green_3d(grid, amplitude=0.5)
        cfg = base_config(nodes=8)
        traj, cert = picard_solve(a0, cfg)
        assert cert.converged
        assert cert.iterations <= cfg.max_iter
        assert cert.satisfied and cert.product < 1.0
        assert all(r < 1.0 for r in cert.iteration_ratios)
        assert cert.residual_x_norm <= 2.0 * cfg.picard_tol
        assert traj.node_count == cfg.nodes
        # the solution leaves the heat flow: the correction is genuine
        flow = Trajectory.from_heat_flow(a0, traj.times, cfg.delta)
        assert xspace_norm(
            Trajectory.build(
                VectorField.zeros(grid),
                traj.times,
                [a - b for a, b in zip(traj.states, flow.states)],
                cfg.delta,
            ),
            cfg,
        ) > 1e-4

    def test_zero_data_fixed_point(self):
        grid = torus3(8)
        a0 = VectorField.zeros(grid)
        traj, cert = picard_solve(a0, base_config(nodes=3))
        assert cert.converged and cert.iterations == 1
        assert cert.u0_x_norm == 0.0 and cert.product == 0.0
        assert all(s.max_abs() == 0.0 for s in traj.states)

    def test_guard_trips_on_large_data(self):
        grid = torus3()
        a0 = taylor_green_3d(grid, amplitude=60.0)
        cfg = base_config(nodes=4, smallness_guard=True, max_iter=3)
        with pytest.raises(GuardError, match="smallness guard"):
            picard_solve(a0, cfg)

    def test_divergent_data_is_projected_with_warning(self):
        grid = torus3(8)
        zeros = lambda x, y, z: np.zeros(np.broadcast(x, y, z).shape)
        a0 = VectorField.from_profiles(
            grid, (lambda x, y, z: 0.1 * np.sin(x), zeros, zeros)
        )
        with pytest.warns(UserWarning, match="projecting"):
            traj, cert = picard_solve(a0, base_config(nodes=3, max_iter=2))
        assert (traj.initial - leray_project(a0)).max_abs() <= 1e-12


class TestLocalSolve:
    def test_halves_horizon_for_large_data(self):
        grid = torus3()
        a0 = taylor_green_3d(grid, amplitude=8.0)
        cfg = base_config(nodes=6, max_iter=16)
        traj, cert, t0 = local_solve(a0, cfg)
        assert cert.converged
        assert t0 < cfg.T
        halvings = math.log2(cfg.T / t0)
        assert halvings == pytest.approx(round(halvings))
        assert traj.times[-1] == pytest.approx(t0)
        assert y_shape_constant(traj, cfg.with_horizon(t0), traj.initial) > 0.0

    def test_small_data_keeps_full_horizon(self):
        grid = torus3()
        a0 = taylor_green_3d(grid, amplitude=0.3)
        cfg = base_config(nodes=6)
        traj, cert, t0 = local_solve(a0, cfg)
        assert t0 == cfg.T and cert.converged

    def test_zero_data_short_circuits(self):
        grid = torus3(8)
        traj, cert, t0 = local_solve(VectorField.zeros(grid), base_config(nodes=3))
        assert t0 == 1.0 and cert.converged

    @pytest.mark.parametrize("margin", [0.0, -0.5, 1.5])
    def test_margin_validated(self, margin):
        grid = torus3(8)
        with pytest.raises(ConfigError, match="margin"):
            local_solve(
                taylor_green_3d(grid), base_config(nodes=3), margin=margin
            )


class TestBilinearProbe:
    def test_unit_splits_have_no_gradient_variant(self):
        grid = torus3()
        a0 = taylor_green_3d(grid, amplitude=1.0)
        cfg = base_config(nodes=4)
        traj = Trajectory.from_heat_flow(a0, time_mesh(cfg), cfg.delta)
        ones = (1.0, 1.0, 1.0)
        out = bilinear_probe(traj, traj, cfg, ones, ones, ones)
        assert len(out["ratios"]) == 4
        assert 0.0 < out["max_ratio"] <= 5.0
        assert out["gradient_ratios"] == []
        assert out["max_gradient_ratio"] is None

    def test_smaller_target_exponent_enables_gradient_variant(self):
        grid = torus3()
        a0 = taylor_green_3d(grid, amplitude=1.0)
        cfg = base_config(nodes=4)
        traj = Trajectory.from_heat_flow(a0, time_mesh(cfg), cfg.delta)
        ones = (1.0, 1.0, 1.0)
        out = bilinear_probe(traj, traj, cfg, ones, ones, (1.5, 1.5, 1.5))
        assert len(out["gradient_ratios"]) == 4
        assert 0.0 < out["max_gradient_ratio"] <= 5.0

    def test_split_validation(self):
        grid = torus3(8)
        cfg = base_config(nodes=2)
        traj = Trajectory.from_heat_flow(
            taylor_green_3d(grid), time_mesh(cfg), cfg.delta
        )
        ones = (1.0, 1.0, 1.0)
        with pytest.raises(ExponentError, match="entries"):
            bilinear_probe(traj, traj, cfg, (1.0, 1.0), ones, ones)
        with pytest.raises(ExponentError, match="gamma_k"):
            bilinear_probe(traj, traj, cfg, ones, ones, (2.5, 1.0, 1.0))
        with pytest.raises(ExponentError, match="alpha_k \\+ beta_k < p_k"):
            bilinear_probe(traj, traj, cfg, (1.6, 1.0, 1.0), (1.6, 1.0, 1.0), ones)


class TestSerialization:
    def test_trajectory_round_trip(self, tmp_path):
        grid = torus3(8)
        a0 = taylor_green_3d(grid, amplitude=0.7)
        cfg = base_config(nodes=3)
        traj = Trajectory.from_heat_flow(a0, time_mesh(cfg), cfg.delta)
        save_trajectory(traj, tmp_path / "run", cfg)
        back = load_trajectory(tmp_path / "run")
        assert back.times == traj.times
        assert back.delta == traj.delta
        assert (back.initial - traj.initial).max_abs() == 0.0
        for a, b in zip(back.states, traj.states):
            assert (a - b).max_abs() == 0.0
        for rows_a, rows_b in zip(back.gradient_states, traj.gradient_states):
            for row_a, row_b in zip(rows_a, rows_b):
                for ga, gb in zip(row_a, row_b):
                    np.testing.assert_array_equal(ga.samples, gb.samples)
        s = 0.4 * traj.times[-1]
        assert (back.state_at(s) - traj.state_at(s)).max_abs() <= 1e-14

    def test_certificate_round_trip(self):
        cert = ContractionCertificate(
            u0_x_norm=1.2,
            bilinear_constant_estimate=0.03,
            linear_constant_estimate=1.1,
            product=0.144,
            satisfied=True,
            iteration_ratios=(0.4, 0.35),
            converged=True,
            iterations=3,
            residual_x_norm=1e-8,
        )
        assert ContractionCertificate.from_json(cert.to_json()) == cert
