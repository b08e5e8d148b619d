"""3D Navier-Stokes manufactured solution: oracles and residual structure."""

import numpy as np
import pytest

from fvvisc import mesh, ns3d, physics
from fvvisc.recon import Strategy

CFG = physics.FlowConfig()


@pytest.fixture(scope="module")
def small_mesh():
    return mesh.generate_tet_mesh(3, perturbation=0.2, seed=21)


@pytest.fixture(scope="module")
def problem(small_mesh):
    return ns3d.NS3DProblem(small_mesh, Strategy.from_name("arithmetic"), CFG)


def fd_flux_divergence(points, cfg, h=1e-3):
    """4th-order central divergence of the analytic total flux."""
    div = np.zeros((len(points), 5))
    for d in range(3):
        for s, c in ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)):
            q = points.copy()
            q[:, d] += s * h
            div += c / (12.0 * h) * ns3d.mms_total_flux(q, cfg)[:, d, :]
    return div


class TestManufacturedState:
    def test_state_at_origin(self):
        w = ns3d.mms_state(np.zeros((1, 3)))[0]
        expect = np.array([1.0, 0.3, 0.2, 0.1, 1.0]) + 0.1
        assert np.abs(w - expect).max() < 1e-15

    def test_gradients_match_finite_differences(self):
        rng = np.random.default_rng(4)
        pts = rng.uniform(0.05, 0.45, (20, 3))
        g = ns3d.mms_gradients(pts)
        h = 1e-6
        for d in range(3):
            qp, qm = pts.copy(), pts.copy()
            qp[:, d] += h
            qm[:, d] -= h
            fd = (ns3d.mms_state(qp) - ns3d.mms_state(qm)) / (2.0 * h)
            assert np.abs(g[..., d] - fd).max() < 1e-8

    def test_state_positive_in_the_domain(self):
        rng = np.random.default_rng(5)
        pts = rng.uniform(0.0, 0.5, (500, 3))
        w = ns3d.mms_state(pts)
        assert np.all(w[:, 0] > 0.0)
        assert np.all(w[:, 4] > 0.0)


class TestForcingOracle:
    def test_forcing_matches_fd_flux_divergence(self):
        # independent oracle: the symbolic forcing against a 4th-order
        # finite-difference divergence of the numerically composed flux
        rng = np.random.default_rng(6)
        pts = rng.uniform(0.05, 0.45, (100, 3))
        f = ns3d.mms_forcing(pts, CFG)
        fd = fd_flux_divergence(pts, CFG)
        rel = np.abs(f - fd).max() / np.abs(f).max()
        assert rel < 1e-7

    def test_forcing_deterministic(self):
        pts = np.array([[0.1, 0.2, 0.3]])
        a = ns3d.mms_forcing(pts, CFG)
        b = ns3d.mms_forcing(pts, CFG)
        assert np.array_equal(a, b)


class TestResidual:
    def test_free_stream_preservation(self, problem, small_mesh):
        w = np.tile([1.0, 0.3, 0.2, 0.1, 1.0], (small_mesh.n_cells, 1))
        res = ns3d.residual_ns3d(problem, w, include_forcing=False)
        assert np.abs(res).max() < 1e-13

    def test_pinned_cells_zeroed(self, problem):
        res = ns3d.residual_ns3d(problem, problem.initial_state())
        assert np.abs(res[problem.pinned]).max() == 0.0

    def test_unclosed_residual_telescopes(self, problem, small_mesh):
        w = ns3d.mms_state(small_mesh.cell_centroid)
        res = ns3d.residual_ns3d(problem, w, with_closure=False)
        total_forcing = (problem.forcing
                         * small_mesh.cell_volume[:, None]).sum(axis=0)
        assert np.abs(res.sum(axis=0) + total_forcing).max() < 1e-10

    def test_residual_deterministic(self, problem):
        w = problem.initial_state()
        a = ns3d.residual_ns3d(problem, w)
        b = ns3d.residual_ns3d(problem, w)
        assert np.array_equal(a, b)

    def test_exact_solution_nearly_annihilates_the_residual(self):
        # Note: the per-volume truncation error of the scheme does NOT
        # converge on tetrahedral meshes (only the solution error does),
        # so the meaningful check is that the exact solution leaves a much
        # smaller residual than a zeroth-order guess on the same mesh.
        m = mesh.generate_tet_mesh(4, perturbation=0.2, seed=3)
        p = ns3d.NS3DProblem(m, Strategy.from_name("arithmetic"), CFG)
        r_exact = np.abs(ns3d.residual_ns3d(p, p.exact)).mean()
        r_init = np.abs(ns3d.residual_ns3d(p, p.initial_state())).mean()
        assert r_exact < 0.05 * r_init

    def test_unphysical_state_raises(self, problem, small_mesh):
        w = problem.initial_state()
        w[~problem.pinned, 4] = -1.0
        with pytest.raises((physics.NonpositiveTemperatureError,
                            physics.InvalidStateError)):
            ns3d.residual_ns3d(problem, w)

    def test_initial_state_is_free_stream_with_pinned_exact(self, problem):
        w0 = problem.initial_state()
        assert np.array_equal(w0[problem.pinned],
                              problem.exact[problem.pinned])
        inner = ~problem.pinned
        assert np.abs(w0[inner] - [1.0, 0.3, 0.2, 0.1, 1.0]).max() == 0.0
