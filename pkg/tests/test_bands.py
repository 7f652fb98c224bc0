import numpy as np
import pytest

from blochzener import (
    LatticeWindow,
    ModelParams,
    band_structure,
    bloch_coefficients,
    bloch_wave_amplitude,
    build_hamiltonian,
    coupling,
    dispersion,
    landau_zener_probability,
)
from blochzener.bands import bloch_state, fold_reduced_zone
from blochzener.errors import DegenerateBlochStateError

P18 = ModelParams(delta=18.0, Delta=80.0, F=1.0)


class TestDispersion:
    def test_zone_edge_gives_half_gap(self):
        kappa = np.pi / 2  # kappa*d = pi/2 with d = 1
        assert dispersion(0, kappa, P18) == pytest.approx(-9.0, abs=1e-12)
        assert dispersion(1, kappa, P18) == pytest.approx(9.0, abs=1e-12)

    def test_zone_centre_upper(self):
        # sqrt(18^2 + 80^2)/2 = 82/2 exactly
        assert dispersion(1, 0.0, P18) == pytest.approx(41.0, abs=1e-12)

    def test_single_band_edge(self):
        p = ModelParams(delta=0.0, Delta=80.0, F=1.0)
        assert dispersion(0, 0.0, p) == pytest.approx(-40.0, abs=1e-12)

    def test_periodic_and_even(self, rng):
        for kappa in rng.uniform(-3.0, 3.0, 25):
            e = dispersion(0, kappa, P18)
            assert dispersion(0, kappa + np.pi, P18) == pytest.approx(e, rel=1e-13)
            assert dispersion(0, -kappa, P18) == pytest.approx(e, rel=1e-13)

    def test_gap_is_delta(self):
        kgrid = np.linspace(-np.pi / 2, np.pi / 2, 4001)
        gap = dispersion(1, kgrid, P18) - dispersion(0, kgrid, P18)
        assert gap.min() == pytest.approx(18.0, abs=1e-10)
        assert np.all(gap >= 18.0 - 1e-10)

    def test_bandwidth_sign_invariance(self, rng):
        pm = ModelParams(delta=18.0, Delta=-80.0, F=1.0)
        for kappa in rng.uniform(-2.0, 2.0, 10):
            assert dispersion(0, kappa, pm) == dispersion(0, kappa, P18)

    def test_delta_sign_swaps_labels(self):
        pm = ModelParams(delta=-18.0, Delta=80.0, F=1.0)
        assert dispersion(0, 0.3, pm) == pytest.approx(-dispersion(0, 0.3, P18))

    def test_bad_band_index(self):
        with pytest.raises(ValueError):
            dispersion(2, 0.0, P18)


class TestBlochCoefficients:
    def test_zone_centre_values(self):
        u, v, N = bloch_coefficients(0.0, P18)
        assert u == pytest.approx(80.0)
        assert v == pytest.approx(100.0)  # 18 + sqrt(6724) = 18 + 82
        assert N == pytest.approx(np.pi * (6400.0 + 10000.0))

    def test_zone_edge(self):
        u, v, _ = bloch_coefficients(np.pi / 2, P18)
        assert abs(u) < 1e-10
        assert v == pytest.approx(2 * 18.0)

    def test_degenerate_limit_convention(self):
        p = ModelParams(delta=0.0, Delta=80.0, F=1.0)
        u, v, _ = bloch_coefficients(0.0, p)
        assert u == pytest.approx(80.0)
        assert v == pytest.approx(80.0)

    def test_degenerate_point_raises(self):
        p = ModelParams(delta=0.0, Delta=80.0, F=1.0)
        with pytest.raises(DegenerateBlochStateError):
            bloch_coefficients(np.pi / 2, p)


class TestBlochWaves:
    def test_discrete_orthonormality(self):
        w = LatticeWindow(-100, 99, guard=10)  # even number of sites
        kappa = 0.37
        chi0 = bloch_state(0, kappa, w, P18)
        chi1 = bloch_state(1, kappa, w, P18)
        expected = w.n_sites * P18.d / (2 * np.pi)
        assert np.vdot(chi0, chi0).real == pytest.approx(expected, rel=1e-12)
        assert np.vdot(chi1, chi1).real == pytest.approx(expected, rel=1e-12)
        assert abs(np.vdot(chi1, chi0)) < 1e-10

    def test_cross_kappa_orthogonality(self):
        w = LatticeWindow(-100, 99, guard=10)
        # kappa values separated by a reciprocal-lattice-compatible spacing
        k1 = 2 * np.pi * 5 / w.n_sites
        k2 = 2 * np.pi * 11 / w.n_sites
        chi_a = bloch_state(0, k1, w, P18)
        chi_b = bloch_state(0, k2, w, P18)
        assert abs(np.vdot(chi_a, chi_b)) < 1e-10

    def test_translation_eigenrelation(self):
        # T_{-2} |chi> = e^{-2 i kappa d} |chi> away from the walls
        w = LatticeWindow(-50, 50, guard=5)
        kappa = -0.81
        chi = bloch_state(0, kappa, w, P18)
        shifted = np.zeros_like(chi)
        shifted[2:] = chi[:-2]  # (T_{-2} psi)_n = psi_{n-2}
        phase = np.exp(-2j * kappa * P18.d)
        assert np.allclose(shifted[5:-5], phase * chi[5:-5], atol=1e-12)

    def test_zone_edge_even_sites_empty_lower_band(self):
        w = LatticeWindow(-10, 10, guard=1)
        chi = bloch_state(0, np.pi / 2, w, P18)
        even = np.mod(w.sites, 2) == 0
        assert np.max(np.abs(chi[even])) < 1e-12

    def test_periodic_in_pi_over_d(self):
        w = LatticeWindow(-10, 10, guard=1)
        a = bloch_state(0, 0.4, w, P18)
        b = bloch_state(0, 0.4 + np.pi, w, P18)
        assert np.allclose(a, b, atol=1e-12)


class TestCoupling:
    def test_zero_at_zone_centre(self):
        assert coupling(0.0, P18) == 0.0

    def test_zone_edge_magnitude(self):
        # |M| = Fd Delta / (2 delta) at the zone edge
        m = coupling(np.pi / 2, P18)
        assert abs(m) == pytest.approx(80.0 / 36.0, rel=1e-12)

    def test_zero_gap_zero_coupling(self):
        p = ModelParams(delta=0.0, Delta=80.0, F=1.0)
        kgrid = np.linspace(-np.pi / 2, np.pi / 2, 101)
        assert np.all(coupling(kgrid, p) == 0.0)

    def test_conjugation_symmetry(self, rng):
        for kappa in rng.uniform(-1.5, 1.5, 20):
            assert coupling(-kappa, P18) == pytest.approx(np.conj(coupling(kappa, P18)))

    def test_maximal_at_edge(self):
        kgrid = np.linspace(-np.pi / 2, np.pi / 2, 1001)
        mags = np.abs(coupling(kgrid, P18))
        assert mags.argmax() in (0, 1000)


class TestLandauZener:
    def test_limits(self):
        assert landau_zener_probability(ModelParams(0.0, 80.0, 1.0)) == 1.0
        assert landau_zener_probability(ModelParams(1e3, 80.0, 1.0)) < 1e-300

    def test_figure_parameters(self):
        p = ModelParams(delta=6.734, Delta=80.0, F=1.0)
        expected = np.exp(-np.pi * 6.734**2 / 160.0)
        got = landau_zener_probability(p)
        assert got == pytest.approx(expected, rel=1e-15)
        assert got == pytest.approx(0.4105, abs=5e-5)

    def test_zero_product_raises(self):
        with pytest.raises(ZeroDivisionError):
            landau_zener_probability(ModelParams(1.0, 0.0, 1.0))
        with pytest.raises(ZeroDivisionError):
            landau_zener_probability(ModelParams(1.0, 80.0, 0.0))

    def test_force_sign_irrelevant(self):
        a = landau_zener_probability(ModelParams(3.0, 80.0, 1.0))
        b = landau_zener_probability(ModelParams(3.0, 80.0, -1.0))
        assert a == b


class TestEigenConsistency:
    def test_uniform_chain_matches_quantised_dispersion(self):
        # hard walls on the delta = 0 chain quantise kappa_j = j pi/(N+1) d,
        # so every eigenvalue must match the dispersion on that exact grid
        p = ModelParams(delta=0.0, Delta=22.0, F=0.0)
        w = LatticeWindow(-128, 128, guard=16)
        H = build_hamiltonian(p, w)
        evals = np.linalg.eigvalsh(H)
        N = w.n_sites
        kj = np.pi * np.arange(1, N + 1) / (N + 1)
        expected = np.sort(-0.5 * 22.0 * np.cos(kj))
        assert np.max(np.abs(evals - expected)) < 1e-6

    def test_two_band_interval_membership(self):
        # |E| of every bulk eigenvalue falls inside [|delta|/2, sqrt(..)/2]
        p = ModelParams(delta=7.0, Delta=22.0, F=0.0)
        w = LatticeWindow(-128, 128, guard=16)
        H = build_hamiltonian(p, w)
        evals, vecs = np.linalg.eigh(H)
        dens = np.abs(vecs) ** 2
        near_wall = dens[:8].sum(axis=0) + dens[-8:].sum(axis=0)
        bulk = np.abs(evals[near_wall < 0.5])
        hi = 0.5 * np.hypot(7.0, 22.0)
        assert np.all(bulk >= 3.5 - 1e-9)
        assert np.all(bulk <= hi + 1e-9)


class TestBandStructureTable:
    def test_sorted_energies_and_shape(self):
        pts = band_structure(P18, kappa_points=64)
        assert len(pts) == 64
        for bp in pts:
            assert bp.E0 <= bp.E1
            assert bp.E1 - bp.E0 >= 18.0 - 1e-10
            assert bp.Nnorm >= 0.0

    def test_sorted_even_for_negative_delta(self):
        pts = band_structure(ModelParams(-18.0, 80.0, 1.0), kappa_points=16)
        for bp in pts:
            assert bp.E0 <= bp.E1

    def test_fold_helper(self):
        assert fold_reduced_zone(np.pi / 2 + 0.1, 1.0) == pytest.approx(-np.pi / 2 + 0.1)
