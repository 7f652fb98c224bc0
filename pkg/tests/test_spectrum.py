import numpy as np
import pytest
from scipy.special import j0

from blochzener import (
    LatticeWindow,
    ModelParams,
    WavePacket,
    apply_translation,
    build_hamiltonian,
    ladder_offset_diag,
    ladder_offset_floquet,
    ladder_spectrum_diag,
    ladder_spectrum_floquet,
    offset_approx_bessel,
    offset_approx_elliptic,
    rescale_spectrum,
)
from blochzener.errors import WindowError
from blochzener.spectrum import (
    circular_distance,
    fold_offset,
    interior_eigenpairs,
    monodromy_matrix,
)

W128 = LatticeWindow(-128, 128, guard=24)
W192 = LatticeWindow(-192, 192, guard=32)


def params(delta, Delta, F=1.0):
    return ModelParams(delta=delta, Delta=Delta, F=F)


class TestFolding:
    def test_fold_interval(self):
        p = params(1.0, 1.0)
        assert fold_offset(0.3, p) == pytest.approx(0.3)
        assert fold_offset(2.3, p) == pytest.approx(0.3)
        assert fold_offset(-1.7, p) == pytest.approx(0.3)
        assert fold_offset(1.0, p) == pytest.approx(1.0)   # boundary stays at +dF
        assert fold_offset(-1.0, p) == pytest.approx(1.0)

    def test_circular_distance(self):
        assert circular_distance(0.9, -0.9, 2.0) == pytest.approx(0.2)


class TestDiagonalisation:
    def test_flat_band_half_gap(self):
        # Delta = 0: even sites sit at delta/2 + 2 n dF exactly
        assert ladder_offset_diag(params(1.0, 0.0), W128) == pytest.approx(0.5, abs=1e-12)

    def test_zero_gap_is_zero_offset(self):
        assert abs(ladder_offset_diag(params(0.0, 12.0), W128)) < 1e-10

    def test_interior_selection_requires_enough_states(self):
        with pytest.raises(WindowError):
            ladder_offset_diag(params(2.0, 10.0), LatticeWindow(-12, 12, guard=5))

    def test_cluster_spreads_tiny(self):
        spec = ladder_spectrum_diag(params(5.0, 14.0), W128)
        assert max(spec.cluster_spreads) < 1e-8
        assert not spec.degenerate

    def test_two_full_ladders(self):
        spec = ladder_spectrum_diag(params(3.0, 9.0), W128)
        lad0, lad1 = spec.eigenvalues
        # rungs of each ladder are spaced by 2dF
        assert np.allclose(np.diff(lad0), 2.0, atol=1e-8)
        assert np.allclose(np.diff(lad1), 2.0, atol=1e-8)
        # and interleave at dF - 2 E0 from each other
        assert lad0.size + lad1.size >= 20

    def test_eigenvector_translation_covariance(self):
        p = params(4.0, 12.0)
        evals, vecs = interior_eigenpairs(p, W128)
        H = build_hamiltonian(p, W128)
        i = int(np.argmin(np.abs(evals)))
        psi = WavePacket(W128, vecs[:, i])
        moved = apply_translation(2, psi)
        res = np.linalg.norm(H @ moved.amplitudes - (evals[i] - 2.0) * moved.amplitudes)
        assert res < 1e-8


class TestFloquet:
    def test_zero_gap_offsets(self):
        z0, z1, e0 = ladder_offset_floquet(params(0.0, 25.0))
        assert e0 == 0.0
        assert {round(z0, 12), round(z1, 12)} == {0.0, 1.0}

    def test_flat_band(self):
        # Delta = 0 decouples exactly; offset delta/2 folded
        z0, z1, e0 = ladder_offset_floquet(params(1.0, 0.0))
        assert e0 == pytest.approx(0.5, abs=1e-9)

    def test_monodromy_det_minus_one(self):
        Y = monodromy_matrix(params(3.7, 11.0))
        assert abs(np.linalg.det(Y) + 1.0) < 1e-9
        lam = np.linalg.eigvals(Y)
        assert np.max(np.abs(np.abs(lam) - 1.0)) < 1e-9

    def test_exponent_sum_constraint(self):
        # z0 + z1 = d modulo 2d follows from det(monodromy) = -1
        z0, z1, _ = ladder_offset_floquet(params(2.5, 8.0))
        s = (z0 + z1) % 2.0
        assert min(abs(s - 1.0), abs(s + 1.0)) < 1e-9

    def test_kappa_steps_floor(self):
        with pytest.raises(ValueError):
            monodromy_matrix(params(1.0, 2.0), kappa_steps=32)

    def test_requires_force(self):
        with pytest.raises(ValueError):
            ladder_offset_floquet(params(1.0, 2.0, F=0.0))


class TestCrossMethod:
    @pytest.mark.parametrize("delta,Delta", [(1.0, 3.0), (4.5, 12.0), (9.0, 18.0), (0.7, 19.5)])
    def test_engines_agree(self, delta, Delta):
        p = params(delta, Delta)
        diag = ladder_offset_diag(p, W128)
        _, _, floq = ladder_offset_floquet(p)
        assert circular_distance(diag, floq, 2.0) < 1e-4

    def test_small_gap_tracks_bessel(self):
        for Delta in (0.5, 2.0, 5.0):
            p = params(0.01, Delta)
            _, _, floq = ladder_offset_floquet(p)
            assert abs(floq - offset_approx_bessel(p)) < 1e-3


class TestSymmetries:
    def test_antisymmetry_in_delta(self, rng):
        for _ in range(6):
            delta = rng.uniform(0.5, 10.0)
            Delta = rng.uniform(0.5, 18.0)
            _, _, plus = ladder_offset_floquet(params(delta, Delta), check=False)
            _, _, minus = ladder_offset_floquet(params(-delta, Delta), check=False)
            assert abs(plus + minus) < 1e-6

    def test_parity_in_Delta(self, rng):
        for _ in range(6):
            delta = rng.uniform(0.5, 10.0)
            Delta = rng.uniform(0.5, 18.0)
            _, _, a = ladder_offset_floquet(params(delta, Delta), check=False)
            _, _, b = ladder_offset_floquet(params(delta, -Delta), check=False)
            assert abs(a - b) < 1e-6

    def test_diag_antisymmetry_spot(self):
        _, _, f = ladder_offset_floquet(params(6.0, 15.0))
        d_plus = ladder_offset_diag(params(6.0, 15.0), W128)
        d_minus = ladder_offset_diag(params(-6.0, 15.0), W128)
        assert abs(d_plus + d_minus) < 1e-8
        assert abs(d_plus - f) < 1e-6


class TestApproximations:
    def test_elliptic_flat_band(self):
        assert offset_approx_elliptic(params(5.0, 0.0)) == pytest.approx(2.5, abs=1e-12)

    def test_elliptic_quadrature_value(self):
        # delta = 0 reduces the integrand to Delta |cos y|
        assert offset_approx_elliptic(params(0.0, 80.0)) == pytest.approx(80.0 / np.pi, rel=1e-10)

    def test_elliptic_sign(self):
        assert offset_approx_elliptic(params(-5.0, 0.0)) == pytest.approx(-2.5)

    def test_elliptic_matches_exact_when_decoupled(self):
        # delta >> Delta: fold the elliptic value and compare to the ladder
        p = params(40.0, 4.0)
        approx = fold_offset(offset_approx_elliptic(p), p)
        exact = ladder_offset_diag(p, W128)
        assert circular_distance(approx, exact, 2.0) <= 0.05 * max(abs(exact), 0.05)

    def test_bessel_values(self):
        assert offset_approx_bessel(params(0.0, 3.0)) == 0.0
        got = offset_approx_bessel(params(0.01, 2.0))
        assert got == pytest.approx(0.005 * j0(2.0), abs=1e-12)
        assert got == pytest.approx(0.00111945, abs=1e-7)

    def test_offset_vanishes_at_bessel_zeros(self):
        for zero in (2.404826, 5.520078):
            p = params(0.01, zero)
            assert abs(ladder_offset_diag(p, W128)) < 1e-4


class TestRescaling:
    def test_identity_at_reference(self):
        p = params(4.0, 9.0)
        direct = ladder_spectrum_floquet(p)
        scaled = rescale_spectrum(p, reference_Fd=1.0)
        assert scaled.offset_E0 == pytest.approx(direct.offset_E0, abs=1e-12)

    def test_double_tilt(self):
        # E(2 delta, 2 Delta, 2) = 2 E(delta, Delta, 1)
        p1 = params(4.0, 9.0, F=1.0)
        p2 = params(8.0, 18.0, F=2.0)
        base = ladder_offset_floquet(p1)[2]
        scaled = rescale_spectrum(p2, reference_Fd=1.0)
        assert scaled.offset_E0 == pytest.approx(fold_offset(2.0 * base, p2), abs=1e-9)

    def test_property_random(self, rng):
        for _ in range(4):
            delta = rng.uniform(0.5, 6.0)
            Delta = rng.uniform(0.5, 12.0)
            Fd = rng.uniform(0.5, 3.0)
            p = ModelParams(delta=delta, Delta=Delta, F=Fd)
            direct = ladder_offset_floquet(p, check=False)[2]
            scaled = rescale_spectrum(p, reference_Fd=1.0).offset_E0
            assert circular_distance(direct, scaled, 2.0 * Fd) < 1e-6

    def test_figure_zero_rescaled(self):
        # the delta = 6.734 zero at Fd = 1 maps to a zero at Fd = 2
        p = ModelParams(delta=2 * 6.734, Delta=160.0, F=2.0)
        spec = rescale_spectrum(p, reference_Fd=1.0)
        assert abs(spec.offset_E0) < 2e-2


class TestDegeneracyFlag:
    def test_flat_band_odd_gap_degenerate(self):
        # Delta = 0, delta = 1: both folded clusters coincide at 0.5
        spec = ladder_spectrum_diag(params(1.0, 0.0), W128)
        assert spec.degenerate
        assert spec.offset_E0 == pytest.approx(0.5, abs=1e-10)
        assert spec.offset_other == pytest.approx(0.5, abs=1e-10)

    def test_generic_point_not_degenerate(self):
        assert not ladder_spectrum_floquet(params(3.0, 7.0)).degenerate
