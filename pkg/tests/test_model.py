import numpy as np
import pytest

from blochzener import (
    LatticeWindow,
    ModelParams,
    WavePacket,
    apply_gauge_flip,
    apply_parity_x,
    apply_translation,
    build_hamiltonian,
    dispersion,
)
from blochzener.errors import WindowError
from blochzener.model import (
    apply_alternating,
    apply_shift_down,
    apply_shift_up,
    apply_site_number,
)

from conftest import gaussian, random_interior_packet


def expectation(H, psi):
    return float(np.real(np.vdot(psi.amplitudes, H @ psi.amplitudes)))


class TestModelParams:
    def test_gamma_sign(self):
        assert ModelParams(3.0, 1.0, 1.0).gamma == 1.0
        assert ModelParams(-3.0, 1.0, 1.0).gamma == -1.0
        assert ModelParams(0.0, 1.0, 1.0).gamma == 1.0

    def test_validation(self):
        with pytest.raises(ValueError):
            ModelParams(1.0, 1.0, 1.0, d=0.0)
        with pytest.raises(ValueError):
            ModelParams(1.0, 1.0, 1.0, hbar=-1.0)
        with pytest.raises(ValueError):
            ModelParams(np.inf, 1.0, 1.0)

    def test_periods(self):
        p = ModelParams(1.0, 1.0, 1.0)
        assert p.bloch_period == pytest.approx(2 * np.pi)
        assert p.half_bloch_period == pytest.approx(np.pi)


class TestWindow:
    def test_invariants(self):
        with pytest.raises(WindowError):
            LatticeWindow(3, 3)
        with pytest.raises(WindowError):
            LatticeWindow(0, 1)
        with pytest.raises(WindowError):
            LatticeWindow(-4, 4, guard=4)
        w = LatticeWindow(-4, 4, guard=2)
        assert w.n_sites == 9
        assert w.is_symmetric
        assert w.index(-4) == 0

    def test_interior_mask(self):
        w = LatticeWindow(-4, 4, guard=2)
        mask = w.interior_mask()
        assert mask.sum() == 5
        assert (w.sites[mask] == np.arange(-2, 3)).all()


class TestBuildHamiltonian:
    def test_diagonal_case(self):
        # Delta = 0, delta = 2, Fd = 1 on sites {-1, 0, 1}
        p = ModelParams(delta=2.0, Delta=0.0, F=1.0)
        H = build_hamiltonian(p, LatticeWindow(-1, 1, guard=0))
        assert np.allclose(H, np.diag([-2.0, 1.0, 0.0]))

    def test_single_band_range(self):
        p = ModelParams(delta=0.0, Delta=80.0, F=0.0)
        H = build_hamiltonian(p, LatticeWindow(-128, 128, guard=16))
        evals = np.linalg.eigvalsh(H)
        assert evals.min() >= -40.0 - 1e-9
        assert evals.max() <= 40.0 + 1e-9

    def test_two_band_ranges_and_gap(self):
        # eigenvalues live inside the two band intervals +-[9, 41]
        # (sqrt(18^2 + 80^2)/2 = 41); the gap stays empty up to edge states
        p = ModelParams(delta=18.0, Delta=80.0, F=0.0)
        w = LatticeWindow(-128, 128, guard=16)
        H = build_hamiltonian(p, w)
        evals, vecs = np.linalg.eigh(H)
        dens = np.abs(vecs) ** 2
        near_wall = dens[:8].sum(axis=0) + dens[-8:].sum(axis=0)
        bulk = evals[near_wall < 0.5]  # drop wall-localised modes, if any
        assert np.all(np.abs(bulk) >= 9.0 - 1e-9)
        assert np.all(np.abs(bulk) <= 41.0 + 1e-9)
        # dense dispersion sampling covers the same intervals
        kgrid = np.linspace(-np.pi / 2, np.pi / 2, 2001)
        sampled = np.abs(np.concatenate([dispersion(0, kgrid, p), dispersion(1, kgrid, p)]))
        assert sampled.min() == pytest.approx(9.0, abs=1e-9)
        assert sampled.max() == pytest.approx(41.0, abs=1e-9)

    def test_hermitian_exactly(self):
        p = ModelParams(delta=3.3, Delta=7.7, F=0.4)
        H = build_hamiltonian(p, LatticeWindow(-20, 20, guard=4))
        assert (H == H.T).all()

    def test_too_small(self):
        with pytest.raises(WindowError):
            LatticeWindow(0, 1, guard=0)


class TestTranslation:
    def test_identity(self, window64, rng):
        psi = random_interior_packet(window64, rng)
        out = apply_translation(0, psi)
        assert np.array_equal(out.amplitudes, psi.amplitudes)
        assert out.truncation_loss == 0.0

    def test_peak_shift(self, window64):
        psi = WavePacket.site_peak(window64, 0)
        out = apply_translation(2, psi)
        assert abs(out.amplitudes[window64.index(-2)] - 1.0) < 1e-15
        assert out.norm == pytest.approx(1.0)

    def test_support_loss_flagged(self, window64):
        psi = WavePacket.site_peak(window64, -63)
        out = apply_translation(5, psi)
        assert out.norm == 0.0
        assert out.truncation_loss == pytest.approx(1.0)

    def test_energy_shift(self, window64):
        # <T_2l psi|H|T_2l psi> = <psi|H|psi> - 2 l dF for interior support
        p = ModelParams(delta=2.5, Delta=11.0, F=0.7)
        H = build_hamiltonian(p, window64)
        psi = gaussian(window64, width=6.0)
        e0 = expectation(H, psi)
        for l in (1, 2, -3):
            shifted = apply_translation(2 * l, psi)
            assert shifted.truncation_loss < 1e-12
            assert expectation(H, shifted) == pytest.approx(e0 - 2 * l * p.Fd, abs=1e-9)

    def test_eigenvector_covariance(self, window128):
        # translating an interior eigenvector by 2 sites shifts E by -2dF
        p = ModelParams(delta=4.0, Delta=12.0, F=1.0)
        H = build_hamiltonian(p, window128)
        evals, vecs = np.linalg.eigh(H)
        dens = np.abs(vecs) ** 2
        edge = dens[: window128.guard].sum(axis=0) + dens[-window128.guard:].sum(axis=0)
        centre = np.argmin(np.abs(evals))
        assert edge[centre] < 1e-20
        psi = WavePacket(window128, vecs[:, centre])
        moved = apply_translation(2, psi)
        target = evals[centre] - 2 * p.Fd
        residual = np.linalg.norm(H @ moved.amplitudes - target * moved.amplitudes)
        assert residual < 1e-8


class TestGaugeFlip:
    def test_parameter_flip(self, window64, rng):
        psi = random_interior_packet(window64, rng)
        p = ModelParams(delta=6.734, Delta=80.0, F=1.0)
        out, flipped = apply_gauge_flip(psi, p)
        assert out is psi
        assert flipped.delta == -6.734
        _, back = apply_gauge_flip(out, flipped)
        assert back == p

    def test_ladder_construction(self, window128):
        # odd translations of H(-delta) eigenvectors are H(delta) eigenvectors
        p = ModelParams(delta=3.0, Delta=9.0, F=1.0)
        H = build_hamiltonian(p, window128)
        H_flip = build_hamiltonian(p.flipped_gap(), window128)
        evals, vecs = np.linalg.eigh(H_flip)
        dens = np.abs(vecs) ** 2
        edge = dens[: window128.guard].sum(axis=0) + dens[-window128.guard:].sum(axis=0)
        centre = int(np.argmin(np.abs(evals) + 1e6 * (edge > 1e-20)))
        psi = WavePacket(window128, vecs[:, centre])
        for n in (0, 1, -2):
            moved = apply_translation(-(2 * n + 1), psi)
            target = evals[centre] + (2 * n + 1) * p.Fd
            residual = np.linalg.norm(H @ moved.amplitudes - target * moved.amplitudes)
            assert residual < 1e-8


class TestParity:
    def test_peak_cases(self, window64):
        psi0 = WavePacket.site_peak(window64, 0)
        assert np.array_equal(apply_parity_x(psi0).amplitudes, psi0.amplitudes)
        psi1 = WavePacket.site_peak(window64, 1)
        out = apply_parity_x(psi1)
        assert out.amplitudes[window64.index(-1)] == pytest.approx(-1.0)

    def test_requires_symmetric_window(self):
        w = LatticeWindow(-3, 5, guard=1)
        with pytest.raises(WindowError):
            apply_parity_x(WavePacket.site_peak(w, 0))

    def test_anticommutation_with_hamiltonian(self, window64, rng):
        # X H(delta) = -H(-delta) X on interior states
        p = ModelParams(delta=5.5, Delta=13.0, F=0.8)
        H = build_hamiltonian(p, window64)
        Hf = build_hamiltonian(p.flipped_gap(), window64)
        for _ in range(5):
            psi = random_interior_packet(window64, rng)
            lhs = apply_parity_x(WavePacket(window64, H @ psi.amplitudes))
            rhs = Hf @ apply_parity_x(psi).amplitudes
            assert np.linalg.norm(lhs.amplitudes + rhs) < 1e-12


class TestShiftAlgebra:
    """Commutator identities hold exactly on interior-supported states."""

    @pytest.fixture
    def ops(self):
        K = apply_shift_down
        Kd = apply_shift_up
        N = apply_site_number
        L = apply_alternating
        return K, Kd, N, L

    def test_commutators(self, ops, window64, rng):
        K, Kd, N, L = ops
        for _ in range(4):
            psi = random_interior_packet(window64, rng)

            def comm(a, b):
                return a(b(psi)).amplitudes - b(a(psi)).amplitudes

            assert np.allclose(comm(K, N), K(psi).amplitudes, atol=1e-14)
            assert np.allclose(comm(Kd, N), -Kd(psi).amplitudes, atol=1e-14)
            assert np.allclose(comm(Kd, K), 0.0, atol=1e-14)
            assert np.allclose(comm(L, N), 0.0, atol=1e-14)
            # [K, L] = 2 K L
            kl = comm(K, L)
            assert np.allclose(kl, 2 * K(L(psi)).amplitudes, atol=1e-14)

    def test_shift_is_translation(self, window64):
        psi = WavePacket.site_peak(window64, 3)
        assert abs(apply_shift_down(psi).amplitudes[window64.index(2)] - 1.0) < 1e-15
        assert abs(apply_shift_up(psi).amplitudes[window64.index(4)] - 1.0) < 1e-15


class TestWavePacket:
    def test_normalisation_contract(self, window64):
        psi = gaussian(window64, width=5.0)
        assert abs(psi.norm - 1.0) < 1e-12

    def test_mismatched_length(self, window64):
        with pytest.raises(WindowError):
            WavePacket(window64, np.zeros(5, dtype=complex))

    def test_moments(self, window64):
        psi = gaussian(window64, width=6.0, center=3)
        assert psi.centroid() == pytest.approx(3.0, abs=1e-9)
        assert psi.rms_width() == pytest.approx(3.0, abs=0.05)  # width w/sqrt(2*2)
