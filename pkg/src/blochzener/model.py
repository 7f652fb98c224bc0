"""Period-doubled tight-binding lattice with a static tilt.

The Hamiltonian acts on Wannier states |n> of a one-dimensional lattice:
nearest-neighbour hopping of strength -Delta/4, an alternating on-site
energy (delta/2)(-1)^n that doubles the unit cell, and a linear potential
F*d*n from a constant external force.  Everything downstream (band
structure, Wannier-Stark ladders, propagation) consumes the parameter
record and the truncation window defined here.

All quantities use reduced units by default (hbar = 1, d = 1); energies
are then measured in units of d*F when d*F = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import WindowError


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the model.

    delta  - gap between the two minibands at the reduced zone edge
    Delta  - width of the unperturbed (delta = 0) band
    F      - static force; may carry either sign, zero means field-free
    d      - lattice period (> 0)
    hbar   - reduced action (> 0)
    """

    delta: float
    Delta: float
    F: float
    d: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.d > 0):
            raise ValueError("lattice period d must be positive")
        if not (self.hbar > 0):
            raise ValueError("hbar must be positive")
        for name in ("delta", "Delta", "F", "d", "hbar"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def gamma(self) -> float:
        """Sign of delta; +1 at delta = 0 so the folded single band is the
        continuous limit of the lower miniband."""
        return 1.0 if self.delta >= 0 else -1.0

    @property
    def Fd(self) -> float:
        """Tilt per site, F*d (signed)."""
        return self.F * self.d

    @property
    def bloch_period(self) -> float:
        """T_B = 2*pi*hbar / (d*|F|) of the single-band system."""
        if self.F == 0:
            raise ValueError("Bloch period undefined at F = 0")
        return 2.0 * np.pi * self.hbar / abs(self.Fd)

    @property
    def half_bloch_period(self) -> float:
        """T_1 = T_B / 2, the reconstruction period of the reduced zone."""
        return 0.5 * self.bloch_period

    def with_delta(self, delta: float) -> "ModelParams":
        return replace(self, delta=delta)

    def with_force(self, F: float) -> "ModelParams":
        return replace(self, F=F)

    def flipped_gap(self) -> "ModelParams":
        return replace(self, delta=-self.delta)

    def flipped_force(self) -> "ModelParams":
        return replace(self, F=-self.F)


@dataclass(frozen=True)
class LatticeWindow:
    """Finite truncation window [n_min, n_max] with hard walls.

    ``guard`` is the width of the edge band excluded from physics
    assertions; density accumulating there signals truncation artefacts.
    """

    n_min: int
    n_max: int
    guard: int = 32

    def __post_init__(self):
        if self.n_min >= self.n_max:
            raise WindowError("window requires n_min < n_max")
        if self.n_sites < 3:
            raise WindowError("window must hold at least 3 sites")
        if self.guard < 0:
            raise WindowError("guard must be non-negative")
        if self.guard >= (self.n_max - self.n_min) / 2:
            raise WindowError("guard must be smaller than half the window")

    @property
    def n_sites(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def sites(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def is_symmetric(self) -> bool:
        return self.n_min == -self.n_max

    def index(self, n: int) -> int:
        if not self.n_min <= n <= self.n_max:
            raise WindowError(f"site {n} outside window [{self.n_min}, {self.n_max}]")
        return n - self.n_min

    def interior_mask(self) -> np.ndarray:
        """Boolean mask of sites at least ``guard`` away from both walls."""
        n = self.sites
        return (n >= self.n_min + self.guard) & (n <= self.n_max - self.guard)


#: Window used throughout unless the caller overrides it.
DEFAULT_WINDOW = LatticeWindow(-256, 256, guard=32)


@dataclass(frozen=True, eq=False)
class WavePacket:
    """Complex amplitude per lattice site on a finite window.

    ``truncation_loss`` records probability dropped by operations that can
    push support outside the window (translations); it stays 0.0 for
    unitary evolution.
    """

    window: LatticeWindow
    amplitudes: np.ndarray = field(repr=False)
    truncation_loss: float = 0.0

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.shape != (self.window.n_sites,):
            raise WindowError(
                f"amplitude array of length {amps.shape} does not match "
                f"window with {self.window.n_sites} sites"
            )
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def site_peak(cls, window: LatticeWindow, n: int) -> "WavePacket":
        """Normalised packet concentrated on a single site."""
        amps = np.zeros(window.n_sites, dtype=complex)
        amps[window.index(n)] = 1.0
        return cls(window, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def normalized(self) -> "WavePacket":
        nrm = self.norm
        if nrm == 0:
            raise ValueError("cannot normalise the zero packet")
        return WavePacket(self.window, self.amplitudes / nrm)

    def overlap(self, other: "WavePacket") -> complex:
        if other.window != self.window:
            raise WindowError("overlap requires packets on the same window")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def centroid(self) -> float:
        return float(self.density @ self.window.sites)

    def rms_width(self) -> float:
        """Root-mean-square displacement about the centroid."""
        n = self.window.sites
        c = self.centroid()
        return float(np.sqrt(self.density @ (n - c) ** 2))

    def guard_occupancy(self) -> float:
        """Probability residing inside the guard bands."""
        g = self.window.guard
        if g == 0:
            return 0.0
        dens = self.density
        return float(dens[:g].sum() + dens[-g:].sum())


def build_hamiltonian(params: ModelParams, window: LatticeWindow) -> np.ndarray:
    """Dense real symmetric Hamiltonian on the window, hard-wall boundary.

    H[n, n]   = (delta/2) (-1)^n + F d n
    H[n, n+1] = H[n+1, n] = -Delta/4
    """
    n = window.sites
    size = n.size
    if size < 3:
        raise WindowError("Hamiltonian needs at least 3 sites")
    H = np.zeros((size, size))
    H[np.diag_indices(size)] = 0.5 * params.delta * alternating_sign(n) + params.Fd * n
    hop = np.full(size - 1, -0.25 * params.Delta)
    H += np.diag(hop, 1) + np.diag(hop, -1)
    return H


def alternating_sign(n: np.ndarray) -> np.ndarray:
    """(-1)^n for integer site indices, negative values included."""
    return 1.0 - 2.0 * (np.mod(n, 2) != 0)


def apply_translation(m: int, psi: WavePacket) -> WavePacket:
    """Translation T_m with (T_m psi)_{n-m} = psi_n.

    Amplitudes shifted past a wall are dropped; the lost probability is
    recorded in ``truncation_loss`` rather than raising, so callers can
    decide whether the loss matters.
    """
    out = np.zeros_like(psi.amplitudes)
    size = psi.window.n_sites
    src_lo = max(0, m)
    src_hi = min(size, size + m)
    if src_lo < src_hi:
        out[src_lo - m:src_hi - m] = psi.amplitudes[src_lo:src_hi]
    lost = float(np.sum(psi.density)) - float(np.sum(np.abs(out) ** 2))
    return WavePacket(psi.window, out, truncation_loss=max(lost, 0.0))


def apply_gauge_flip(psi: WavePacket, params: ModelParams) -> tuple[WavePacket, ModelParams]:
    """The gap-inversion operator, realised as a parameter flip.

    The operator that inverts the sign of delta acts on all terms that
    follow it in an operator product; on a bare state it is the identity,
    while every subsequent Hamiltonian acquires delta -> -delta.
    """
    return psi, params.flipped_gap()


def apply_parity_x(psi: WavePacket) -> WavePacket:
    """Alternating-sign reflection (X psi)_{-n} = (-1)^n psi_n.

    Satisfies X H(delta) = -H(-delta) X, which drives the antisymmetry of
    the ladder spectrum.  Requires a window symmetric about n = 0.
    """
    if not psi.window.is_symmetric:
        raise WindowError("parity operator needs a window symmetric about 0")
    n = psi.window.sites
    out = (alternating_sign(n) * psi.amplitudes)[::-1].copy()
    return WavePacket(psi.window, out)


def apply_site_number(psi: WavePacket) -> WavePacket:
    """Position operator N: multiply each amplitude by its site index."""
    return WavePacket(psi.window, psi.window.sites * psi.amplitudes)


def apply_alternating(psi: WavePacket) -> WavePacket:
    """Sublattice operator L = (-1)^N."""
    return WavePacket(psi.window, alternating_sign(psi.window.sites) * psi.amplitudes)


def apply_shift_down(psi: WavePacket) -> WavePacket:
    """Shift operator K = sum |n-1><n| (translation by one site)."""
    return apply_translation(1, psi)


def apply_shift_up(psi: WavePacket) -> WavePacket:
    """Adjoint shift K^dagger = sum |n+1><n|."""
    return apply_translation(-1, psi)
