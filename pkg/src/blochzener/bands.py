"""Field-free band structure of the period-doubled lattice.

With the unit cell doubled, the single cosine band folds into two
minibands over the reduced Brillouin zone kappa in [-pi/2d, pi/2d).  The
dispersion, the Bloch-wave coefficients (u, v) with their normalisation,
and the reduced interband coupling M driven by the static force are all
closed-form expressions; this module evaluates them for scalar or array
quasimomenta.  The Landau-Zener estimate for the transition probability
per zone-edge crossing lives here as well.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateBlochStateError
from .model import LatticeWindow, ModelParams, alternating_sign


def fold_reduced_zone(kappa, d: float):
    """Fold quasimomenta into [-pi/2d, pi/2d) using pi/d periodicity."""
    kd = np.mod(np.asarray(kappa, dtype=float) * d + np.pi / 2, np.pi) - np.pi / 2
    return kd / d


def dispersion(beta: int, kappa, params: ModelParams):
    """Miniband energies E_{beta,kappa} = (gamma/2)(-1)^(beta+1) S(kappa)
    with S = sqrt(delta^2 + Delta^2 cos^2(kappa d)).

    beta = 0 is the lower miniband for delta > 0 (gamma = +1); for
    delta < 0 the sign convention swaps the two labels.
    """
    if beta not in (0, 1):
        raise ValueError("band index must be 0 or 1")
    kd = fold_reduced_zone(kappa, params.d) * params.d
    S = np.sqrt(params.delta**2 + params.Delta**2 * np.cos(kd) ** 2)
    return 0.5 * params.gamma * (-1.0) ** (beta + 1) * S


def bloch_coefficients(kappa, params: ModelParams):
    """Coefficients (u, v) and normalisation N of the Bloch waves.

    u = Delta cos(kappa d),  v = delta + gamma sqrt(delta^2 + Delta^2 cos^2),
    N = pi (u^2 + v^2) / d.

    Raises at the band-touching point delta = 0, |kappa d| = pi/2 where
    both coefficients vanish and the normalisation is singular.
    """
    kd = fold_reduced_zone(kappa, params.d) * params.d
    c = np.cos(kd)
    if params.delta == 0 and np.any(np.abs(c) < 1e-12):
        raise DegenerateBlochStateError(
            "Bloch coefficients singular at delta = 0, |kappa d| = pi/2"
        )
    u = params.Delta * c
    v = params.delta + params.gamma * np.sqrt(params.delta**2 + params.Delta**2 * c**2)
    Nnorm = np.pi * (u**2 + v**2) / params.d
    return u, v, Nnorm


def bloch_wave_amplitude(beta: int, kappa, n, params: ModelParams):
    """Site-n coefficient of the Bloch wave |chi_{beta,kappa}>.

    Lower band:  u e^{i(n+1) kappa d} / sqrt(N) on even n,
                 v e^{i(n+1) kappa d} / sqrt(N) on odd n.
    Upper band:  v e^{i n kappa d} / sqrt(N) on even n,
                -u e^{i n kappa d} / sqrt(N) on odd n.
    """
    if beta not in (0, 1):
        raise ValueError("band index must be 0 or 1")
    kd = np.asarray(kappa, dtype=float) * params.d
    # unfolded coefficients keep the state exactly pi/d-periodic in kappa
    c = np.cos(kd)
    if params.delta == 0 and np.any(np.abs(c) < 1e-12):
        raise DegenerateBlochStateError(
            "Bloch wave singular at delta = 0, |kappa d| = pi/2"
        )
    u = params.Delta * c
    v = params.delta + params.gamma * np.sqrt(params.delta**2 + params.Delta**2 * c**2)
    Nnorm = np.pi * (u**2 + v**2) / params.d
    n = np.asarray(n)
    even = np.mod(n, 2) == 0
    if beta == 0:
        coeff = np.where(even, u, v)
        phase = np.exp(1j * (n + 1) * kd)
    else:
        coeff = np.where(even, v, -u)
        phase = np.exp(1j * n * kd)
    return coeff * phase / np.sqrt(Nnorm)


def bloch_state(beta: int, kappa: float, window: LatticeWindow, params: ModelParams) -> np.ndarray:
    """Bloch wave sampled on every site of a window (delta-normalised
    amplitudes, not unit norm on the window)."""
    return bloch_wave_amplitude(beta, kappa, window.sites, params)


def coupling(kappa, params: ModelParams):
    """Reduced interband matrix element

        M = -i F d Delta delta sin(kappa d) e^{i kappa d}
            / (2 delta^2 + 2 Delta^2 cos^2(kappa d)).

    Vanishes for delta = 0 (the limit away from the degenerate point) and
    at the zone centre; |M| peaks at the zone edge where the minibands
    come closest.
    """
    kd = np.asarray(kappa, dtype=float) * params.d
    c = np.cos(kd)
    denom = 2.0 * (params.delta**2 + params.Delta**2 * c**2)
    numer = -1j * params.Fd * params.Delta * params.delta * np.sin(kd) * np.exp(1j * kd)
    with np.errstate(divide="ignore", invalid="ignore"):
        M = np.where(denom > 0, numer / np.where(denom > 0, denom, 1.0), 0.0 + 0.0j)
    if np.ndim(kappa) == 0:
        return complex(M)
    return M


def landau_zener_probability(params: ModelParams) -> float:
    """Tunneling probability per zone-edge crossing,
    P = exp(-pi delta^2 / (2 d |F Delta|)), clamped to [0, 1]."""
    if params.F * params.Delta == 0:
        raise ZeroDivisionError("Landau-Zener formula undefined for F*Delta = 0")
    p = np.exp(-np.pi * params.delta**2 / (2.0 * params.d * abs(params.F * params.Delta)))
    return float(min(max(p, 0.0), 1.0))


@dataclass(frozen=True)
class BandPoint:
    """Per-kappa record of the band structure.

    E0 <= E1 always (energies sorted, independent of the sign of delta);
    u, v, Nnorm follow the coefficient convention above and M is the
    complex reduced coupling.
    """

    kappa: float
    E0: float
    E1: float
    u: float
    v: float
    Nnorm: float
    M: complex


def band_structure(params: ModelParams, kappa_points: int = 256) -> list[BandPoint]:
    """Sample the band structure on a uniform grid over the reduced zone.

    The grid includes both zone edges; at delta = 0 the edge point is
    degenerate and u, v, Nnorm are reported as 0 there.
    """
    if kappa_points < 2:
        raise ValueError("need at least 2 kappa points")
    d = params.d
    kappas = np.linspace(-np.pi / (2 * d), np.pi / (2 * d), kappa_points)
    c = np.cos(kappas * d)
    S = np.sqrt(params.delta**2 + params.Delta**2 * c**2)
    e_lower = -0.5 * S
    e_upper = 0.5 * S
    u = params.Delta * c
    v = params.delta + params.gamma * S
    Nnorm = np.pi * (u**2 + v**2) / d
    M = coupling(kappas, params)
    return [
        BandPoint(float(k), float(lo), float(hi), float(uu), float(vv), float(nn), complex(mm))
        for k, lo, hi, uu, vv, nn, mm in zip(kappas, e_lower, e_upper, u, v, Nnorm, M)
    ]
