"""Named experiments: reconstruction analysis, occupation fits, gap tuning,
oscillating and breathing modes, and the field-flip beam splitter.

The dynamics of the two-ladder system carries two clocks: T1 = pi hbar/dF
(the reduced-zone round trip, half a Bloch period) and the ladder beat
T2 = 2 pi hbar/(dF - 2 E0).  When T2/T1 is rational, r/s in lowest terms,
the wave packet reconstructs up to a global phase at multiples of
T_BZ = r T1 = s T2, and the miniband occupations sampled at t = n T1
follow a fixed-frequency cosine in n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq

from .errors import FitResidualError, TuningError, WindowError
from .model import DEFAULT_WINDOW, LatticeWindow, ModelParams, WavePacket
from .propagation import (
    BandOccupations,
    band_occupations,
    evolve_piecewise,
    evolve_real_space,
    project_band,
)
from .bands import landau_zener_probability
from .spectrum import ladder_offset_diag, ladder_offset_floquet, ladder_spectrum_floquet


@dataclass(frozen=True)
class ReconstructionReport:
    """Periods, commensurability and (optionally) revival fidelity."""

    T1: float
    T2: float
    ratio: float
    rational: tuple[int, int] | None
    T_BZ: float | None
    fidelity: float | None = None
    divergent: bool = False


@dataclass(frozen=True)
class OccupationFit:
    """Least-squares cosine fit of occupations sampled at t = n T1."""

    X: float
    Y: float
    phi: float
    residual: float
    samples: tuple[BandOccupations, ...]


@dataclass(frozen=True)
class BeamSplitterReport:
    flip_time: float
    measure_time: float
    left_window: tuple[int, int]
    right_window: tuple[int, int]
    pop_left: float
    pop_right: float
    lz_prediction: float


@dataclass(frozen=True)
class ScenarioReport:
    """Time series produced by one named experiment."""

    name: str
    params: ModelParams
    window: LatticeWindow
    times: np.ndarray
    densities: np.ndarray                    # shape (n_times, n_sites)
    occupations: np.ndarray | None           # shape (n_times, 2)
    landmark_ns: np.ndarray | None           # integers n of the t = n T1 samples
    landmark_occupations: np.ndarray | None  # shape (len(landmark_ns), 2)
    reconstruction: ReconstructionReport | None
    fit: OccupationFit | None = None
    widths: np.ndarray | None = None
    splitter: BeamSplitterReport | None = None
    max_guard_occupancy: float = 0.0


def best_rational_approximation(
    x: float,
    tol: float = 1e-4,
    max_denominator: int = 10_000,
) -> tuple[int, int] | None:
    """Minimal-denominator fraction r/s with |x - r/s| <= tol.

    Binary search over the continued-fraction machinery of
    ``Fraction.limit_denominator``; returns None when no denominator up to
    the cap reaches the tolerance.
    """
    if not math.isfinite(x):
        return None
    target = Fraction(x)
    lo, hi = 1, max_denominator
    best = None
    if abs(float(target.limit_denominator(hi)) - x) > tol:
        return None
    while lo <= hi:
        mid = (lo + hi) // 2
        cand = target.limit_denominator(mid)
        if abs(float(cand) - x) <= tol:
            best = cand
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        return None
    return int(best.numerator), int(best.denominator)


def reconstruction_times(
    params: ModelParams,
    E0: float,
    tol: float = 1e-4,
    max_denominator: int = 10_000,
) -> ReconstructionReport:
    """T1, T2 and their commensurability for a given ladder offset."""
    if params.F == 0:
        raise ValueError("reconstruction analysis requires F != 0")
    dF = params.d * abs(params.F)
    T1 = np.pi * params.hbar / dF
    beat = dF - 2.0 * E0
    if beat == 0.0:
        return ReconstructionReport(
            T1=T1, T2=math.inf, ratio=math.inf, rational=None, T_BZ=None, divergent=True
        )
    T2 = 2.0 * np.pi * params.hbar / beat
    ratio = T2 / T1
    rs = best_rational_approximation(abs(ratio), tol, max_denominator)
    if rs is None:
        return ReconstructionReport(T1=T1, T2=T2, ratio=ratio, rational=None, T_BZ=None)
    r, s = rs
    return ReconstructionReport(T1=T1, T2=T2, ratio=ratio, rational=(r, s), T_BZ=r * T1)


def fit_occupation_sinusoid(
    samples: list[BandOccupations],
    params: ModelParams,
    E0: float,
    residual_threshold: float = 0.05,
) -> OccupationFit:
    """Fit p0(n) = X + Y cos(omega n + phi) with the frequency pinned to
    omega = pi (dF - 2 E0) / dF from the ladder offset.

    Linear least squares in (X, Y cos phi, Y sin phi); Y is returned
    non-negative.  A residual above ``residual_threshold`` means the
    two-band single-frequency model does not describe the data (leakage,
    higher bands, or a wrong offset) and raises.
    """
    if len(samples) < 8:
        raise ValueError("need at least 8 samples at t = n T1")
    dF = params.d * abs(params.F)
    omega = np.pi * (dF - 2.0 * E0) / dF
    T1 = np.pi * params.hbar / dF
    ns = np.array([round(s.t / T1) for s in samples], dtype=float)
    p0 = np.array([s.p0 for s in samples])
    design = np.column_stack([np.ones_like(ns), np.cos(omega * ns), np.sin(omega * ns)])
    coef, *_ = np.linalg.lstsq(design, p0, rcond=None)
    resid = float(np.sqrt(np.mean((design @ coef - p0) ** 2)))
    X = float(coef[0])
    Y = float(np.hypot(coef[1], coef[2]))
    phi = float(np.arctan2(-coef[2], coef[1])) if Y > 0 else 0.0
    if resid > residual_threshold:
        raise FitResidualError(
            f"occupation fit residual {resid:.3e} above {residual_threshold:.1e}"
        )
    return OccupationFit(X=X, Y=Y, phi=phi, residual=resid, samples=tuple(samples))


# ---------------------------------------------------------------------------
# gap tuning

def _ratio_residual(offset: float, dF: float, tau: float) -> float:
    """Smooth root function for the commensurability condition.

    theta = dF - 2 E0 must equal +-tau modulo 4 dF; the product of the
    two sine factors vanishes exactly there, is continuous across fold
    jumps of E0 (which shift theta by multiples of 4 dF), and does not
    depend on which of the two folded clusters is labelled ladder 0.
    """
    theta = dF - 2.0 * offset
    return float(
        np.sin(np.pi * (theta - tau) / (4.0 * dF))
        * np.sin(np.pi * (theta + tau) / (4.0 * dF))
    )


def _ratio_error(offset: float, dF: float, tau: float) -> float:
    """First-order |T2/T1 - r/s| implied by the beat mismatch.

    The sampled dynamics only feels theta = dF - 2 E0 modulo 4 dF and up
    to sign, so the mismatch is the circular distance of theta to the
    nearer of +-tau, converted to ratio units.
    """
    theta = dF - 2.0 * offset
    d_plus = abs(math.remainder(theta - tau, 4.0 * dF))
    d_minus = abs(math.remainder(theta + tau, 4.0 * dF))
    return 2.0 * dF * min(d_plus, d_minus) / tau**2


def tune_delta(
    target_ratio,
    Delta: float,
    F: float = 1.0,
    bracket: tuple[float, float] = (0.5, 20.0),
    d: float = 1.0,
    hbar: float = 1.0,
    engine: str = "floquet",
    window: LatticeWindow = DEFAULT_WINDOW,
    ratio_tol: float = 1e-4,
    scan_points: int = 64,
    max_zoom: int = 5,
) -> float:
    """Find delta inside ``bracket`` so that T2/T1 equals ``target_ratio``.

    ``target_ratio`` may be a Fraction, a (r, s) pair or a float.  The
    offset E0(delta) is evaluated with the chosen engine and the rational
    condition is solved through a sign-robust residual; brackets whose
    sign-change window is narrower than the scan are found by zooming on
    the residual minimum.  If no exact root exists but the best point
    satisfies |T2/T1 - r/s| <= ratio_tol it is returned; otherwise a
    TuningError reports the failure.
    """
    if isinstance(target_ratio, tuple):
        ratio = Fraction(*target_ratio)
    else:
        ratio = Fraction(target_ratio).limit_denominator(10_000)
    dF = d * abs(F)
    tau = float(2.0 * dF / ratio)

    def offset_at(delta: float) -> float:
        p = ModelParams(delta=delta, Delta=Delta, F=F, d=d, hbar=hbar)
        if engine == "floquet":
            return ladder_offset_floquet(p, check=False)[2]
        if engine == "diagonalization":
            return ladder_offset_diag(p, window)
        raise ValueError(f"unknown engine {engine!r}")

    def g(delta: float) -> float:
        return _ratio_residual(offset_at(delta), dF, tau)

    lo, hi = bracket
    if not lo < hi:
        raise ValueError("bracket must satisfy lo < hi")

    def scan_for_root(a: float, b: float, depth: int) -> float | None:
        xs = np.linspace(a, b, scan_points)
        gs = np.array([g(x) for x in xs])
        sign_change = np.nonzero(gs[:-1] * gs[1:] < 0)[0]
        if sign_change.size:
            i = sign_change[0]
            return brentq(g, xs[i], xs[i + 1], xtol=1e-12, rtol=8.9e-16)
        if depth >= max_zoom:
            return None
        i_min = int(np.argmin(np.abs(gs)))
        half = (b - a) / scan_points
        return scan_for_root(max(a, xs[i_min] - half), min(b, xs[i_min] + half), depth + 1)

    root = scan_for_root(lo, hi, 0)
    if root is None:
        # accept the residual minimum if it already meets the ratio tolerance
        xs = np.linspace(lo, hi, scan_points)
        errs = [_ratio_error(offset_at(x), dF, tau) for x in xs]
        i = int(np.argmin(errs))
        if errs[i] <= ratio_tol:
            return float(xs[i])
        raise TuningError(
            f"no sign change in bracket {bracket} and best ratio error "
            f"{errs[i]:.2e} above {ratio_tol:.1e}"
        )
    if _ratio_error(offset_at(root), dF, tau) > ratio_tol:
        raise TuningError("root found but achieved ratio misses the target")
    return float(root)


# ---------------------------------------------------------------------------
# initial states

def make_gaussian_packet(
    width_sites: float,
    center: int,
    band: str,
    params: ModelParams,
    window: LatticeWindow = DEFAULT_WINDOW,
    kappa_points: int = 256,
) -> WavePacket:
    """Gaussian amplitude profile exp(-(n - center)^2 / width^2).

    ``band`` selects an optional projection: "lower", "upper" or "none".
    width_sites = 0 degenerates to a single-site peak (the breathing-mode
    input).  The packet must fit inside the guarded interior.
    """
    n = window.sites
    if not (window.n_min + window.guard <= center <= window.n_max - window.guard):
        raise WindowError("packet centre inside the guard band")
    if width_sites < 0:
        raise ValueError("width must be non-negative")
    if width_sites == 0:
        pkt = WavePacket.site_peak(window, center)
    else:
        amps = np.exp(-((n - center) ** 2) / width_sites**2).astype(complex)
        pkt = WavePacket(window, amps).normalized()
        if pkt.guard_occupancy() > 1e-12:
            raise WindowError("packet tail overflows into the guard band")
    if band == "none":
        return pkt
    if band in ("lower", "upper"):
        return project_band(pkt, 0 if band == "lower" else 1, params, kappa_points)
    raise ValueError("band must be 'lower', 'upper' or 'none'")


# ---------------------------------------------------------------------------
# named scenarios

def _occupation_engine_offset(params: ModelParams, engine: str, window: LatticeWindow) -> float:
    if engine == "floquet":
        return ladder_offset_floquet(params, check=False)[2]
    if engine == "diagonalization":
        return ladder_offset_diag(params, window)
    raise ValueError(f"unknown engine {engine!r}")


def run_oscillating_mode(
    params: ModelParams,
    window: LatticeWindow = DEFAULT_WINDOW,
    horizon: float | None = None,
    samples_per_period: int = 16,
    width_sites: float = 10.0,
    kappa_points: int = 256,
    offset_engine: str = "floquet",
) -> ScenarioReport:
    """Broad Gaussian packet under constant tilt.

    Emits the density map, the occupation trace (with exact samples at
    every multiple of T1), the commensurability report and the revival
    fidelity at T_BZ when the horizon reaches it.
    """
    if params.F == 0:
        raise ValueError("oscillating mode requires F != 0")
    E0 = _occupation_engine_offset(params, offset_engine, window)
    recon = reconstruction_times(params, E0)
    T1 = recon.T1
    if horizon is None:
        horizon = recon.T_BZ if recon.T_BZ is not None else 4.0 * T1
        horizon = max(horizon, 4.0 * T1)
    psi0 = make_gaussian_packet(width_sites, 0, "none", params, window, kappa_points)
    n_max = int(np.floor(horizon / T1 + 1e-9))
    landmarks = T1 * np.arange(n_max + 1)
    uniform = np.linspace(0.0, horizon, max(2, int(np.ceil(horizon / T1 * samples_per_period)) + 1))
    times = np.unique(np.concatenate([uniform, landmarks]))
    packets = evolve_real_space(psi0, params, times)
    densities = np.array([p.density for p in packets])
    occ_list = [band_occupations(p, params, kappa_points, t=t) for p, t in zip(packets, times)]
    occs = np.array([[o.p0, o.p1] for o in occ_list])
    land_idx = np.searchsorted(times, landmarks)
    landmark_occ = occs[land_idx]
    fidelity = None
    if recon.T_BZ is not None and recon.T_BZ <= horizon + 1e-9:
        at = packets[int(np.searchsorted(times, recon.T_BZ))]
        fidelity = abs(psi0.overlap(at))
    recon = ReconstructionReport(
        T1=recon.T1, T2=recon.T2, ratio=recon.ratio, rational=recon.rational,
        T_BZ=recon.T_BZ, fidelity=fidelity, divergent=recon.divergent,
    )
    fit = None
    if landmarks.size >= 8:
        samples = [
            BandOccupations(p0=o[0], p1=o[1], t=t)
            for o, t in zip(landmark_occ, landmarks)
        ]
        fit = fit_occupation_sinusoid(samples, params, E0)
    return ScenarioReport(
        name="oscillating",
        params=params,
        window=window,
        times=times,
        densities=densities,
        occupations=occs,
        landmark_ns=np.arange(n_max + 1),
        landmark_occupations=landmark_occ,
        reconstruction=recon,
        fit=fit,
        max_guard_occupancy=max(p.guard_occupancy() for p in packets),
    )


def run_breathing_mode(
    params: ModelParams,
    window: LatticeWindow = DEFAULT_WINDOW,
    horizon: float | None = None,
    samples_per_period: int = 32,
    kappa_points: int = 256,
    offset_engine: str = "floquet",
) -> ScenarioReport:
    """Single-site initial state: the width breathes while the centroid
    stays put.  The width trace carries both clocks, T1 and T_BZ."""
    if params.F == 0:
        raise ValueError("breathing mode requires F != 0")
    E0 = _occupation_engine_offset(params, offset_engine, window)
    recon = reconstruction_times(params, E0)
    T1 = recon.T1
    if horizon is None:
        horizon = recon.T_BZ if recon.T_BZ is not None else 4.0 * T1
        horizon = max(horizon, 4.0 * T1)
    psi0 = WavePacket.site_peak(window, 0)
    times = np.linspace(0.0, horizon, max(2, int(np.ceil(horizon / T1 * samples_per_period)) + 1))
    packets = evolve_real_space(psi0, params, times)
    densities = np.array([p.density for p in packets])
    widths = np.array([p.rms_width() for p in packets])
    occs = None
    if params.delta != 0:
        occ_list = [band_occupations(p, params, kappa_points, t=t) for p, t in zip(packets, times)]
        occs = np.array([[o.p0, o.p1] for o in occ_list])
    return ScenarioReport(
        name="breathing",
        params=params,
        window=window,
        times=times,
        densities=densities,
        occupations=occs,
        landmark_ns=None,
        landmark_occupations=None,
        reconstruction=recon,
        widths=widths,
        max_guard_occupancy=max(p.guard_occupancy() for p in packets),
    )


def run_beam_splitter(
    params: ModelParams,
    window: LatticeWindow = DEFAULT_WINDOW,
    flip_time: float | None = None,
    measure_time: float | None = None,
    windows: tuple[tuple[int, int], tuple[int, int]] = ((-100, -40), (-41, 20)),
    width_sites: float = 10.0,
    samples_per_period: int = 16,
    kappa_points: int = 256,
) -> ScenarioReport:
    """Split a packet by a partial zone-edge transition, then flip F.

    The force flip (default at T_B/2) makes the two branches permanent;
    branch populations inside the two site windows at the measurement
    time (default 1.5 T_B) are compared against the Landau-Zener weight.
    """
    if params.F == 0:
        raise ValueError("beam splitter requires F != 0")
    TB = params.bloch_period
    if flip_time is None:
        flip_time = 0.5 * TB
    if measure_time is None:
        measure_time = 1.5 * TB
    if not 0.0 < flip_time < measure_time:
        raise ValueError("need 0 < flip_time < measure_time")
    (l_lo, l_hi), (r_lo, r_hi) = windows
    if l_lo > l_hi or r_lo > r_hi:
        raise ValueError("site windows must be ordered (lo, hi)")
    if max(l_lo, r_lo) <= min(l_hi, r_hi):
        raise ValueError("branch windows overlap")
    psi0 = make_gaussian_packet(width_sites, 0, "none", params, window, kappa_points)
    segments = [(params, flip_time), (params.flipped_force(), measure_time)]
    n_samples = max(2, int(np.ceil(measure_time / TB * 2 * samples_per_period)) + 1)
    times = np.unique(np.concatenate([
        np.linspace(0.0, measure_time, n_samples),
        [flip_time, measure_time],
    ]))
    packets = evolve_piecewise(psi0, segments, times)
    densities = np.array([p.density for p in packets])
    final = packets[-1]
    n = window.sites
    dens = final.density
    mask_l = (n >= l_lo) & (n <= l_hi)
    mask_r = (n >= r_lo) & (n <= r_hi)
    report = BeamSplitterReport(
        flip_time=flip_time,
        measure_time=measure_time,
        left_window=(l_lo, l_hi),
        right_window=(r_lo, r_hi),
        pop_left=float(dens[mask_l].sum()),
        pop_right=float(dens[mask_r].sum()),
        lz_prediction=landau_zener_probability(params),
    )
    return ScenarioReport(
        name="beam-splitter",
        params=params,
        window=window,
        times=times,
        densities=densities,
        occupations=None,
        landmark_ns=None,
        landmark_occupations=None,
        reconstruction=None,
        splitter=report,
        max_guard_occupancy=max(p.guard_occupancy() for p in packets),
    )
