"""Deterministic data emission: CSV tables, JSON summaries, binary
checkpoints.

Identical inputs produce byte-identical files: floats are rendered with
%.17g (round-trip exact), column orders are fixed, rows end with a
newline and files are newline-terminated.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .model import LatticeWindow
from .propagation import KappaPropagatorState
from .scenarios import ScenarioReport
from .spectrum import LadderSpectrum


def fmt(x) -> str:
    """Fixed float formatting used in every CSV cell (17 significant
    digits, enough to round-trip a double)."""
    return format(float(x), ".17g")


def _write_text(path, lines: list[str]) -> None:
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def write_band_csv(path, band_points) -> None:
    """Band-structure table: kappa,E0,E1,u,v,absM."""
    lines = ["kappa,E0,E1,u,v,absM"]
    for bp in band_points:
        lines.append(",".join([
            fmt(bp.kappa), fmt(bp.E0), fmt(bp.E1), fmt(bp.u), fmt(bp.v), fmt(abs(bp.M)),
        ]))
    _write_text(path, lines)


def spectrum_csv_row(spec: LadderSpectrum) -> str:
    return ",".join([
        fmt(spec.params.delta),
        fmt(spec.params.Delta),
        fmt(spec.params.Fd),
        fmt(spec.offset_E0),
        spec.method,
        "1" if spec.degenerate else "0",
    ])


def write_spectrum_csv(path, spectra) -> None:
    """Ladder-offset table: delta,Delta,Fd,offset,method,degenerate."""
    lines = ["delta,Delta,Fd,offset,method,degenerate"]
    lines += [spectrum_csv_row(s) for s in spectra]
    _write_text(path, lines)


def write_surface_csv(path, rows) -> None:
    """Offset surface on a (delta, Delta) grid: delta,Delta,offset."""
    lines = ["delta,Delta,offset"]
    for delta, Delta, offset in rows:
        lines.append(",".join([fmt(delta), fmt(Delta), fmt(offset)]))
    _write_text(path, lines)


def write_occupation_csv(path, times, p0, p1) -> None:
    """Occupation trace: t,p0,p1."""
    lines = ["t,p0,p1"]
    for t, a, b in zip(times, p0, p1):
        lines.append(",".join([fmt(t), fmt(a), fmt(b)]))
    _write_text(path, lines)


def write_density_csv(path, times, window: LatticeWindow, densities) -> None:
    """Long-format density map: t,n,density (one row per time and site)."""
    sites = window.sites
    lines = ["t,n,density"]
    for t, dens in zip(times, densities):
        for n, rho in zip(sites, dens):
            lines.append(",".join([fmt(t), str(int(n)), fmt(rho)]))
    _write_text(path, lines)


def write_packet_csv(path, window: LatticeWindow, amplitudes) -> None:
    """Packet snapshot: n,re,im,abs."""
    lines = ["n,re,im,abs"]
    for n, a in zip(window.sites, amplitudes):
        lines.append(",".join([str(int(n)), fmt(a.real), fmt(a.imag), fmt(abs(a))]))
    _write_text(path, lines)


def scenario_summary(report: ScenarioReport) -> dict:
    """JSON-ready summary of a scenario run (fixed key order)."""
    out: dict = {
        "scenario": report.name,
        "delta": report.params.delta,
        "Delta": report.params.Delta,
        "F": report.params.F,
        "d": report.params.d,
        "hbar": report.params.hbar,
        "max_guard_occupancy": report.max_guard_occupancy,
    }
    rec = report.reconstruction
    if rec is not None:
        out.update({
            "T1": rec.T1,
            "T2": None if not np.isfinite(rec.T2) else rec.T2,
            "ratio": None if not np.isfinite(rec.ratio) else rec.ratio,
            "r": rec.rational[0] if rec.rational else None,
            "s": rec.rational[1] if rec.rational else None,
            "T_BZ": rec.T_BZ,
            "fidelity": rec.fidelity,
            "divergent": rec.divergent,
        })
    if report.fit is not None:
        out.update({
            "fit_X": report.fit.X,
            "fit_Y": report.fit.Y,
            "fit_phi": report.fit.phi,
            "fit_residual": report.fit.residual,
        })
    if report.splitter is not None:
        sp = report.splitter
        out.update({
            "flip_time": sp.flip_time,
            "measure_time": sp.measure_time,
            "left_window": list(sp.left_window),
            "right_window": list(sp.right_window),
            "pop_left": sp.pop_left,
            "pop_right": sp.pop_right,
            "lz_prediction": sp.lz_prediction,
        })
    return out


def write_json(path, obj: dict) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="ascii")


# ---------------------------------------------------------------------------
# binary checkpoint

#: Checkpoint layout: little-endian float64 sequence
#: [n_kappa, t, C, kappa_grid..., Re A..., Im A..., Re B..., Im B...]
CHECKPOINT_DTYPE = "<f8"


def write_checkpoint(path, state: KappaPropagatorState) -> None:
    K = state.kappa_grid.size
    payload = np.concatenate([
        [float(K), state.t, state.C],
        state.kappa_grid.astype(float),
        state.A.real, state.A.imag,
        state.B.real, state.B.imag,
    ]).astype(CHECKPOINT_DTYPE)
    Path(path).write_bytes(payload.tobytes())


def read_checkpoint(path) -> KappaPropagatorState:
    raw = np.frombuffer(Path(path).read_bytes(), dtype=CHECKPOINT_DTYPE)
    K = int(raw[0])
    expected = 3 + 5 * K
    if raw.size != expected:
        raise ValueError(f"checkpoint holds {raw.size} doubles, expected {expected}")
    t, C = float(raw[1]), float(raw[2])
    body = raw[3:]
    grid = body[:K].copy()
    A = body[K:2 * K] + 1j * body[2 * K:3 * K]
    B = body[3 * K:4 * K] + 1j * body[4 * K:5 * K]
    return KappaPropagatorState(kappa_grid=grid, A=A, B=B, C=C, t=t)
