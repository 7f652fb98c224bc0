"""Command-line front end.

Every subcommand emits one figure-class data product as CSV (plus a JSON
summary where a scalar report makes sense):

  bands      dispersion, Bloch coefficients and |M| over the reduced zone
  spectrum   ladder offsets for one parameter set, both engines
  scan       offset surface over a (delta, Delta) grid, or beam-splitter
             branch populations versus delta
  evolve     one propagation run: density map, occupation trace, packet
             snapshot, optional kappa-state checkpoint
  scenario   named experiments (oscillating / breathing / splitter) with
             a JSON summary of periods, fits and branch populations
  tune       solve for the gap delta that hits a target period ratio

Configuration comes from defaults, an optional preset, an optional JSON
config file and command-line flags, later sources winning.  Identical
configurations produce byte-identical outputs.

Exit codes: 0 success, 2 configuration error, 3 numerical failure
(leakage, degeneracy, accuracy), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import emit
from .bands import band_structure, landau_zener_probability
from .errors import (
    BlochZenerError,
    CompletenessError,
    ConfigError,
    DegenerateLadderError,
    FitResidualError,
    IntegrationAccuracyError,
    LeakageError,
    TuningError,
    WindowError,
)
from .model import LatticeWindow, ModelParams, WavePacket
from .propagation import (
    band_occupations,
    evolve_kappa,
    evolve_kappa_packet,
    evolve_real_space,
    evolve_whittaker_hill,
)
from .scenarios import (
    make_gaussian_packet,
    run_beam_splitter,
    run_breathing_mode,
    run_oscillating_mode,
    tune_delta,
)
from .spectrum import ladder_spectrum_diag, ladder_spectrum_floquet

COMMANDS = ("bands", "spectrum", "evolve", "scenario", "tune", "scan")

#: Presets, one per figure-class output.
PRESETS: dict[str, dict] = {
    "dispersion-minibands": {
        "command": "bands", "delta": 18.0, "Delta": 80.0, "F": 1.0, "kpoints": 257,
    },
    "interband-coupling": {
        "command": "bands", "delta": 18.0, "Delta": 80.0, "F": 1.0, "kpoints": 513,
    },
    "offset-surface": {
        "command": "scan", "what": "offset", "F": 1.0,
        "deltas": [-10.0, 10.0, 81], "Deltas": [0.0, 10.0, 41],
    },
    "ladder-rungs-narrow": {
        "command": "scan", "what": "offset", "F": 1.0,
        "deltas": [0.0, 6.0, 61], "Deltas": [2.0, 2.0, 1],
    },
    "ladder-rungs-wide": {
        "command": "scan", "what": "offset", "F": 1.0,
        "deltas": [0.0, 6.0, 61], "Deltas": [4.0, 4.0, 1],
    },
    "oscillating-tbz-equals-tb": {
        "command": "scenario", "scenario": "oscillating",
        "delta": 6.734, "Delta": 80.0, "F": 1.0, "horizon": 4.0 * np.pi,
    },
    "oscillating-slow-envelope": {
        "command": "scenario", "scenario": "oscillating",
        "delta": 17.19, "Delta": 80.0, "F": 1.0,
    },
    "breathing-single-site": {
        "command": "scenario", "scenario": "breathing",
        "delta": 6.734, "Delta": 80.0, "F": 1.0, "horizon": 4.0 * np.pi,
    },
    "splitter-snapshot": {
        "command": "evolve", "engine": "real",
        "delta": 6.734, "Delta": 80.0, "F": 1.0,
        "tmax": np.pi, "dt": np.pi / 64,
    },
    "splitter-flip": {
        "command": "scenario", "scenario": "splitter",
        "delta": 6.734, "Delta": 80.0, "F": 1.0,
    },
    "splitter-gap-scan": {
        "command": "scan", "what": "splitter", "Delta": 80.0, "F": 1.0,
        "deltas": [0.5, 12.0, 24],
    },
}

_DEFAULTS: dict = {
    "command": None,
    "delta": None,
    "Delta": None,
    "F": 1.0,
    "d": 1.0,
    "hbar": 1.0,
    "sites": 256,
    "guard": 32,
    "kpoints": 256,
    "method": "both",
    "engine": "real",
    "scenario": "oscillating",
    "packet": {"width": 10.0, "center": 0, "band": "none"},
    "tmax": None,
    "dt": None,
    "horizon": None,
    "flip_time": None,
    "measure_time": None,
    "windows": [[-100, -40], [-41, 20]],
    "ratio": None,
    "bracket": [0.5, 20.0],
    "deltas": None,
    "Deltas": None,
    "what": "offset",
    "workers": 1,
    "out": None,
    "format": "csv",
    "checkpoint": None,
}

_NUMBER_FIELDS = {"delta", "Delta", "F", "d", "hbar", "tmax", "dt", "horizon",
                  "flip_time", "measure_time"}
_INT_FIELDS = {"sites", "guard", "kpoints", "workers"}
_CHOICE_FIELDS = {
    "command": COMMANDS,
    "method": ("diagonalization", "floquet", "both"),
    "engine": ("real", "kappa", "whittaker-hill"),
    "scenario": ("oscillating", "breathing", "splitter"),
    "what": ("offset", "splitter"),
    "format": ("csv", "json"),
}


@dataclass
class RunConfig:
    """Validated run configuration with defaults applied."""

    command: str
    params: ModelParams
    window: LatticeWindow
    kpoints: int = 256
    method: str = "both"
    engine: str = "real"
    scenario: str = "oscillating"
    packet: dict = field(default_factory=lambda: dict(_DEFAULTS["packet"]))
    tmax: float | None = None
    dt: float | None = None
    horizon: float | None = None
    flip_time: float | None = None
    measure_time: float | None = None
    windows: tuple = ((-100, -40), (-41, 20))
    ratio: str | None = None
    bracket: tuple[float, float] = (0.5, 20.0)
    deltas: tuple | None = None
    Deltas: tuple | None = None
    what: str = "offset"
    workers: int = 1
    out: str | None = None
    format: str = "csv"
    checkpoint: str | None = None


def _check_number(field_name: str, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(field_name, f"expected a number, got {type(value).__name__}")
    if not np.isfinite(value):
        raise ConfigError(field_name, "must be finite")
    return float(value)


def _check_int(field_name: str, value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(field_name, f"expected an integer, got {type(value).__name__}")
    return value


def _validate(raw: dict) -> RunConfig:
    merged = dict(_DEFAULTS)
    for key, val in raw.items():
        if key not in merged:
            raise ConfigError(key, "unknown field")
        merged[key] = val
    for key in _NUMBER_FIELDS:
        if merged[key] is not None:
            merged[key] = _check_number(key, merged[key])
    for key in _INT_FIELDS:
        merged[key] = _check_int(key, merged[key])
    for key, choices in _CHOICE_FIELDS.items():
        if merged[key] is not None and merged[key] not in choices:
            raise ConfigError(key, f"must be one of {choices}")
    if merged["command"] is None:
        raise ConfigError("command", f"required; one of {COMMANDS}")
    if merged["delta"] is None:
        raise ConfigError("delta", "required")
    if merged["Delta"] is None and merged["command"] != "scan":
        raise ConfigError("Delta", "required")
    if merged["sites"] < 2:
        raise ConfigError("sites", "window half-width must be at least 2")
    if merged["kpoints"] < 2:
        raise ConfigError("kpoints", "needs at least 2 points")
    if merged["workers"] < 1:
        raise ConfigError("workers", "must be at least 1")
    try:
        params = ModelParams(
            delta=merged["delta"],
            Delta=merged["Delta"] if merged["Delta"] is not None else 0.0,
            F=merged["F"], d=merged["d"], hbar=merged["hbar"],
        )
        window = LatticeWindow(-merged["sites"], merged["sites"], merged["guard"])
    except (ValueError, WindowError) as exc:
        raise ConfigError("params", str(exc)) from exc

    def _pair_list(name):
        val = merged[name]
        if val is None:
            return None
        if (not isinstance(val, (list, tuple))) or len(val) != 3:
            raise ConfigError(name, "expected [start, stop, num]")
        start = _check_number(f"{name}[0]", val[0])
        stop = _check_number(f"{name}[1]", val[1])
        num = _check_int(f"{name}[2]", val[2])
        if num < 1:
            raise ConfigError(f"{name}[2]", "num must be >= 1")
        return (start, stop, num)

    windows = merged["windows"]
    if (not isinstance(windows, (list, tuple))) or len(windows) != 2:
        raise ConfigError("windows", "expected two [lo, hi] site intervals")
    win_t = []
    for i, w in enumerate(windows):
        if (not isinstance(w, (list, tuple))) or len(w) != 2:
            raise ConfigError(f"windows[{i}]", "expected [lo, hi]")
        win_t.append((_check_int(f"windows[{i}][0]", w[0]),
                      _check_int(f"windows[{i}][1]", w[1])))

    packet = dict(_DEFAULTS["packet"])
    if merged["packet"] is not None:
        if not isinstance(merged["packet"], dict):
            raise ConfigError("packet", "expected an object")
        for key, val in merged["packet"].items():
            if key not in packet:
                raise ConfigError(f"packet.{key}", "unknown field")
            packet[key] = val
        packet["width"] = _check_number("packet.width", packet["width"])
        packet["center"] = _check_int("packet.center", packet["center"])
        if packet["band"] not in ("lower", "upper", "none"):
            raise ConfigError("packet.band", "must be 'lower', 'upper' or 'none'")

    ratio = merged["ratio"]
    if ratio is not None and not isinstance(ratio, str):
        raise ConfigError("ratio", "expected a string like '56/57' or '2'")
    bracket = merged["bracket"]
    if (not isinstance(bracket, (list, tuple))) or len(bracket) != 2:
        raise ConfigError("bracket", "expected [lo, hi]")
    bracket = (_check_number("bracket[0]", bracket[0]),
               _check_number("bracket[1]", bracket[1]))

    return RunConfig(
        command=merged["command"],
        params=params,
        window=window,
        kpoints=merged["kpoints"],
        method=merged["method"],
        engine=merged["engine"],
        scenario=merged["scenario"],
        packet=packet,
        tmax=merged["tmax"],
        dt=merged["dt"],
        horizon=merged["horizon"],
        flip_time=merged["flip_time"],
        measure_time=merged["measure_time"],
        windows=tuple(win_t),
        ratio=ratio,
        bracket=bracket,
        deltas=_pair_list("deltas"),
        Deltas=_pair_list("Deltas"),
        what=merged["what"],
        workers=merged["workers"],
        out=merged["out"],
        format=merged["format"],
        checkpoint=merged["checkpoint"],
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("<json>", f"not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("<json>", "top level must be an object")
    return _validate(raw)


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    epilog_lines = ["presets (use --preset NAME):"]
    descriptions = {
        "dispersion-minibands": "miniband dispersion over the reduced zone",
        "interband-coupling": "reduced coupling |M| profile",
        "offset-surface": "ladder offset over a (delta, Delta) grid",
        "ladder-rungs-narrow": "offset versus delta at Delta = 2",
        "ladder-rungs-wide": "offset versus delta at Delta = 4",
        "oscillating-tbz-equals-tb": "oscillating mode, revival after one Bloch period",
        "oscillating-slow-envelope": "oscillating mode with a 28-Bloch-period envelope",
        "breathing-single-site": "breathing mode from a single occupied site",
        "splitter-snapshot": "packet split at half a Bloch period",
        "splitter-flip": "permanent splitting by a force flip",
        "splitter-gap-scan": "branch populations versus the gap delta",
    }
    for name in PRESETS:
        epilog_lines.append(f"  {name:28s} {descriptions[name]}")
    parser = argparse.ArgumentParser(
        prog="blochzener",
        description=__doc__,
        epilog="\n".join(epilog_lines),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", nargs="?", choices=COMMANDS,
                        help="what to compute (may also come from --config/--preset)")
    parser.add_argument("--config", type=str, help="JSON configuration file")
    parser.add_argument("--preset", type=str, choices=sorted(PRESETS),
                        help="named preset configuration")
    parser.add_argument("--delta", type=float, help="miniband gap")
    parser.add_argument("--Delta", type=float, help="unperturbed bandwidth")
    parser.add_argument("--force", type=float, dest="F", help="static force F")
    parser.add_argument("--dlat", type=float, dest="d", help="lattice period d")
    parser.add_argument("--hbar", type=float, help="reduced action")
    parser.add_argument("--sites", type=int, help="window half-width (window is [-sites, sites])")
    parser.add_argument("--guard", type=int, help="guard band width")
    parser.add_argument("--kpoints", type=int, help="kappa grid size")
    parser.add_argument("--method", choices=_CHOICE_FIELDS["method"], help="spectrum engine")
    parser.add_argument("--engine", choices=_CHOICE_FIELDS["engine"], help="evolve engine")
    parser.add_argument("--scenario", choices=_CHOICE_FIELDS["scenario"], help="scenario name")
    parser.add_argument("--width", type=float, help="gaussian packet width (sites)")
    parser.add_argument("--center", type=int, help="packet centre site")
    parser.add_argument("--band", choices=("lower", "upper", "none"), help="packet band projection")
    parser.add_argument("--tmax", type=float, help="evolution horizon")
    parser.add_argument("--dt", type=float, help="sampling step")
    parser.add_argument("--horizon", type=float, help="scenario horizon")
    parser.add_argument("--flip-time", type=float, dest="flip_time", help="force-flip time")
    parser.add_argument("--measure-time", type=float, dest="measure_time", help="measurement time")
    parser.add_argument("--ratio", type=str, help="target T2/T1 as 'r/s' or a number")
    parser.add_argument("--bracket", type=str, help="tuning bracket 'lo:hi'")
    parser.add_argument("--deltas", type=str, help="scan grid 'start:stop:num'")
    parser.add_argument("--Deltas", type=str, help="scan grid 'start:stop:num'")
    parser.add_argument("--what", choices=_CHOICE_FIELDS["what"], help="scan observable")
    parser.add_argument("--workers", type=int, help="worker processes for scan")
    parser.add_argument("--out", type=str, help="output path (CSV); summaries go to OUT.json")
    parser.add_argument("--format", choices=("csv", "json"), help="primary output format")
    parser.add_argument("--checkpoint", type=str, help="write final kappa state here (evolve)")
    return parser


def _parse_triplet(field_name: str, text: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(field_name, "expected 'start:stop:num'")
    try:
        return [float(parts[0]), float(parts[1]), int(parts[2])]
    except ValueError as exc:
        raise ConfigError(field_name, str(exc)) from exc


def _merge_cli(args: argparse.Namespace) -> RunConfig:
    raw: dict = {}
    if args.preset:
        raw.update(PRESETS[args.preset])
    if args.config:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc}") from exc
        try:
            file_raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"not valid JSON: {exc}") from exc
        if not isinstance(file_raw, dict):
            raise ConfigError("config", "top level must be an object")
        raw.update(file_raw)
    scalar_flags = (
        "delta", "Delta", "F", "d", "hbar", "sites", "guard", "kpoints",
        "method", "engine", "scenario", "tmax", "dt", "horizon",
        "flip_time", "measure_time", "ratio", "what", "workers", "out",
        "format", "checkpoint",
    )
    for name in scalar_flags:
        val = getattr(args, name, None)
        if val is not None:
            raw[name] = val
    if args.command is not None:
        raw["command"] = args.command
    if args.bracket is not None:
        parts = args.bracket.split(":")
        if len(parts) != 2:
            raise ConfigError("bracket", "expected 'lo:hi'")
        raw["bracket"] = [float(parts[0]), float(parts[1])]
    if args.deltas is not None:
        raw["deltas"] = _parse_triplet("deltas", args.deltas)
    if getattr(args, "Deltas") is not None:
        raw["Deltas"] = _parse_triplet("Deltas", args.Deltas)
    packet = dict(raw.get("packet", {})) if isinstance(raw.get("packet"), dict) else {}
    if args.width is not None:
        packet["width"] = args.width
    if args.center is not None:
        packet["center"] = args.center
    if args.band is not None:
        packet["band"] = args.band
    if packet:
        raw["packet"] = {**_DEFAULTS["packet"], **packet}
    return _validate(raw)


# ---------------------------------------------------------------------------
# command implementations

def _out_path(cfg: RunConfig, suffix: str) -> Path:
    if cfg.out is None:
        raise ConfigError("out", "an output path is required")
    p = Path(cfg.out)
    return p if suffix == "" else p.with_name(p.stem + suffix)


def _cmd_bands(cfg: RunConfig) -> None:
    points = band_structure(cfg.params, cfg.kpoints)
    emit.write_band_csv(_out_path(cfg, ""), points)


def _spectrum_records(cfg: RunConfig):
    recs = []
    if cfg.method in ("diagonalization", "both"):
        recs.append(ladder_spectrum_diag(cfg.params, cfg.window))
    if cfg.method in ("floquet", "both"):
        recs.append(ladder_spectrum_floquet(cfg.params, max(cfg.kpoints, 512)))
    return recs


def _cmd_spectrum(cfg: RunConfig) -> None:
    recs = _spectrum_records(cfg)
    emit.write_spectrum_csv(_out_path(cfg, ""), recs)
    summary = {
        "delta": cfg.params.delta,
        "Delta": cfg.params.Delta,
        "Fd": cfg.params.Fd,
        "offsets": {r.method: r.offset_E0 for r in recs},
        "degenerate": {r.method: r.degenerate for r in recs},
        "spacing": 2.0 * cfg.params.d * abs(cfg.params.F),
    }
    emit.write_json(_out_path(cfg, ".json"), summary)


def _scan_cell_offset(cell) -> tuple:
    delta, Delta, F, d, hbar, kpoints = cell
    params = ModelParams(delta=delta, Delta=Delta, F=F, d=d, hbar=hbar)
    spec = ladder_spectrum_floquet(params, max(kpoints, 512))
    return (delta, Delta, spec.offset_E0)

def _scan_cell_splitter(cell) -> tuple:
    delta, Delta, F, d, hbar, sites, guard, windows, width = cell
    params = ModelParams(delta=delta, Delta=Delta, F=F, d=d, hbar=hbar)
    window = LatticeWindow(-sites, sites, guard)
    psi0 = make_gaussian_packet(width, 0, "none", params, window)
    half = 0.5 * params.bloch_period
    pkt = evolve_real_space(psi0, params, [half])[0]
    n = window.sites
    dens = pkt.density
    (l_lo, l_hi), (r_lo, r_hi) = windows
    pop_l = float(dens[(n >= l_lo) & (n <= l_hi)].sum())
    pop_r = float(dens[(n >= r_lo) & (n <= r_hi)].sum())
    return (delta, pop_l, pop_r, landau_zener_probability(params))


def _cmd_scan(cfg: RunConfig) -> None:
    if cfg.deltas is None:
        raise ConfigError("deltas", "scan requires a delta grid")
    d_lo, d_hi, d_n = cfg.deltas
    deltas = np.linspace(d_lo, d_hi, d_n)
    p = cfg.params
    if cfg.what == "offset":
        if cfg.Deltas is None:
            Ds = [p.Delta]
        else:
            D_lo, D_hi, D_n = cfg.Deltas
            Ds = np.linspace(D_lo, D_hi, D_n)
        cells = [
            (float(dl), float(D), p.F, p.d, p.hbar, cfg.kpoints)
            for D in Ds for dl in deltas
        ]
        worker = _scan_cell_offset
    else:
        cells = [
            (float(dl), p.Delta, p.F, p.d, p.hbar,
             cfg.window.n_max, cfg.window.guard, cfg.windows,
             cfg.packet["width"])
            for dl in deltas
        ]
        worker = _scan_cell_splitter
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(worker, cells))
    else:
        rows = [worker(c) for c in cells]
    if cfg.what == "offset":
        emit.write_surface_csv(_out_path(cfg, ""), rows)
    else:
        lines = ["delta,pop_left,pop_right,lz_prediction"]
        for row in rows:
            lines.append(",".join(emit.fmt(x) for x in row))
        Path(_out_path(cfg, "")).write_text("\n".join(lines) + "\n", encoding="ascii")


def _make_packet(cfg: RunConfig) -> WavePacket:
    return make_gaussian_packet(
        cfg.packet["width"], cfg.packet["center"], cfg.packet["band"],
        cfg.params, cfg.window, cfg.kpoints,
    )


def _cmd_evolve(cfg: RunConfig) -> None:
    if cfg.tmax is None:
        raise ConfigError("tmax", "evolve requires a horizon")
    dt = cfg.dt if cfg.dt is not None else cfg.tmax / 64
    times = np.unique(np.concatenate([np.arange(0.0, cfg.tmax, dt), [cfg.tmax]]))
    psi0 = _make_packet(cfg)
    if cfg.engine == "real":
        packets = evolve_real_space(psi0, cfg.params, times)
    else:
        packets = evolve_kappa_packet(
            psi0, cfg.params, times,
            engine="kappa" if cfg.engine == "kappa" else "whittaker-hill",
        )
    emit.write_density_csv(_out_path(cfg, ""), times, cfg.window,
                           [p.density for p in packets])
    if cfg.params.delta != 0:
        occ = [band_occupations(p, cfg.params, cfg.kpoints, t=t)
               for p, t in zip(packets, times)]
        emit.write_occupation_csv(_out_path(cfg, ".occ"), times,
                                  [o.p0 for o in occ], [o.p1 for o in occ])
    emit.write_packet_csv(_out_path(cfg, ".final"), cfg.window, packets[-1].amplitudes)
    if cfg.checkpoint is not None:
        if cfg.engine == "real":
            raise ConfigError("checkpoint", "checkpoints need a kappa-space engine")
        evolver = evolve_kappa if cfg.engine == "kappa" else evolve_whittaker_hill
        state = evolver(cfg.params, [times[-1]], kappa_points=max(cfg.kpoints, 64))[-1]
        emit.write_checkpoint(cfg.checkpoint, state)


def _cmd_scenario(cfg: RunConfig) -> None:
    if cfg.scenario == "oscillating":
        report = run_oscillating_mode(
            cfg.params, cfg.window, horizon=cfg.horizon,
            width_sites=cfg.packet["width"], kappa_points=cfg.kpoints,
        )
    elif cfg.scenario == "breathing":
        report = run_breathing_mode(
            cfg.params, cfg.window, horizon=cfg.horizon, kappa_points=cfg.kpoints,
        )
    else:
        report = run_beam_splitter(
            cfg.params, cfg.window,
            flip_time=cfg.flip_time, measure_time=cfg.measure_time,
            windows=cfg.windows, width_sites=cfg.packet["width"],
            kappa_points=cfg.kpoints,
        )
    emit.write_density_csv(_out_path(cfg, ""), report.times, cfg.window, report.densities)
    if report.occupations is not None:
        emit.write_occupation_csv(
            _out_path(cfg, ".occ"), report.times,
            report.occupations[:, 0], report.occupations[:, 1],
        )
    emit.write_json(_out_path(cfg, ".json"), emit.scenario_summary(report))


def _cmd_tune(cfg: RunConfig) -> None:
    if cfg.ratio is None:
        raise ConfigError("ratio", "tune requires a target ratio")
    if "/" in cfg.ratio:
        num, den = cfg.ratio.split("/", 1)
        try:
            target = (int(num), int(den))
        except ValueError as exc:
            raise ConfigError("ratio", "expected 'r/s' with integers") from exc
    else:
        try:
            target = float(cfg.ratio)
        except ValueError as exc:
            raise ConfigError("ratio", "expected a number or 'r/s'") from exc
    delta = tune_delta(
        target, cfg.params.Delta, F=cfg.params.F, bracket=cfg.bracket,
        d=cfg.params.d, hbar=cfg.params.hbar,
    )
    summary = {
        "target_ratio": cfg.ratio,
        "Delta": cfg.params.Delta,
        "Fd": cfg.params.Fd,
        "bracket": list(cfg.bracket),
        "delta": delta,
    }
    emit.write_json(_out_path(cfg, ""), summary)
    print(emit.fmt(delta))


_HANDLERS = {
    "bands": _cmd_bands,
    "spectrum": _cmd_spectrum,
    "scan": _cmd_scan,
    "evolve": _cmd_evolve,
    "scenario": _cmd_scenario,
    "tune": _cmd_tune,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_cli(args)
        _HANDLERS[cfg.command](cfg)
    except (ConfigError, WindowError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (LeakageError, DegenerateLadderError, IntegrationAccuracyError,
            CompletenessError, FitResidualError, TuningError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o failure: {exc}", file=sys.stderr)
        return 4
    except BlochZenerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
