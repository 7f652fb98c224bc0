"""Bloch-Zener oscillations in a period-doubled tight-binding lattice.

Minibands and Bloch waves, the two Wannier-Stark ladders of the tilted
lattice, cross-validating propagation engines, and the reconstruction /
breathing / beam-splitter phenomenology built on top of them.
"""

from .model import (
    DEFAULT_WINDOW,
    LatticeWindow,
    ModelParams,
    WavePacket,
    apply_gauge_flip,
    apply_parity_x,
    apply_translation,
    build_hamiltonian,
)
from .bands import (
    BandPoint,
    band_structure,
    bloch_coefficients,
    bloch_wave_amplitude,
    coupling,
    dispersion,
    landau_zener_probability,
)
from .spectrum import (
    LadderSpectrum,
    ladder_offset_diag,
    ladder_offset_floquet,
    ladder_spectrum_diag,
    ladder_spectrum_floquet,
    offset_approx_bessel,
    offset_approx_elliptic,
    rescale_spectrum,
)
from .propagation import (
    BandOccupations,
    KappaPropagatorState,
    band_occupations,
    evolve_kappa,
    evolve_kappa_packet,
    evolve_real_space,
    evolve_whittaker_hill,
    project_band,
)
from .scenarios import (
    BeamSplitterReport,
    OccupationFit,
    ReconstructionReport,
    ScenarioReport,
    fit_occupation_sinusoid,
    make_gaussian_packet,
    reconstruction_times,
    run_beam_splitter,
    run_breathing_mode,
    run_oscillating_mode,
    tune_delta,
)

__version__ = "0.1.0"

__all__ = [
    "BandOccupations",
    "BandPoint",
    "BeamSplitterReport",
    "DEFAULT_WINDOW",
    "KappaPropagatorState",
    "LadderSpectrum",
    "LatticeWindow",
    "ModelParams",
    "OccupationFit",
    "ReconstructionReport",
    "ScenarioReport",
    "WavePacket",
    "apply_gauge_flip",
    "apply_parity_x",
    "apply_translation",
    "band_occupations",
    "band_structure",
    "bloch_coefficients",
    "bloch_wave_amplitude",
    "build_hamiltonian",
    "coupling",
    "dispersion",
    "evolve_kappa",
    "evolve_kappa_packet",
    "evolve_real_space",
    "evolve_whittaker_hill",
    "fit_occupation_sinusoid",
    "ladder_offset_diag",
    "ladder_offset_floquet",
    "ladder_spectrum_diag",
    "ladder_spectrum_floquet",
    "landau_zener_probability",
    "make_gaussian_packet",
    "offset_approx_bessel",
    "offset_approx_elliptic",
    "project_band",
    "reconstruction_times",
    "rescale_spectrum",
    "run_beam_splitter",
    "run_breathing_mode",
    "run_oscillating_mode",
    "tune_delta",
]
