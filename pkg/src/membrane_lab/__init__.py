"""membrane-lab: centrally loaded drum membranes, from eigenmodes to audio.

Solves the modes of radially loaded circular membranes, inverse-designs
loading profiles that push the overtone series onto integers, renders
stroke tones as damped-sinusoid sums, and analyses the result back out of
audio (spectra, harmonic ratios, decay rates, ADSR envelopes).
"""

from .analysis import (
    AdsrSegmentation,
    AnalysisReport,
    DecayFit,
    Peak,
    Spectrum,
    analyze,
    classify_stroke,
    compute_spectrum,
    detect_peaks,
    extract_features,
    fit_decay,
    group_harmonics,
    segment_adsr,
)
from .bessel import bessel_j, bessel_y, bessel_zero
from .harmonicity import (
    CharacteristicRatioVerdict,
    HarmonicAssessment,
    characteristic_verdicts,
    harmonicity_score,
    implied_fundamental,
)
from .loading import (
    LayerStep,
    LayerTrace,
    TwoRegionCandidate,
    apply_layers,
    graded_profile,
    optimize_graded,
    optimize_two_region,
    simulate_layers,
)
from .materials import (
    MaterialSample,
    impedance,
    material_report,
    sound_radiation_coefficient,
    transmission_coefficient,
)
from .membrane import (
    Mode,
    ModeTable,
    RadialDensityProfile,
    composite_modes,
    default_ceiling,
    find_degeneracies,
    mode_shape,
    uniform_modes,
)
from .synth import (
    Excitation,
    NoiseBurst,
    RenderSpec,
    StrokeTemplate,
    annular_filter,
    reference_mode_table,
    render_stroke,
)
from .wav import read_wav, write_wav

__version__ = "0.1.0"

__all__ = [
    "AdsrSegmentation",
    "AnalysisReport",
    "CharacteristicRatioVerdict",
    "DecayFit",
    "Excitation",
    "HarmonicAssessment",
    "LayerStep",
    "LayerTrace",
    "MaterialSample",
    "Mode",
    "ModeTable",
    "NoiseBurst",
    "Peak",
    "RadialDensityProfile",
    "RenderSpec",
    "Spectrum",
    "StrokeTemplate",
    "TwoRegionCandidate",
    "analyze",
    "annular_filter",
    "apply_layers",
    "bessel_j",
    "bessel_y",
    "bessel_zero",
    "characteristic_verdicts",
    "classify_stroke",
    "composite_modes",
    "compute_spectrum",
    "default_ceiling",
    "detect_peaks",
    "extract_features",
    "find_degeneracies",
    "fit_decay",
    "graded_profile",
    "group_harmonics",
    "harmonicity_score",
    "impedance",
    "implied_fundamental",
    "material_report",
    "mode_shape",
    "optimize_graded",
    "optimize_two_region",
    "read_wav",
    "reference_mode_table",
    "render_stroke",
    "segment_adsr",
    "simulate_layers",
    "sound_radiation_coefficient",
    "transmission_coefficient",
    "uniform_modes",
    "write_wav",
    "__version__",
]
