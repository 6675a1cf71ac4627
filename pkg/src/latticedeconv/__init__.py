"""Deconvolution kernel density estimation for noisy lattice random fields."""

__version__ = "0.1.0"

from .lattice import (
    LatticeRegion,
    boundary,
    check_region_sequence,
    make_l_shaped_region,
    make_rect_region,
)
from .fields import (
    DependenceProfile,
    FieldSample,
    InnovationSpec,
    LinearFieldSpec,
    MixingProfile,
    NoiseModel,
    VolterraFieldSpec,
    add_noise,
    check_dependence_summability,
    check_mixing_summability,
    dependence_linear,
    dependence_volterra,
    simulate_field,
    simulate_linear,
    simulate_volterra,
)
from .deconv import (
    DeconvKernel,
    DensityEstimate,
    GnTable,
    empirical_cf,
    estimate,
    estimate_cf_form,
    estimate_direct,
)
from .asymptotics import (
    BandwidthSchedule,
    check_lemma_limits,
    eta,
    kernel_moments,
    m_seq_dependence,
    m_seq_mixing,
    sigma2,
    standardize,
)
from .harness import (
    CltReport,
    ExperimentConfig,
    bias_curve,
    joint_diagonality,
    ks_normality,
    run_experiment,
    variance_scaling_curve,
)
from .estimator import DeconvolutionKDE

__all__ = [
    "LatticeRegion",
    "boundary",
    "check_region_sequence",
    "make_l_shaped_region",
    "make_rect_region",
    "DependenceProfile",
    "FieldSample",
    "InnovationSpec",
    "LinearFieldSpec",
    "MixingProfile",
    "NoiseModel",
    "VolterraFieldSpec",
    "add_noise",
    "check_dependence_summability",
    "check_mixing_summability",
    "dependence_linear",
    "dependence_volterra",
    "simulate_field",
    "simulate_linear",
    "simulate_volterra",
    "DeconvKernel",
    "DensityEstimate",
    "GnTable",
    "empirical_cf",
    "estimate",
    "estimate_cf_form",
    "estimate_direct",
    "BandwidthSchedule",
    "check_lemma_limits",
    "eta",
    "kernel_moments",
    "m_seq_dependence",
    "m_seq_mixing",
    "sigma2",
    "standardize",
    "CltReport",
    "ExperimentConfig",
    "bias_curve",
    "joint_diagonality",
    "ks_normality",
    "run_experiment",
    "variance_scaling_curve",
    "DeconvolutionKDE",
]
