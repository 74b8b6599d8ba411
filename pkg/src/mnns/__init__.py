"""Mixed-norm Lebesgue analysis and small-data mild solutions on grids.

The package has three layers. The measure-theoretic floor: tensor grids,
scalar and vector samples, iterated mixed norms, convolution, and the heat
flow with its decay diagnostics. The spectral middle: Riesz transforms,
the divergence-free projector, and pressure recovery on periodic grids.
The top: a Picard iteration for the projected convective equation in
scale-critical anisotropic norms, certified by measured contraction
constants and cross-checked by an independent time stepper.
"""

from .convolution import convolve, young_ratio
from .errors import (
    CflError,
    ConfigError,
    ConvergenceError,
    DomainEscapeError,
    ExponentError,
    FieldError,
    FormatError,
    GridError,
    GuardError,
    MnnsError,
    TailMassError,
    UnderResolvedError,
)
from .exponents import INF, MixedExponents, reciprocal
from .fieldio import read_components, read_field, write_components, write_field
from .grid import ScalarField, TensorGrid, VectorField
from .heat import (
    DecayFit,
    continuity_at_zero,
    gaussian_kernel_eval,
    heat_evolve,
    heat_evolve_derivative,
    kernel_1d_norm,
    measure_decay,
)
from .mild import (
    ContractionCertificate,
    SolverConfig,
    Trajectory,
    bilinear_probe,
    duhamel_bilinear,
    load_trajectory,
    local_solve,
    nonlinear_term,
    picard_solve,
    save_trajectory,
    time_mesh,
    xspace_norm,
    y_shape_constant,
    yspace_norm,
)
from .norms import (
    NormValue,
    aggregate_norm,
    mixed_holder_ratio,
    mixed_norm,
    plain_lp_norm,
    scaling_ratio,
    vector_norm,
)
from .oracle import timestep_oracle
from .spectral import (
    SpectralField,
    heat_propagate,
    leray_project,
    pressure_from_velocity,
    pressure_poisson_reference,
    random_band_limited,
    riesz_boundedness_probe,
    riesz_transform,
    spectral_divergence,
    spectral_gradient,
    vector_gradient,
    wavenumbers,
)

__version__ = "0.1.0"

__all__ = [
    "CflError",
    "ConfigError",
    "ContractionCertificate",
    "ConvergenceError",
    "DecayFit",
    "DomainEscapeError",
    "ExponentError",
    "FieldError",
    "FormatError",
    "GridError",
    "GuardError",
    "INF",
    "MixedExponents",
    "MnnsError",
    "NormValue",
    "ScalarField",
    "SolverConfig",
    "SpectralField",
    "TailMassError",
    "TensorGrid",
    "Trajectory",
    "UnderResolvedError",
    "VectorField",
    "aggregate_norm",
    "bilinear_probe",
    "continuity_at_zero",
    "convolve",
    "duhamel_bilinear",
    "gaussian_kernel_eval",
    "heat_evolve",
    "heat_evolve_derivative",
    "heat_propagate",
    "kernel_1d_norm",
    "leray_project",
    "load_trajectory",
    "local_solve",
    "measure_decay",
    "mixed_holder_ratio",
    "mixed_norm",
    "nonlinear_term",
    "picard_solve",
    "plain_lp_norm",
    "pressure_from_velocity",
    "pressure_poisson_reference",
    "random_band_limited",
    "read_components",
    "read_field",
    "reciprocal",
    "riesz_boundedness_probe",
    "riesz_transform",
    "save_trajectory",
    "scaling_ratio",
    "spectral_divergence",
    "spectral_gradient",
    "time_mesh",
    "timestep_oracle",
    "vector_gradient",
    "vector_norm",
    "wavenumbers",
    "write_components",
    "write_field",
    "xspace_norm",
    "y_shape_constant",
    "yspace_norm",
]
