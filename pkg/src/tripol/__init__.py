"""Numerical model of tripartite polarization entanglement between bright optical beams."""

from .circuit import compile_circuit, format_circuit, ghz_preset, ghz_specs, parse_circuit
from .criteria import (
    CriteriaResult,
    GainVector,
    closed_form_I,
    evaluate_criteria,
    genuine_bound_check,
    optimal_gain_numeric,
    optimal_gains_closed_form,
)
from .fit import FitResult, fit_parameters
from .gaussian import (
    Axis,
    GaussianState,
    SqueezerSpec,
    SymplecticTransform,
    apply_transform,
    beamsplitter_transform,
    linear_form_variance,
    loss_channel,
    set_dopa_output,
    vacuum_state,
)
from .montecarlo import mc_criteria, sample_quadratures, validate_linearization
from .polarization import BrightBeam, FormMode, StokesIndex, snl_denominator, stokes_fluctuation_form, stokes_means

__version__ = "0.1.0"
