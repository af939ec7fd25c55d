"""Decoy-state key-rate analysis for twin-field QKD with exclusive-click detection."""

from .analysis import analyze_experiment, assignment_table
from .channel_model import (
    ChannelParams,
    plob_bound,
    plob_bound_db,
    simulate_gains,
    simulate_rate,
    simulate_x_stats,
    sweep_curve,
)
from .dataio import ExperimentRecord, KeyRateReport, load_experiment, load_fixture
from .decoy_bounds import (
    DegenerateIntensityError,
    GainsTable,
    IntensityOrderError,
    IntensityTriple,
    Outcome,
    YieldBounds,
    y00_upper,
    y02_upper,
    y11_upper,
    y20_upper,
    yield_bounds,
)
from .fluctuation import FluctuationBox, FluctuationConfig, IntensityInterval, extremize_rate
from .key_rate import (
    ProtocolParams,
    XBasisStats,
    binary_entropy,
    click_probability,
    phase_error_upper,
    qber,
    rate_per_detector,
    total_rate,
)
from .pipeline import evaluate_outcome, evaluate_rates

__version__ = "0.1.0"
