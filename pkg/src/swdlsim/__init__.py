"""Simulation and closed-form analysis of switched delay-line circulators."""
from .analytic import (
    SATURATED_DB,
    PassbandSpec,
    Port,
    Shape,
    TonePlan,
    deviation_il,
    deviation_isolation,
    ideal_smatrix,
    il_curve,
    il_filtering,
    modulated_tone_level,
    switch_time_effects,
)
from .bounce import BounceTrace, Segment, bounce_trace
from .components import (
    DelayLineModel,
    MatchingNetwork,
    Ramp,
    SwitchModel,
    Variant,
    cascade,
    frequency_response,
    impulse_response,
    match_two_port,
    switch_impedance,
)
from .engine import (
    CirculatorConfig,
    SimulationError,
    SimulationResult,
    ToneSpectrum,
    deviation_config,
    extract_spectrum,
    extract_sparams,
    group_delay,
    ideal_config,
    reference_config,
    simulate_tone,
    snap_frequency,
    sparam_summary,
    switch_module_testbench,
)
from .signals import ControlWaveform, FourierSeries, Kind, SeriesKind, control_value, fourier_coefficient, sample_waveform
from .touchstone import TwoPortData, read_s2p, write_s2p

__version__ = "0.1.0"
