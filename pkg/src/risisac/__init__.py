"""Joint BS/RIS beamforming for RIS-assisted integrated sensing and communication."""

from .fp import FpAuxiliaries, fp_objective, optimal_auxiliaries, reduced_objective, update_c, update_g
from .metrics import (
    BeampatternReport,
    beampattern_mse,
    composite_channels,
    optimal_alpha,
    sinr,
    sinrs,
    sum_rate,
    transmit_beampattern,
)
from .optimizer import (
    SolveReport,
    baseline_com_only,
    baseline_no_ris,
    baseline_random_ris,
    bcd_solve,
    phase_rng,
    random_phases,
)
from .phasesolver import PhaseQuadratic, RcgOptions, build_phase_quadratic, rcg_minimize
from .scenario import (
    ChannelSet,
    ConfigError,
    DomainError,
    SystemConfig,
    generate_channels,
    ideal_beampattern,
    steering_vector,
    trial_rng,
)
from .wsolver import (
    InfeasibleSubproblem,
    MmSurrogate,
    MseQuadratic,
    build_mse_quadratic,
    build_surrogate,
    radar_only_design,
    solve_w_subproblem,
)

__version__ = "0.1.0"
