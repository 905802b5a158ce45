"""Stepwise Carnot-like heat engines built from discrete isothermal processes."""

from .cycle import (
    CycleSpec,
    EngineReport,
    adiabat_endpoints,
    dissipation_coefficient,
    emp_full,
    emp_powerlaw,
    max_power,
    optimal_times,
    simulate_cycle,
)
from .dip import (
    DegenerateScheduleError,
    DipResult,
    run_dip_exact,
    s_ir_analytic_general,
    s_ir_speed_form,
    two_level_s_ir,
    xi_closed_form,
)
from .dynamics import (
    RelaxationStep,
    default_step_time,
    propagate_dwell,
    run_dip_dynamics,
    thermalization_residual,
)
from .model import (
    BathSpec,
    ControlFunction,
    EnergyLevelSchedule,
    HighTemperatureWarning,
    LevelCrossingError,
    ThermalState,
    build_schedule,
    gibbs_populations,
    shannon_entropy,
)

__version__ = "0.1.0"
