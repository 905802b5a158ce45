"""Discrete isothermal processes (DIPs) with ideal full thermalisation.

A DIP alternates instantaneous quenches of the level energies with dwells
in contact with one bath.  Here every dwell ends exactly in the Gibbs state
of the current levels.  The heat/entropy bookkeeping in :func:`run_dip_exact`
is exact; the closed forms (:func:`s_ir_analytic_general`,
:func:`s_ir_speed_form`, :func:`two_level_s_ir`) are the first non-vanishing
order of the high-temperature expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    BathSpec,
    ControlFunction,
    EnergyLevelSchedule,
    ThermalState,
    gibbs_matrix,
    gibbs_populations,
    shannon_entropy,
    warn_if_not_high_temperature,
)


class DegenerateScheduleError(ValueError):
    """The mean level shift is zero, so the speed-fluctuation factor is undefined.

    ``s_ir`` still carries the (well-defined) second-order entropy generation.
    """

    def __init__(self, message: str, s_ir: float):
        super().__init__(message)
        self.s_ir = s_ir


@dataclass(frozen=True)
class SpeedForm:
    s_ir: float
    theta: float
    xi: float
    v_bar_mean: float
    v_sq_mean: float
    v_bar_sq_mean: float


@dataclass(frozen=True, eq=False)
class DipResult:
    delta_Q: float
    delta_S: float
    s_ir: float
    theta: float
    xi: float
    v_bar_mean: float
    v_sq_mean: float
    v_bar_sq_mean: float
    energies: np.ndarray
    populations: np.ndarray

    @property
    def N(self) -> int:
        return self.energies.shape[1] - 1

    @property
    def trajectory(self) -> list[tuple[np.ndarray, ThermalState]]:
        """(level energies, state) after each step, j = 0..N."""
        return [
            (self.energies[:, j], ThermalState(self.populations[:, j]))
            for j in range(self.energies.shape[1])
        ]

    @property
    def final_state(self) -> ThermalState:
        return ThermalState(self.populations[:, -1])

    def scalars(self) -> dict[str, float]:
        return {
            "delta_Q": self.delta_Q,
            "delta_S": self.delta_S,
            "s_ir": self.s_ir,
            "theta": self.theta,
            "xi": self.xi,
            "v_bar_mean": self.v_bar_mean,
            "v_sq_mean": self.v_sq_mean,
            "v_bar_sq_mean": self.v_bar_sq_mean,
        }


def _variance_sum(eps: np.ndarray) -> float:
    M = eps.shape[0]
    return float(np.sum(np.sum(eps**2, axis=0) - np.sum(eps, axis=0) ** 2 / M))


def _speed_form(schedule: EnergyLevelSchedule, beta: float) -> SpeedForm:
    v = schedule.eps / schedule.tau
    v_bar = v.mean(axis=0)
    v_bar_mean = float(v_bar.mean())
    v_sq_mean = float(np.mean(np.mean(v**2, axis=0)))
    v_bar_sq_mean = float(np.mean(v_bar**2))
    theta = beta**2 * schedule.delta_bar**2 / 2
    if schedule.delta_bar == 0 or v_bar_mean == 0:
        s_ir = beta**2 / (2 * schedule.M) * _variance_sum(schedule.eps)
        raise DegenerateScheduleError("mean level shift is zero; xi is undefined", s_ir)
    xi = (v_sq_mean - v_bar_sq_mean) / v_bar_mean**2
    return SpeedForm(
        s_ir=theta * xi / schedule.N,
        theta=theta,
        xi=xi,
        v_bar_mean=v_bar_mean,
        v_sq_mean=v_sq_mean,
        v_bar_sq_mean=v_bar_sq_mean,
    )


def _moments_or_nan(schedule: EnergyLevelSchedule, beta: float) -> SpeedForm:
    try:
        return _speed_form(schedule, beta)
    except DegenerateScheduleError as exc:
        v = schedule.eps / schedule.tau
        return SpeedForm(
            s_ir=exc.s_ir,
            theta=0.0,
            xi=math.nan,
            v_bar_mean=float(v.mean()),
            v_sq_mean=float(np.mean(v**2)),
            v_bar_sq_mean=float(np.mean(v.mean(axis=0) ** 2)),
        )


def assemble_result(
    schedule: EnergyLevelSchedule, bath: BathSpec, populations: np.ndarray
) -> DipResult:
    """Heat and entropy bookkeeping for a population history ``populations[m, j]``.

    Heat enters only during dwells: dQ_j = sum_m E_m^(j) (p_m^(j) - p_m^(j-1)).
    """
    E = schedule.energies
    dp = np.diff(populations, axis=1)
    delta_Q = float(np.sum(E[:, 1:] * dp))
    delta_S = shannon_entropy(populations[:, -1]) - shannon_entropy(populations[:, 0])
    sf = _moments_or_nan(schedule, bath.beta)
    return DipResult(
        delta_Q=delta_Q,
        delta_S=delta_S,
        s_ir=delta_S - bath.beta * delta_Q,
        theta=sf.theta,
        xi=sf.xi,
        v_bar_mean=sf.v_bar_mean,
        v_sq_mean=sf.v_sq_mean,
        v_bar_sq_mean=sf.v_bar_sq_mean,
        energies=E,
        populations=populations,
    )


def run_dip_exact(
    schedule: EnergyLevelSchedule,
    bath: BathSpec,
    p_init: ThermalState | None = None,
) -> DipResult:
    """Run a DIP in which every dwell thermalises completely.

    ``p_init`` defaults to the Gibbs state of the initial levels.
    """
    if p_init is None:
        p_init = gibbs_populations(schedule.column(0), bath.beta)
    if p_init.M != schedule.M:
        raise ValueError(f"initial state has {p_init.M} levels, schedule has {schedule.M}")
    pops = gibbs_matrix(schedule.energies, bath.beta)
    pops[:, 0] = p_init.p
    pops.setflags(write=False)
    return assemble_result(schedule, bath, pops)


def s_ir_analytic_general(schedule: EnergyLevelSchedule, bath: BathSpec) -> float:
    """Second-order entropy generation (beta^2/2M) sum_j Var-like term over levels."""
    warn_if_not_high_temperature(schedule.max_beta_e(bath.beta), "s_ir_analytic_general")
    beta = bath.beta
    return beta**2 / (2 * schedule.M) * _variance_sum(schedule.eps)


def s_ir_speed_form(schedule: EnergyLevelSchedule, bath: BathSpec) -> SpeedForm:
    """Entropy generation written as theta*xi/N through tuning-speed moments.

    Raises :class:`DegenerateScheduleError` when the mean level shift is zero.
    """
    warn_if_not_high_temperature(schedule.max_beta_e(bath.beta), "s_ir_speed_form")
    return _speed_form(schedule, bath.beta)


def two_level_s_ir(schedule: EnergyLevelSchedule, bath: BathSpec) -> float:
    if schedule.M != 2:
        raise ValueError(f"two_level_s_ir needs M = 2, got M = {schedule.M}")
    if np.any(schedule.eps[0] != 0):
        raise ValueError("two_level_s_ir needs a fixed ground level")
    warn_if_not_high_temperature(schedule.max_beta_e(bath.beta), "two_level_s_ir")
    v = schedule.eps[1] / schedule.tau
    mean_v = v.mean()
    if mean_v == 0:
        raise DegenerateScheduleError("excited level does not move on average", 0.0)
    delta = schedule.delta[1]
    return bath.beta**2 * delta**2 / (8 * schedule.N) * float(np.mean(v**2)) / mean_v**2


def xi_closed_form(control: ControlFunction, delta: float) -> float:
    """Large-N speed-fluctuation factor of a two-level control family."""
    if control.family == "power":
        n = control.n
        if n <= 0.5:
            raise ValueError(f"power-law xi is finite only for n > 1/2, got n = {n}")
        return n * n / (2 * n - 1)
    if delta == 0:
        raise ValueError("delta must be nonzero")
    if control.family == "exponential":
        x = delta / control.b
        if x <= -1:
            raise ValueError(f"exponential control needs delta/b > -1, got {x}")
        return (0.5 + 1.0 / x) * math.log1p(x)
    if control.family == "logarithmic":
        x = delta / (2 * control.a)
        return math.sinh(x) ** 2 / x**2
    raise ValueError(f"no closed form for the {control.family} family")
