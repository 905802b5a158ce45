"""Two-level relaxation during isochoric dwells.

The excited population obeys

    dp/dt = -gamma (2 n_th + 1) p + gamma n_th,   n_th = 1/(exp(beta E) - 1),

whose coefficients are constant while the levels are held fixed, so each
dwell is propagated with the closed-form exponential solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dip import DipResult, assemble_result
from .model import (
    BathSpec,
    EnergyLevelSchedule,
    gibbs_populations,
    warn_if_not_high_temperature,
)


@dataclass(frozen=True)
class RelaxationStep:
    """Relaxation constants of a two-level system with splitting ``E``."""

    E: float
    beta: float
    gamma: float
    n_th: float
    rate: float
    p_star: float

    @classmethod
    def at(cls, E: float, bath: BathSpec) -> RelaxationStep:
        if not E > 0:
            raise ValueError(f"level splitting must be positive, got E = {E}")
        n_th = 1.0 / math.expm1(bath.beta * E)
        return cls(
            E=float(E),
            beta=bath.beta,
            gamma=bath.gamma,
            n_th=n_th,
            rate=bath.gamma * (2 * n_th + 1),
            p_star=n_th / (1 + 2 * n_th),
        )


class Residual(NamedTuple):
    exact: float
    high_temperature: float


def propagate_dwell(step: RelaxationStep, p0: float, t: float) -> float:
    """Excited population after dwelling for time ``t`` from ``p0``."""
    if not 0.0 <= p0 <= 1.0:
        raise ValueError(f"population must lie in [0, 1], got {p0}")
    if t < 0:
        raise ValueError(f"dwell time must be non-negative, got {t}")
    decay = math.exp(-step.rate * t)
    return step.p_star * (1 - decay) + decay * p0


def thermalization_residual(step: RelaxationStep, p0: float, t: float) -> Residual:
    """Remaining distance to equilibrium after ``t``, relative to the start.

    ``exact`` is measured from the propagated population; ``high_temperature``
    is the beta*E << 1 estimate exp(-2 gamma t/(beta E)).  Both are 0 when the
    dwell already starts at equilibrium.
    """
    if p0 == step.p_star:
        return Residual(0.0, 0.0)
    p = propagate_dwell(step, p0, t)
    exact = abs(p - step.p_star) / abs(p0 - step.p_star)
    approx = math.exp(-2 * step.gamma * t / (step.beta * step.E))
    return Residual(exact, approx)


def default_step_time(bath: BathSpec, E0: float) -> float:
    """Step time beta*E0/gamma, i.e. two high-temperature relaxation times."""
    warn_if_not_high_temperature(bath.beta * abs(E0), "default_step_time")
    return bath.beta * E0 / bath.gamma


def run_dip_dynamics(
    schedule: EnergyLevelSchedule,
    bath: BathSpec,
    p_init: float | None = None,
) -> DipResult:
    """Run a two-level DIP with finite-time relaxation in every dwell.

    Quenches leave the population unchanged; each dwell lasts ``schedule.tau``.
    ``p_init`` is the excited population before the first quench and defaults
    to the Gibbs value at the initial splitting.
    """
    if schedule.M != 2:
        raise ValueError(f"master-equation dynamics is defined for two levels only, got M = {schedule.M}")
    if np.any(schedule.energies[0] != 0):
        raise ValueError("run_dip_dynamics needs the ground level fixed at 0")
    E = schedule.energies[1]
    if p_init is None:
        p_init = gibbs_populations(schedule.column(0), bath.beta).excited
    p = np.empty(schedule.N + 1)
    p[0] = p_init
    for j in range(1, schedule.N + 1):
        p[j] = propagate_dwell(RelaxationStep.at(E[j], bath), p[j - 1], schedule.tau)
    pops = np.vstack([1.0 - p, p])
    pops.setflags(write=False)
    return assemble_result(schedule, bath, pops)

