"""Stepwise Carnot-like engine built from two DIPs and two sudden adiabats.

Cycle A -> B (hot DIP, excited level lowered from E_H0 to E_HN),
B -> C (adiabat), C -> D (cold DIP), D -> A (adiabat).  Populations are
frozen across the adiabats, which fixes the cold-branch endpoints.

Dissipation coefficients Sigma_alpha = xi_alpha * Theta_alpha * tau_alpha
feed the low-dissipation formulas for power, optimal branch durations and
efficiency at maximum power (EMP).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dip import DipResult, run_dip_exact
from .dynamics import run_dip_dynamics
from .model import (
    BathSpec,
    ControlFunction,
    EnergyLevelSchedule,
    gibbs_populations,
    shannon_entropy,
    two_level_schedule,
)

MODES = ("exact", "dynamics")


def eta_carnot(T_H: float, T_C: float) -> float:
    return 1.0 - T_C / T_H


def eta_curzon_ahlborn(eta_C: float) -> float:
    return 1.0 - math.sqrt(1.0 - eta_C)


def eta_upper(eta_C: float) -> float:
    """Upper bound eta_C/(2 - eta_C) of the EMP."""
    return eta_C / (2.0 - eta_C)


def cold_endpoints(E_H0: float, E_HN: float, beta_H: float, beta_C: float) -> tuple[float, float]:
    """Cold-branch (start, end) energies that keep populations continuous.

    B -> C requires beta_C E_C_start = beta_H E_HN and D -> A requires
    beta_C E_C_end = beta_H E_H0.
    """
    return E_HN * beta_H / beta_C, E_H0 * beta_H / beta_C


@dataclass(frozen=True)
class CycleSpec:
    """Two-level engine between a hot and a cold bath.

    ``tau_H``/``tau_C`` left as ``None`` select the automatic step time
    beta_alpha * E_alpha^max / gamma_alpha, where E_alpha^max is the larger
    excited-level energy of the branch.
    """

    hot: BathSpec
    cold: BathSpec
    E_H0: float
    E_HN: float
    N_H: int
    N_C: int
    control_H: ControlFunction = field(default_factory=ControlFunction.linear)
    control_C: ControlFunction = field(default_factory=ControlFunction.linear)
    tau_H: float | None = None
    tau_C: float | None = None

    def __post_init__(self):
        if not self.hot.T > self.cold.T:
            raise ValueError(f"need T_H > T_C, got T_H = {self.hot.T}, T_C = {self.cold.T}")
        if not self.E_H0 > self.E_HN > 0:
            raise ValueError(
                f"hot branch must lower the excited level: need E_H0 > E_HN > 0, "
                f"got {self.E_H0} -> {self.E_HN}"
            )
        for name in ("N_H", "N_C"):
            n = getattr(self, name)
            if int(n) != n or n < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {n}")
        for name in ("tau_H", "tau_C"):
            t = getattr(self, name)
            if t is not None and not t > 0:
                raise ValueError(f"{name} must be positive, got {t}")

    @property
    def T_H(self) -> float:
        return self.hot.T

    @property
    def T_C(self) -> float:
        return self.cold.T

    @property
    def eta_C(self) -> float:
        return eta_carnot(self.T_H, self.T_C)

    @property
    def gamma_ratio(self) -> float:
        return self.hot.gamma / self.cold.gamma

    def cold_endpoints(self) -> tuple[float, float]:
        return adiabat_endpoints(self)

    def step_times(self) -> tuple[float, float]:
        E_C0, E_CN = self.cold_endpoints()
        tau_H = self.tau_H
        if tau_H is None:
            tau_H = self.hot.beta * max(self.E_H0, self.E_HN) / self.hot.gamma
        tau_C = self.tau_C
        if tau_C is None:
            tau_C = self.cold.beta * max(E_C0, E_CN) / self.cold.gamma
        return tau_H, tau_C

    def schedules(self) -> tuple[EnergyLevelSchedule, EnergyLevelSchedule]:
        tau_H, tau_C = self.step_times()
        E_C0, E_CN = self.cold_endpoints()
        hot = two_level_schedule(self.E_H0, self.E_HN, self.control_H, int(self.N_H), tau_H)
        cold = two_level_schedule(E_C0, E_CN, self.control_C, int(self.N_C), tau_C)
        return hot, cold

    def reversible_entropy_change(self) -> float:
        """Entropy absorbed along the quasi-static hot isotherm, S(B) - S(A)."""
        b = self.hot.beta
        return shannon_entropy(gibbs_populations([0.0, self.E_HN], b)) - shannon_entropy(
            gibbs_populations([0.0, self.E_H0], b)
        )


def adiabat_endpoints(spec: CycleSpec) -> tuple[float, float]:
    return cold_endpoints(spec.E_H0, spec.E_HN, spec.hot.beta, spec.cold.beta)


def dissipation_coefficient(branch: DipResult, tau: float) -> float:
    """Sigma = xi * Theta * tau, so that S_ir of the branch is Sigma / t."""
    return branch.xi * branch.theta * tau


def two_level_theta(beta: float, delta: float) -> float:
    """Theta for a two-level DIP with fixed ground level (mean shift delta/2)."""
    return beta**2 * delta**2 / 8


def emp_full(sigma_H: float, sigma_C: float, T_H: float, T_C: float) -> float:
    """Efficiency at maximum power of the low-dissipation engine."""
    eta_C = eta_carnot(T_H, T_C)
    ratio = sigma_C / sigma_H
    s = math.sqrt(T_C * ratio / T_H)
    return eta_C * (1 + s) / ((1 + s) ** 2 + (T_C / T_H) * (1 - ratio))


def emp_powerlaw(n_H: float, eta_C: float) -> tuple[float, float]:
    """EMP for a power-law hot control with exponent n_H and a linear cold one.

    Returns (exact, approx); both assume xi_H ~ n_H/2 and equal couplings.
    """
    if not 0 < eta_C < 1:
        raise ValueError(f"eta_C must lie in (0, 1), got {eta_C}")
    r = math.sqrt(2 * (1 - eta_C) / n_H)
    exact = eta_C * (1 + r) / (2 - eta_C + 2 * r)
    ep = eta_upper(eta_C)
    return exact, ep * (1 - ep * r)


def optimal_times(
    sigma_H: float, sigma_C: float, T_H: float, T_C: float, delta_S: float
) -> tuple[float, float]:
    """Branch durations (t_H, t_C) that maximise low-dissipation power."""
    if not delta_S > 0:
        raise ValueError(f"delta_S must be positive, got {delta_S}")
    eta_C = eta_carnot(T_H, T_C)
    s = math.sqrt(T_C * sigma_C / (T_H * sigma_H))
    t_H = 2 * sigma_H * (1 + s) / (eta_C * delta_S)
    return t_H, t_H * s


def max_power(sigma_H: float, sigma_C: float, T_H: float, T_C: float, delta_S: float) -> float:
    eta_C = eta_carnot(T_H, T_C)
    return (eta_C * T_H * delta_S) ** 2 / (
        4 * (math.sqrt(T_H * sigma_H) + math.sqrt(T_C * sigma_C)) ** 2
    )


def low_dissipation_power(
    t_H: float, t_C: float, sigma_H: float, sigma_C: float, T_H: float, T_C: float, delta_S: float
) -> float:
    work = (T_H - T_C) * delta_S - T_H * sigma_H / t_H - T_C * sigma_C / t_C
    return work / (t_H + t_C)


def low_dissipation_efficiency(
    t_H: float, t_C: float, sigma_H: float, sigma_C: float, T_H: float, T_C: float, delta_S: float
) -> float:
    q_H = T_H * (delta_S - sigma_H / t_H)
    q_C = T_C * (delta_S + sigma_C / t_C)
    return 1 - q_C / q_H


def max_power_invariant(
    xi_H: float, xi_C: float, unit_H: float, unit_C: float, T_H: float, T_C: float
) -> float:
    """xi_C^-1 (1 + sqrt(T_H Sigma_H / T_C Sigma_C))^-2 with Sigma = xi * unit.

    ``unit_alpha`` is Theta_alpha * tau_alpha.  P_max is proportional to this
    quantity at fixed endpoints, temperatures and couplings.
    """
    return 1.0 / (xi_C * (1 + math.sqrt(T_H * xi_H * unit_H / (T_C * xi_C * unit_C))) ** 2)


def rescale_at_fixed_max_power(
    xi_H: float,
    xi_C: float,
    unit_H: float,
    unit_C: float,
    T_H: float,
    T_C: float,
    new_ratio: float,
) -> tuple[float, float]:
    """Control factors (xi_H', xi_C') with xi_H'/xi_C' = new_ratio and unchanged P_max."""
    K = max_power_invariant(xi_H, xi_C, unit_H, unit_C, T_H, T_C)
    xi_C_new = 1.0 / (K * (1 + math.sqrt(T_H * new_ratio * unit_H / (T_C * unit_C))) ** 2)
    return new_ratio * xi_C_new, xi_C_new


@dataclass(frozen=True, eq=False)
class EngineReport:
    W: float
    Q_H: float
    Q_C: float
    P: float
    eta: float
    t_H: float
    t_C: float
    sigma_H: float
    sigma_C: float
    eta_emp: float
    eta_plus: float
    eta_ca: float
    P_max: float
    delta_S: float
    eta_C: float
    tau_H: float
    tau_C: float
    xi_H: float
    xi_C: float
    s_ir_H: float
    s_ir_C: float
    t_H_opt: float
    t_C_opt: float
    closure_defect: float
    mode: str
    hot: DipResult = field(repr=False)
    cold: DipResult = field(repr=False)

    def scalars(self) -> dict[str, float]:
        return {
            k: getattr(self, k)
            for k in self.__dataclass_fields__
            if k not in ("hot", "cold")
        }


def simulate_cycle(spec: CycleSpec, mode: str = "exact") -> EngineReport:
    """Run one engine cycle starting from equilibrium at point A."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    hot_sched, cold_sched = spec.schedules()
    tau_H, tau_C = hot_sched.tau, cold_sched.tau
    p_A = gibbs_populations(hot_sched.column(0), spec.hot.beta)
    if mode == "exact":
        hot = run_dip_exact(hot_sched, spec.hot, p_A)
        cold = run_dip_exact(cold_sched, spec.cold, hot.final_state)
    else:
        hot = run_dip_dynamics(hot_sched, spec.hot, p_A.excited)
        cold = run_dip_dynamics(cold_sched, spec.cold, hot.final_state.excited)

    Q_H = hot.delta_Q
    Q_C = -cold.delta_Q
    W = Q_H - Q_C
    t_H = spec.N_H * tau_H
    t_C = spec.N_C * tau_C
    sigma_H = dissipation_coefficient(hot, tau_H)
    sigma_C = dissipation_coefficient(cold, tau_C)
    delta_S = spec.reversible_entropy_change()
    T_H, T_C = spec.T_H, spec.T_C
    t_H_opt, t_C_opt = optimal_times(sigma_H, sigma_C, T_H, T_C, delta_S)
    return EngineReport(
        W=W,
        Q_H=Q_H,
        Q_C=Q_C,
        P=W / (t_H + t_C),
        eta=1 - Q_C / Q_H,
        t_H=t_H,
        t_C=t_C,
        sigma_H=sigma_H,
        sigma_C=sigma_C,
        eta_emp=emp_full(sigma_H, sigma_C, T_H, T_C),
        eta_plus=eta_upper(spec.eta_C),
        eta_ca=eta_curzon_ahlborn(spec.eta_C),
        P_max=max_power(sigma_H, sigma_C, T_H, T_C, delta_S),
        delta_S=delta_S,
        eta_C=spec.eta_C,
        tau_H=tau_H,
        tau_C=tau_C,
        xi_H=hot.xi,
        xi_C=cold.xi,
        s_ir_H=hot.s_ir,
        s_ir_C=cold.s_ir,
        t_H_opt=t_H_opt,
        t_C_opt=t_C_opt,
        closure_defect=float(abs(cold.populations[1, -1] - p_A.excited)),
        mode=mode,
        hot=hot,
        cold=cold,
    )


def steps_for_time(t: float, tau: float) -> int:
    """Nearest whole number of steps (at least one) lasting ``t`` in total."""
    return max(1, int(np.rint(t / tau)))
