"""Experiment drivers turning a :class:`RunConfig` into flat result rows."""

from __future__ import annotations

import logging
import math
from typing import Callable, Iterable

from .config import RunConfig
from .cycle import CycleSpec, EngineReport, simulate_cycle, steps_for_time
from .dip import DipResult, run_dip_exact, s_ir_analytic_general
from .dynamics import run_dip_dynamics
from .io import Row
from .model import ControlFunction

log = logging.getLogger(__name__)

DIP_COLUMNS = [
    "control", "n", "M", "N", "tau", "t_f", "beta", "gamma", "delta_bar", "mode",
    "delta_Q", "delta_S", "s_ir", "s_ir_analytic", "theta", "xi",
    "v_bar_mean", "v_sq_mean", "v_bar_sq_mean", "error",
]

SWEEP_N_COLUMNS = [
    "control", "n", "N", "t_f", "beta", "mode",
    "s_ir_numeric", "s_ir_analytic", "s_ir_times_N", "theta", "xi", "error",
]

CYCLE_COLUMNS = [
    "eta_C", "n_H", "n_C", "gamma_ratio", "sigma_H", "sigma_C", "t_H", "t_C",
    "Q_H", "Q_C", "W", "P", "eta", "eta_emp", "eta_plus", "eta_ca", "P_max", "mode",
    "T_H", "T_C", "control_H", "control_C", "N_H", "N_C", "tau_H", "tau_C",
    "delta_S", "xi_H", "xi_C", "s_ir_H", "s_ir_C", "t_H_opt", "t_C_opt",
    "closure_defect", "error",
]

COLUMNS = {
    "dip": DIP_COLUMNS,
    "sweep-n": SWEEP_N_COLUMNS,
    "cycle": CYCLE_COLUMNS,
    "sweep-nh": CYCLE_COLUMNS,
    "emp-curve": CYCLE_COLUMNS,
}


def _shape_param(ctrl: ControlFunction) -> float:
    return float(ctrl.n) if ctrl.family == "power" else math.nan


def _row(columns: list[str], values: dict) -> Row:
    return {c: values.get(c, math.nan) for c in columns}


def _run_dip(cfg: RunConfig, N: int | None = None, n: float | None = None) -> tuple[DipResult, dict]:
    schedule = cfg.dip_schedule(N=N, n=n)
    bath = cfg.bath()
    if cfg.mode == "dynamics":
        result = run_dip_dynamics(schedule, bath)
    else:
        result = run_dip_exact(schedule, bath)
    ctrl = cfg.dip_control(n)
    inputs = {
        "control": ctrl.family,
        "n": _shape_param(ctrl),
        "M": schedule.M,
        "N": schedule.N,
        "tau": schedule.tau,
        "t_f": schedule.t_f,
        "beta": bath.beta,
        "gamma": bath.gamma,
        "delta_bar": schedule.delta_bar,
        "mode": cfg.mode,
        "s_ir_analytic": s_ir_analytic_general(schedule, bath),
    }
    return result, inputs


def _cycle_values(spec: CycleSpec, report: EngineReport) -> dict:
    values = report.scalars()
    values.update(
        n_H=_shape_param(spec.control_H),
        n_C=_shape_param(spec.control_C),
        gamma_ratio=spec.gamma_ratio,
        T_H=spec.T_H,
        T_C=spec.T_C,
        control_H=spec.control_H.family,
        control_C=spec.control_C.family,
        N_H=int(spec.N_H),
        N_C=int(spec.N_C),
        error="",
    )
    return values


def emp_point(cfg: RunConfig, eta_C: float, n_H: float | None) -> dict:
    """One point of an EMP curve.

    Dissipation coefficients are measured on a reference cycle with the
    configured step counts; the cycle is then re-run with the step counts
    closest to the optimal branch durations, and that run supplies the
    simulated efficiency and power.
    """
    T_C = cfg.hot_bath().T * (1 - eta_C)
    ref_spec = cfg.cycle_spec(n_H=n_H, T_C=T_C)
    ref = simulate_cycle(ref_spec, cfg.mode)
    N_H = steps_for_time(ref.t_H_opt, ref.tau_H)
    N_C = steps_for_time(ref.t_C_opt, ref.tau_C)
    at_opt = simulate_cycle(cfg.cycle_spec(n_H=n_H, T_C=T_C, N_H=N_H, N_C=N_C), cfg.mode)
    values = _cycle_values(ref_spec, ref)
    for key in ("t_H", "t_C", "Q_H", "Q_C", "W", "P", "eta", "closure_defect"):
        values[key] = getattr(at_opt, key)
    values.update(N_H=N_H, N_C=N_C)
    return values


def _plan(cfg: RunConfig) -> Iterable[tuple[dict, Callable[[], dict]]]:
    """Yield (input columns, thunk computing the full row) in grid order."""
    if cfg.kind == "dip":
        def dip():
            result, inputs = _run_dip(cfg)
            return {**inputs, **result.scalars(), "error": ""}

        yield {"mode": cfg.mode, "N": cfg.N}, dip
    elif cfg.kind == "sweep-n":
        series = cfg.n_values if cfg.n_values is not None else (None,)
        for n in series:
            for N in cfg.N_values:
                def point(n=n, N=N):
                    result, inputs = _run_dip(cfg, N=N, n=n)
                    return {
                        **inputs,
                        "s_ir_numeric": result.s_ir,
                        "s_ir_times_N": result.s_ir * N,
                        "theta": result.theta,
                        "xi": result.xi,
                        "error": "",
                    }

                yield {"n": n if n is not None else math.nan, "N": N, "mode": cfg.mode}, point
    elif cfg.kind in ("cycle", "sweep-nh"):
        series = cfg.n_H_values if cfg.kind == "sweep-nh" else (None,)
        for n_H in series:
            def run(n_H=n_H):
                spec = cfg.cycle_spec(n_H=n_H)
                return _cycle_values(spec, simulate_cycle(spec, cfg.mode))

            yield {"n_H": n_H if n_H is not None else math.nan, "mode": cfg.mode}, run
    elif cfg.kind == "emp-curve":
        series = cfg.n_H_values if cfg.n_H_values is not None else (None,)
        for n_H in series:
            for eta_C in cfg.eta_C_values:
                yield (
                    {"eta_C": eta_C, "n_H": n_H if n_H is not None else math.nan, "mode": cfg.mode},
                    lambda n_H=n_H, eta_C=eta_C: emp_point(cfg, eta_C, n_H),
                )
    else:
        raise ValueError(f"unknown experiment kind {cfg.kind!r}")


def run_experiment(cfg: RunConfig) -> list[Row]:
    """Run every grid point of ``cfg`` and return rows in grid order.

    With ``on_error = "collect-errors"`` a failing point yields a row holding
    its inputs, NaN outputs and the error message; otherwise the error is
    raised.
    """
    columns = COLUMNS[cfg.kind]
    rows = []
    for inputs, thunk in _plan(cfg):
        try:
            values = thunk()
        except (ValueError, ArithmeticError) as exc:
            if cfg.on_error == "fail-fast":
                raise
            log.warning("grid point %s failed: %s", inputs, exc)
            values = {**inputs, "error": f"{type(exc).__name__}: {exc}"}
        rows.append(_row(columns, values))
    return rows
