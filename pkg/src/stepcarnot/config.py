"""Run configuration: a flat TOML document, validated into :class:`RunConfig`.

Every key is optional; unset keys take the defaults below.  Unknown keys are
rejected.  Keys by group:

general
    kind        dip | cycle | sweep-n | sweep-nh | emp-curve
    mode        exact | dynamics
    format      csv | json
    out         output path (stdout when unset)
    seed        integer seed, recorded for reproducibility
    on_error    fail-fast | collect-errors

single DIP (dip, sweep-n)
    T or beta, gamma, E0, EN (numbers for a two-level system with the ground
    level at 0, or equal-length lists for M levels), N, tau (number or
    "auto"), control (power | exponential | logarithmic | tabulated), n, a,
    b, values

cycle (cycle, sweep-nh, emp-curve)
    T_H or beta_H, T_C or beta_C, gamma_H, gamma_C, E_H0, E_HN, N_H, N_C,
    tau_H, tau_C (number or "auto"), control_H, n_H, a_H, b_H, values_H and
    the same five control keys with suffix _C

sweeps
    N_values (sweep-n), n_values (sweep-n, power-law exponents),
    n_H_values (sweep-nh, emp-curve), eta_C_values (emp-curve)
"""

from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .cycle import CycleSpec
from .dynamics import default_step_time
from .model import BathSpec, ControlFunction, build_schedule

KINDS = ("dip", "cycle", "sweep-n", "sweep-nh", "emp-curve")
FORMATS = ("csv", "json")
ERROR_POLICIES = ("fail-fast", "collect-errors")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    kind: str = "dip"
    mode: str = "exact"
    format: str = "csv"
    out: str | None = None
    seed: int = 0
    on_error: str = "fail-fast"

    T: float | None = None
    beta: float | None = None
    gamma: float = 1.0
    E0: float | tuple[float, ...] = 10.0
    EN: float | tuple[float, ...] = 6.0
    N: int = 20
    tau: float | None = 1.0
    control: str = "power"
    n: float | None = 1.0
    a: float | None = None
    b: float | None = None
    values: tuple[float, ...] | None = None

    T_H: float | None = None
    beta_H: float | None = None
    T_C: float | None = None
    beta_C: float | None = None
    gamma_H: float = 1.0
    gamma_C: float = 1.0
    E_H0: float = 10.0
    E_HN: float = 6.0
    N_H: int = 100
    N_C: int = 100
    tau_H: float | None = None
    tau_C: float | None = None
    control_H: str = "power"
    n_H: float | None = 1.0
    a_H: float | None = None
    b_H: float | None = None
    values_H: tuple[float, ...] | None = None
    control_C: str = "power"
    n_C: float | None = 1.0
    a_C: float | None = None
    b_C: float | None = None
    values_C: tuple[float, ...] | None = None

    N_values: tuple[int, ...] | None = None
    n_values: tuple[float, ...] | None = None
    n_H_values: tuple[float, ...] | None = None
    eta_C_values: tuple[float, ...] | None = None

    # -- derived objects -------------------------------------------------

    def bath(self) -> BathSpec:
        return _bath(self.T, self.beta, self.gamma, default_T=10.0)

    def hot_bath(self) -> BathSpec:
        return _bath(self.T_H, self.beta_H, self.gamma_H, default_T=10.0)

    def cold_bath(self) -> BathSpec:
        return _bath(self.T_C, self.beta_C, self.gamma_C, default_T=5.0)

    def dip_control(self, n: float | None = None) -> ControlFunction:
        return _control(self.control, self.n if n is None else n, self.a, self.b, self.values)

    def hot_control(self, n_H: float | None = None) -> ControlFunction:
        return _control(self.control_H, self.n_H if n_H is None else n_H, self.a_H, self.b_H, self.values_H)

    def cold_control(self) -> ControlFunction:
        return _control(self.control_C, self.n_C, self.a_C, self.b_C, self.values_C)

    def levels(self) -> tuple[list[float], list[float]]:
        """Initial and final level energies; scalars mean a two-level system."""
        if isinstance(self.E0, tuple):
            return list(self.E0), list(self.EN)
        return [0.0, float(self.E0)], [0.0, float(self.EN)]

    def dip_schedule(self, N: int | None = None, n: float | None = None):
        E0, EN = self.levels()
        ctrl = self.dip_control(n)
        moving = [ctrl if e0 != eN else ControlFunction.linear() for e0, eN in zip(E0, EN)]
        tau = self.tau
        if tau is None:
            tau = default_step_time(self.bath(), max(abs(e) for e in E0 + EN))
        return build_schedule(E0, EN, moving, self.N if N is None else N, tau)

    def cycle_spec(self, n_H: float | None = None, T_C: float | None = None, **overrides) -> CycleSpec:
        cold = self.cold_bath()
        if T_C is not None:
            cold = BathSpec(T_C, cold.gamma)
        fields = dict(
            hot=self.hot_bath(),
            cold=cold,
            E_H0=self.E_H0,
            E_HN=self.E_HN,
            N_H=self.N_H,
            N_C=self.N_C,
            control_H=self.hot_control(n_H),
            control_C=self.cold_control(),
            tau_H=self.tau_H,
            tau_C=self.tau_C,
        )
        fields.update(overrides)
        return CycleSpec(**fields)

    def validate(self) -> RunConfig:
        _choice("kind", self.kind, KINDS)
        _choice("mode", self.mode, ("exact", "dynamics"))
        _choice("format", self.format, FORMATS)
        _choice("on_error", self.on_error, ERROR_POLICIES)
        if self.kind in ("dip", "sweep-n"):
            self._validate_dip()
        else:
            self._validate_cycle()
        return self

    def _validate_dip(self):
        _field("T/beta", self.bath)
        if isinstance(self.E0, tuple) != isinstance(self.EN, tuple):
            raise ConfigError("E0/EN: both must be numbers or both lists")
        if isinstance(self.E0, tuple) and len(self.E0) != len(self.EN):
            raise ConfigError("E0/EN: lists must have equal length")
        _positive_int("N", self.N)
        if self.tau is not None and not self.tau > 0:
            raise ConfigError("tau: tau > 0 required")
        if self.mode == "dynamics" and isinstance(self.E0, tuple):
            raise ConfigError("mode: dynamics needs a two-level system (scalar E0, EN)")
        if self.kind == "sweep-n":
            _sweep("N_values", self.N_values, integer=True)
            if self.n_values is not None:
                _sweep("n_values", self.n_values)
                if self.control != "power":
                    raise ConfigError("n_values: only valid with control = 'power'")
                for n in self.n_values:
                    _field("n_values", lambda: self.dip_control(n))
        _field("control", self.dip_control)
        _field("E0/EN", self.dip_schedule)

    def _validate_cycle(self):
        _field("T_H/beta_H", self.hot_bath)
        _field("T_C/beta_C", self.cold_bath)
        _field("control_H", self.hot_control)
        _field("control_C", self.cold_control)
        if self.kind == "sweep-nh":
            _sweep("n_H_values", self.n_H_values)
            if self.control_H != "power":
                raise ConfigError("n_H_values: only valid with control_H = 'power'")
            for n_H in self.n_H_values:
                _field("n_H_values", lambda: self.hot_control(n_H))
        if self.kind == "emp-curve":
            _sweep("eta_C_values", self.eta_C_values)
            if not all(0 < e < 1 for e in self.eta_C_values):
                raise ConfigError("eta_C_values: every value must lie in (0, 1)")
            if self.n_H_values is not None:
                _sweep("n_H_values", self.n_H_values)
                if self.control_H != "power":
                    raise ConfigError("n_H_values: only valid with control_H = 'power'")
            T_C = self.hot_bath().T * (1 - self.eta_C_values[0])
            _field("cycle", lambda: self.cycle_spec(T_C=T_C).schedules())
        else:
            _field("cycle", lambda: self.cycle_spec().schedules())


def _bath(T, beta, gamma, default_T) -> BathSpec:
    if T is not None and beta is not None:
        raise ValueError("give a temperature or an inverse temperature, not both")
    if beta is not None:
        return BathSpec.from_beta(beta, gamma)
    return BathSpec(default_T if T is None else T, gamma)


def _control(family, n, a, b, values) -> ControlFunction:
    if family == "power":
        return ControlFunction.power(n)
    if family == "exponential":
        return ControlFunction.exponential(b=b, a=a)
    if family == "logarithmic":
        return ControlFunction.logarithmic(a=a, b=b)
    if family == "tabulated":
        return ControlFunction.tabulated(values or ())
    return ControlFunction(family)


def _field(name: str, thunk):
    try:
        return thunk()
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{name}: {exc}") from exc


def _choice(name, value, allowed):
    if value not in allowed:
        raise ConfigError(f"{name}: must be one of {', '.join(allowed)}; got {value!r}")


def _positive_int(name, value):
    if not isinstance(value, int) or value < 1:
        raise ConfigError(f"{name}: integer >= 1 required, got {value!r}")


def _sweep(name, values, integer=False):
    if values is None or len(values) == 0:
        raise ConfigError(f"{name}: sweep range must be non-empty")
    if integer:
        for v in values:
            _positive_int(name, v)
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError(f"{name}: sweep range must be strictly increasing")


_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
_INT_KEYS = {"seed", "N", "N_H", "N_C"}
_STR_KEYS = {"kind", "mode", "format", "out", "on_error", "control", "control_H", "control_C"}
_LIST_KEYS = {"values", "values_H", "values_C", "N_values", "n_values", "n_H_values", "eta_C_values"}
_AUTO_KEYS = {"tau", "tau_H", "tau_C"}


def _coerce(key: str, value: Any):
    if key in _STR_KEYS:
        if not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
        return value
    if key in _INT_KEYS:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return value
    if key in _AUTO_KEYS and value == "auto":
        return None
    if key in _LIST_KEYS or (key in ("E0", "EN") and isinstance(value, (list, tuple))):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key}: expected a list, got {value!r}")
        if key == "N_values":
            return tuple(_coerce("N", v) for v in value)
        return tuple(_number(key, v) for v in value)
    return _number(key, value)


def _number(key, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"{key}: must be finite, got {value!r}")
    return float(value)


def config_from_mapping(data: Mapping[str, Any]) -> RunConfig:
    unknown = sorted(set(data) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown key(s): {', '.join(unknown)}")
    kwargs = {k: _coerce(k, v) for k, v in data.items()}
    return RunConfig(**kwargs).validate()


def parse_document(text: str) -> dict[str, Any]:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ConfigError(f"{nested[0]}: tables are not allowed; the document must be flat")
    return data


def parse_config(text: str) -> RunConfig:
    return config_from_mapping(parse_document(text))


def load_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Defaults, then the file at ``path``, then ``overrides``."""
    data: dict[str, Any] = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        try:
            data.update(parse_document(text))
        except ConfigError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    data.update(overrides or {})
    return config_from_mapping(data)


def parse_override(item: str) -> tuple[str, Any]:
    """Parse ``KEY=VALUE`` with VALUE in TOML syntax (bare words become strings)."""
    key, sep, raw = item.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override {item!r} is not KEY=VALUE")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return key, value
