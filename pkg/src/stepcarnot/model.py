"""Level spectra, baths, control functions and thermal states.

Natural units throughout: k_B = hbar = 1, energies and temperatures share
one unit and rates are in inverse time.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

#: beta*E above which the first-order high-temperature expansions are
#: flagged as qualitative only.
HIGH_TEMPERATURE_LIMIT = 0.3


class HighTemperatureWarning(UserWarning):
    """Raised (as a warning) when beta*E leaves the high-temperature regime."""


class LevelCrossingError(ValueError):
    pass


def warn_if_not_high_temperature(beta_e: float, where: str) -> None:
    if beta_e > HIGH_TEMPERATURE_LIMIT:
        warnings.warn(
            f"{where}: max beta*E = {beta_e:.3g} exceeds {HIGH_TEMPERATURE_LIMIT}; "
            "high-temperature expansion is only qualitative here",
            HighTemperatureWarning,
            stacklevel=3,
        )


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class BathSpec:
    """A heat bath at temperature ``T`` coupled to the system at rate ``gamma``."""

    T: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError(f"bath temperature must be positive and finite, got {self.T}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"coupling gamma must be positive, got {self.gamma}")

    @classmethod
    def from_beta(cls, beta: float, gamma: float = 1.0) -> BathSpec:
        if not beta > 0:
            raise ValueError(f"inverse temperature must be positive, got {beta}")
        return cls(T=1.0 / beta, gamma=gamma)

    @property
    def beta(self) -> float:
        return 1.0 / self.T

    def gamma_tilde(self, E0: float) -> float:
        """Effective high-temperature relaxation rate 2*gamma/(beta*E0)."""
        return 2.0 * self.gamma / (self.beta * E0)


_FAMILIES = ("power", "exponential", "logarithmic", "tabulated")


@dataclass(frozen=True)
class ControlFunction:
    """Parametric shape f(k) of the level trajectory over integer steps.

    Families follow the raw forms ``a*k**n``, ``b*(exp(a*k) - 1)``,
    ``a*log(b*k + 1)`` and an explicit table.  Only the shape matters: a
    profile is always rescaled so that ``f(0) = 0`` and ``f(N) = delta``.
    For the exponential family ``a`` may be left as ``None``, in which case
    it is chosen so that the raw form already ends at ``delta`` (the same
    holds for ``b`` of the logarithmic family).
    """

    family: str
    n: float | None = None
    a: float | None = None
    b: float | None = None
    values: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown control family {self.family!r}; expected one of {_FAMILIES}")
        if self.family == "power":
            if self.n is None or not self.n > 0:
                raise ValueError("n > 0 required")
        elif self.family == "exponential":
            if self.b is None or self.b == 0:
                raise ValueError("b != 0 required")
            if self.a is not None and self.a == 0:
                raise ValueError("a != 0 required")
        elif self.family == "logarithmic":
            if self.a is None or self.a == 0:
                raise ValueError("a != 0 required")
        else:
            if self.values is None or len(self.values) < 2:
                raise ValueError("tabulated control needs at least 2 samples")
            if self.values[0] != 0:
                raise ValueError("tabulated control must start at 0")
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def power(cls, n: float) -> ControlFunction:
        return cls("power", n=n)

    @classmethod
    def linear(cls) -> ControlFunction:
        return cls("power", n=1.0)

    @classmethod
    def exponential(cls, b: float, a: float | None = None) -> ControlFunction:
        return cls("exponential", a=a, b=b)

    @classmethod
    def logarithmic(cls, a: float, b: float | None = None) -> ControlFunction:
        return cls("logarithmic", a=a, b=b)

    @classmethod
    def tabulated(cls, values: Sequence[float]) -> ControlFunction:
        return cls("tabulated", values=tuple(values))

    def profile(self, N: int, delta: float) -> np.ndarray:
        """Return f(k) for k = 0..N with f(0) = 0 and f(N) = delta exactly."""
        if N < 1:
            raise ValueError(f"N >= 1 required, got {N}")
        if self.family == "tabulated" and len(self.values) != N + 1:
            raise ValueError(f"tabulated control has {len(self.values)} samples, expected N+1 = {N + 1}")
        if delta == 0:
            return np.zeros(N + 1)
        k = np.arange(N + 1, dtype=float)
        if self.family == "power":
            raw = (k / N) ** self.n
        elif self.family == "exponential":
            a = self.a
            if a is None:
                ratio = delta / self.b
                if ratio <= -1:
                    raise ValueError(f"exponential control needs delta/b > -1, got {ratio}")
                a = math.log1p(ratio) / N
            raw = np.expm1(a * k)
        elif self.family == "logarithmic":
            b = self.b
            if b is None:
                b = math.expm1(delta / self.a) / N
            if b * N <= -1:
                raise ValueError("logarithmic control needs b*k + 1 > 0 on every step")
            raw = np.log1p(b * k)
        else:
            raw = np.array(self.values)
        if raw[-1] == 0:
            raise ValueError(f"{self.family} control cannot be normalised: f(N) = 0")
        f = delta * (raw / raw[-1])
        f[0] = 0.0
        f[-1] = delta
        return f


@dataclass(frozen=True)
class ThermalState:
    """Occupation probabilities of the M levels."""

    p: np.ndarray

    def __post_init__(self):
        p = _frozen(self.p)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("populations must be a non-empty 1-d array")
        if np.any(p < 0) or np.any(p > 1):
            raise ValueError(f"populations outside [0, 1]: {p}")
        if abs(p.sum() - 1.0) > 1e-12:
            raise ValueError(f"populations sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "p", p)

    @classmethod
    def two_level(cls, p_excited: float) -> ThermalState:
        return cls(np.array([1.0 - p_excited, p_excited]))

    @property
    def M(self) -> int:
        return self.p.size

    @property
    def excited(self) -> float:
        """Population of the highest-index level (the excited level when M = 2)."""
        return float(self.p[-1])


@dataclass(frozen=True)
class EnergyLevelSchedule:
    """Level energies ``energies[m, j]`` at the end of each quench, j = 0..N.

    Every step lasts ``tau``: an instantaneous quench from column j-1 to
    column j followed by a dwell of duration tau at column j.
    """

    energies: np.ndarray
    tau: float
    eps: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        E = _frozen(self.energies)
        if E.ndim != 2 or E.shape[0] < 1 or E.shape[1] < 2:
            raise ValueError(f"energies must have shape (M, N+1) with N >= 1, got {E.shape}")
        if not np.all(np.isfinite(E)):
            raise ValueError("energies must be finite")
        if not self.tau > 0:
            raise ValueError(f"step time tau must be positive, got {self.tau}")
        _check_no_crossing(E)
        object.__setattr__(self, "energies", E)
        object.__setattr__(self, "eps", _frozen(np.diff(E, axis=1)))

    @classmethod
    def from_steps(cls, E0: Sequence[float], eps, tau: float) -> EnergyLevelSchedule:
        """Build from initial energies and per-step increments ``eps[m, j-1]``."""
        eps = np.atleast_2d(np.asarray(eps, dtype=float))
        E0 = np.asarray(E0, dtype=float).reshape(-1, 1)
        return cls(np.hstack([E0, E0 + np.cumsum(eps, axis=1)]), tau)

    @property
    def M(self) -> int:
        return self.energies.shape[0]

    @property
    def N(self) -> int:
        return self.energies.shape[1] - 1

    @property
    def delta(self) -> np.ndarray:
        return self.energies[:, -1] - self.energies[:, 0]

    @property
    def delta_bar(self) -> float:
        return float(self.delta.mean())

    @property
    def t_f(self) -> float:
        return self.N * self.tau

    def control(self) -> np.ndarray:
        """Cumulative shifts f_m(j) = E_m^(j) - E_m^(0)."""
        return self.energies - self.energies[:, :1]

    def column(self, j: int) -> np.ndarray:
        return self.energies[:, j]

    def max_beta_e(self, beta: float) -> float:
        return float(beta * np.max(np.abs(self.energies)))


def _check_no_crossing(E: np.ndarray) -> None:
    # pairwise order at every step must match the order at j = 0
    if E.shape[0] < 2:
        return
    diff = E[:, None, :] - E[None, :, :]
    sign = np.sign(diff)
    bad = sign != sign[:, :, :1]
    if np.any(bad):
        m1, m2, j = np.argwhere(bad)[0]
        raise LevelCrossingError(f"levels {m1} and {m2} cross at step {j}")


def gibbs_populations(energies: Sequence[float], beta: float) -> ThermalState:
    """Canonical populations exp(-beta*E_m)/Z."""
    E = np.asarray(energies, dtype=float)
    if E.size == 0:
        raise ValueError("empty level list")
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    w = np.exp(-beta * (E - E.min()))
    p = w / w.sum()
    return ThermalState(p)


def gibbs_matrix(energies: np.ndarray, beta: float) -> np.ndarray:
    """Gibbs populations for every column of an (M, K) energy grid."""
    E = np.asarray(energies, dtype=float)
    w = np.exp(-beta * (E - E.min(axis=0)))
    return w / w.sum(axis=0)


def shannon_entropy(state: ThermalState | Sequence[float]) -> float:
    p = state.p if isinstance(state, ThermalState) else np.asarray(state, dtype=float)
    nz = p[p > 0]
    return float(-np.sum(nz * np.log(nz)))


def build_schedule(
    E0: Sequence[float],
    EN: Sequence[float],
    controls: ControlFunction | Sequence[ControlFunction],
    N: int,
    tau: float,
) -> EnergyLevelSchedule:
    """Grid E_m^(j) = E_m^(0) + f_m(j) with each f_m pinned to hit EN exactly.

    ``controls`` is either one control shared by every level or one per level.
    Raises :class:`LevelCrossingError` if two levels swap order on any step.
    """
    E0 = np.asarray(E0, dtype=float).ravel()
    EN = np.asarray(EN, dtype=float).ravel()
    if E0.shape != EN.shape:
        raise ValueError(f"E0 has {E0.size} levels but EN has {EN.size}")
    if int(N) != N or N < 1:
        raise ValueError(f"N must be an integer >= 1, got {N}")
    N = int(N)
    if isinstance(controls, ControlFunction):
        controls = [controls] * E0.size
    if len(controls) != E0.size:
        raise ValueError(f"need one control per level ({E0.size}), got {len(controls)}")
    rows = []
    for e0, eN, ctrl in zip(E0, EN, controls):
        row = e0 + ctrl.profile(N, eN - e0)
        row[-1] = eN
        rows.append(row)
    return EnergyLevelSchedule(np.vstack(rows), tau)


def two_level_schedule(
    E0: float, EN: float, control: ControlFunction, N: int, tau: float
) -> EnergyLevelSchedule:
    """Two-level schedule with the ground level pinned at zero."""
    return build_schedule([0.0, E0], [0.0, EN], [ControlFunction.linear(), control], N, tau)
