"""Physical parameters, continuum discretization and cavity-continuum couplings.

Units: the emitter decay rate gamma fixes time (gamma = 1) and the waveguide
speed c fixes length (c = 1 by default). Every frequency/rate below is in
units of gamma, every length in units of c/gamma.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ConfigurationError,
    GridTooCoarseError,
    ParameterConflictError,
    PhysicalDomainError,
)

SQRT2 = math.sqrt(2.0)

# Keys accepted by build_params / the plain-text config format.
_PARAM_KEYS = frozenset(
    {"omega0", "g", "g1", "g2", "epsilon", "G0", "c", "L", "tau",
     "Delta", "delta", "gamma"}
)


@dataclass(frozen=True)
class SystemParams:
    """All rates and frequencies of the driven two-emitter cavity.

    Attributes:
        omega0: cavity frequency.
        omegaL: drive laser frequency, omega0 - Delta.
        Delta: cavity-laser detuning omega0 - omegaL.
        delta: emitter-laser detuning; equals Delta under the resonance
            assumption (cavity resonant with the emitters).
        g1, g2: emitter-cavity couplings.
        epsilon: coherent drive amplitude.
        gamma: spontaneous emitter decay rate (unit of time, = 1).
        G0: bare tunnel coupling between the cavity and the outside modes.
        c: waveguide speed.
        L: cavity-mirror distance.
        tau: round-trip delay 2 L / c (always derived, never set freely).
    """

    omega0: float
    omegaL: float
    Delta: float
    delta: float
    g1: float
    g2: float
    epsilon: float
    gamma: float
    G0: float
    c: float
    L: float
    tau: float

    def __post_init__(self):
        if self.epsilon < 0:
            raise PhysicalDomainError("drive amplitude epsilon must be >= 0")
        if self.gamma < 0:
            raise PhysicalDomainError("decay rate gamma must be >= 0")
        if self.g1 < 0 or self.g2 < 0:
            raise PhysicalDomainError("couplings g1, g2 must be >= 0")
        if self.G0 < 0:
            raise PhysicalDomainError("tunnel coupling G0 must be >= 0")
        if self.c <= 0:
            raise PhysicalDomainError("waveguide speed c must be > 0")
        if self.L <= 0:
            raise PhysicalDomainError("mirror distance L must be > 0")


def build_params(raw) -> SystemParams:
    """Validate a key-value map and derive the dependent fields.

    Required keys: omega0, g, epsilon, G0, and one of L / tau.
    Optional: c (default 1), gamma (default 1), Delta (default 0),
    delta (default: Delta), g1/g2 (default: g).

    Raises:
        ConfigurationError: a required key is missing or not a real number.
        ParameterConflictError: both L and tau given but tau != 2 L / c.
        PhysicalDomainError: a rate or length is out of range.
    """
    vals = {}
    for key, value in dict(raw).items():
        if key not in _PARAM_KEYS:
            raise ConfigurationError(f"unknown parameter key {key!r}")
        try:
            vals[key] = float(value)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(
                f"parameter {key!r} is not a real number: {value!r}"
            ) from exc

    for key in ("omega0", "g", "epsilon", "G0"):
        if key not in vals:
            raise ConfigurationError(f"missing required parameter {key!r}")

    c = vals.get("c", 1.0)
    if c <= 0:
        raise PhysicalDomainError("waveguide speed c must be > 0")
    if "L" in vals and "tau" in vals:
        L = vals["L"]
        tau = vals["tau"]
        if not math.isclose(tau, 2.0 * L / c, rel_tol=1e-9, abs_tol=0.0):
            raise ParameterConflictError(
                f"L={L!r} and tau={tau!r} are inconsistent with tau = 2 L / c"
            )
    elif "L" in vals:
        L = vals["L"]
        tau = 2.0 * L / c
    elif "tau" in vals:
        tau = vals["tau"]
        L = c * tau / 2.0
    else:
        raise ConfigurationError("missing required parameter 'L' (or 'tau')")

    g = vals["g"]
    Delta = vals.get("Delta", 0.0)
    delta = vals.get("delta", Delta)
    omega0 = vals["omega0"]

    return SystemParams(
        omega0=omega0,
        omegaL=omega0 - Delta,
        Delta=Delta,
        delta=delta,
        g1=vals.get("g1", g),
        g2=vals.get("g2", g),
        epsilon=vals["epsilon"],
        gamma=vals.get("gamma", 1.0),
        G0=vals["G0"],
        c=c,
        L=L,
        tau=tau,
    )


def parse_config(text: str) -> dict:
    """Parse the plain-text config format: one ``key = value`` per line.

    ``#`` starts a comment (full line or trailing); blank lines are skipped;
    scientific notation is accepted by the downstream float parsing.
    """
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(
                f"config line {lineno}: expected 'key = value', got {line!r}"
            )
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigurationError(
                f"config line {lineno}: expected 'key = value', got {line!r}"
            )
        if key in out:
            raise ConfigurationError(f"config line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def load_config(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


class CouplingMode(enum.Enum):
    """Which cavity-continuum coupling is active for a run."""

    FEEDBACK = "feedback"
    REFERENCE = "reference"


@dataclass(frozen=True)
class KGrid:
    """Uniform discretization of the outside photon continuum.

    Nodes span [k_center - half_width, k_center + half_width] inclusive;
    interior quadrature weights equal the spacing, the two endpoints carry
    half weight (trapezoid rule). The recurrence horizon 2 pi / (c dk) is
    the time beyond which the discrete modes artificially refeed the system.
    """

    k_center: float
    half_width: float
    n_modes: int
    k: np.ndarray = field(repr=False)
    weight: np.ndarray = field(repr=False)
    omega: np.ndarray = field(repr=False)
    dk: float
    t_recurrence: float

    def __post_init__(self):
        self.k.setflags(write=False)
        self.weight.setflags(write=False)
        self.omega.setflags(write=False)


def build_kgrid(params: SystemParams, n_modes: int, half_width: float,
                t_end: float) -> KGrid:
    """Build the uniform mode grid centered at omegaL / c.

    Raises:
        PhysicalDomainError: n_modes < 2, half_width <= 0, or the grid
            would cross k = 0.
        GridTooCoarseError: recurrence horizon 2 pi / (c dk) <= t_end;
            the exception reports the minimal n_modes that would do.
    """
    if n_modes < 2:
        raise PhysicalDomainError("n_modes must be >= 2")
    if half_width <= 0:
        raise PhysicalDomainError("half_width must be > 0")
    k_center = params.omegaL / params.c
    if k_center <= half_width:
        raise PhysicalDomainError(
            f"grid [{k_center - half_width:g}, {k_center + half_width:g}] "
            "crosses k = 0; shrink half_width or raise omegaL"
        )
    dk = 2.0 * half_width / (n_modes - 1)
    t_rec = 2.0 * math.pi / (params.c * dk)
    if t_rec <= t_end:
        required = math.ceil(2.0 * half_width * params.c * t_end / (2.0 * math.pi)) + 2
        raise GridTooCoarseError(
            f"recurrence horizon {t_rec:g} <= t_end {t_end:g}; "
            f"need n_modes >= {required} at this bandwidth",
            required_n_modes=required,
        )
    k = k_center - half_width + dk * np.arange(n_modes)
    weight = np.full(n_modes, dk)
    weight[0] = dk / 2.0
    weight[-1] = dk / 2.0
    omega = params.c * np.abs(k)
    return KGrid(
        k_center=k_center,
        half_width=half_width,
        n_modes=n_modes,
        k=k,
        weight=weight,
        omega=omega,
        dk=dk,
        t_recurrence=t_rec,
    )


def default_half_width(params: SystemParams) -> float:
    """Heuristic bandwidth: cover the dressed resonances with wide margins.

    The full sin(kL) period 4 pi / (c tau) is included only when it fits at
    positive k (long delays); in the short-delay regime it would dwarf
    omegaL / c and the convergence check, not this heuristic, certifies the
    bandwidth.
    """
    w = max(
        20.0 * params.g1,
        20.0 * params.g2,
        20.0 * abs(params.Delta),
        20.0 * abs(params.delta),
        40.0 * params.gamma,
    ) / params.c
    sin_period = 4.0 * math.pi / (params.c * params.tau) / params.c
    k_center = params.omegaL / params.c
    if sin_period <= 0.5 * k_center:
        w = max(w, sin_period)
    return min(w, 0.9 * k_center)


def coupling(mode: CouplingMode, j: int, t: float, params: SystemParams,
             grid: KGrid) -> complex:
    """Discrete coupling amplitude of mode j at time t.

    The sqrt(weight) factor turns the continuum coupling density into the
    coupling of a unit-commutator discrete mode, so integrals over k become
    plain sums over j everywhere downstream.
    """
    if not 0 <= j < grid.n_modes:
        raise IndexError(f"mode index {j} out of range")
    root_w = math.sqrt(grid.weight[j])
    if mode is CouplingMode.FEEDBACK:
        return (
            params.G0
            * math.sin(grid.k[j] * params.L)
            * np.exp(1j * (params.omegaL - grid.omega[j]) * t)
            * root_w
        )
    return (
        params.G0
        / SQRT2
        * np.exp(1j * (params.omega0 - grid.omega[j]) * t)
        * root_w
    )


@dataclass(frozen=True)
class CouplingTable:
    """Precomputed t = 0 couplings and per-mode phase rates.

    ``coupling(mode, j, t) == g0[j] * exp(1j * nu[j] * t)``.
    """

    mode: CouplingMode
    g0: np.ndarray = field(repr=False)
    nu: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.g0.setflags(write=False)
        self.nu.setflags(write=False)

    def at(self, t: float, out=None) -> np.ndarray:
        """Coupling vector at time t (complex)."""
        phase = np.exp(1j * self.nu * t)
        if out is None:
            return self.g0 * phase
        np.multiply(self.g0, phase, out=out)
        return out

    @property
    def max_phase_rate(self) -> float:
        return float(np.max(np.abs(self.nu)))


def coupling_table(mode: CouplingMode, params: SystemParams,
                   grid: KGrid) -> CouplingTable:
    root_w = np.sqrt(grid.weight)
    if mode is CouplingMode.FEEDBACK:
        g0 = params.G0 * np.sin(grid.k * params.L) * root_w
        nu = params.omegaL - grid.omega
    else:
        g0 = np.full(grid.n_modes, params.G0 / SQRT2) * root_w
        nu = params.omega0 - grid.omega
    return CouplingTable(mode=mode, g0=g0.astype(np.complex128), nu=nu)


def stability_dt(params: SystemParams, grid: KGrid, mode: CouplingMode) -> float:
    """Largest step the fixed-step integrator accepts for this setup."""
    table = coupling_table(mode, params, grid)
    fastest = max(
        abs(params.Delta),
        abs(params.delta),
        params.g1,
        params.g2,
        params.gamma,
        table.max_phase_rate,
    )
    return 0.05 / fastest if fastest > 0 else math.inf
