"""Analytic eigenstates of the closed cavity-emitter block.

With both emitters resonant and equally coupled, the one- and two-excitation
manifolds split symmetrically about the bare manifold energies: the single
manifold by +-sqrt(2) g with a dark state in between, the double manifold by
+-sqrt(6) g with two dark states. Driving at Delta = sqrt(2) g addresses the
single-excitation branch with one photon; Delta = sqrt(6)/2 g reaches the
double-excitation branch by a two-photon process.

The |0,e,e> weight of the +-sqrt(6) g pair is 1/sqrt(6), the value that
normalizes the eigenvector of the assembled block (cross-checked against
direct diagonalization in the tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PhysicalDomainError
from .state import I_EE00, I_EG00, I_EG10, I_GE00, I_GE10, I_GG10, I_GG20

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)
_SQRT6 = math.sqrt(6.0)

# |n_photon, i1, i2> labels -> scalar slot in the flat state vector.
BASIS_INDEX = {
    "1gg": I_GG10,
    "0ge": I_GE00,
    "0eg": I_EG00,
    "2gg": I_GG20,
    "1ge": I_GE10,
    "1eg": I_EG10,
    "0ee": I_EE00,
}


@dataclass(frozen=True)
class DressedState:
    """One eigenstate of the lossless, undriven cavity-emitter block."""

    label: str
    manifold: int
    basis: tuple
    amplitudes: np.ndarray = field(repr=False)
    energy_per_g: float

    def __post_init__(self):
        self.amplitudes.setflags(write=False)

    def energy_offset(self, g: float) -> float:
        """Energy relative to the bare manifold energy, in gamma units."""
        return self.energy_per_g * g

    def embedding(self):
        """(flat-state indices, amplitudes) for this state's basis kets."""
        return tuple(BASIS_INDEX[b] for b in self.basis), self.amplitudes


def dressed_states(g: float) -> list[DressedState]:
    """The seven eigenstates of the one- and two-excitation manifolds."""
    if g <= 0:
        raise PhysicalDomainError("coupling g must be > 0")
    one = ("1gg", "0ge", "0eg")
    two = ("2gg", "1ge", "1eg", "0ee")
    mk = lambda label, manifold, basis, amps, e: DressedState(
        label=label,
        manifold=manifold,
        basis=basis,
        amplitudes=np.array(amps, dtype=float),
        energy_per_g=e,
    )
    return [
        mk("1_0", 1, one, [0.0, 1.0 / _SQRT2, -1.0 / _SQRT2], 0.0),
        mk("1_+", 1, one, [1.0 / _SQRT2, 0.5, 0.5], _SQRT2),
        mk("1_-", 1, one, [1.0 / _SQRT2, -0.5, -0.5], -_SQRT2),
        mk("2_0^1", 2, two, [1.0 / _SQRT3, 0.0, 0.0, -_SQRT6 / 3.0], 0.0),
        mk("2_0^2", 2, two, [0.0, 1.0 / _SQRT2, -1.0 / _SQRT2, 0.0], 0.0),
        mk("2_+", 2, two, [_SQRT3 / 3.0, 0.5, 0.5, 1.0 / _SQRT6], _SQRT6),
        mk("2_-", 2, two, [_SQRT3 / 3.0, -0.5, -0.5, 1.0 / _SQRT6], -_SQRT6),
    ]


def resonance_detuning(manifold: int, branch: str) -> float:
    """Detuning (units of g) that drives the chosen branch resonantly.

    One-photon resonance with the single manifold: +-sqrt(2); two-photon
    resonance with the double manifold: +-sqrt(6)/2 (= sqrt(1.5)).
    """
    if manifold not in (1, 2):
        raise PhysicalDomainError(f"manifold must be 1 or 2, got {manifold!r}")
    if branch not in ("+", "-"):
        raise PhysicalDomainError(f"branch must be '+' or '-', got {branch!r}")
    magnitude = _SQRT2 if manifold == 1 else _SQRT6 / 2.0
    return magnitude if branch == "+" else -magnitude


def format_catalog(g: float) -> str:
    """Human-readable table of the dressed states at coupling g."""
    lines = [
        f"dressed states at g = {g:g} (energies relative to the bare manifold)",
        f"{'label':8s} {'manifold':8s} {'energy':>14s}  amplitudes",
    ]
    for st in dressed_states(g):
        amps = ", ".join(
            f"{a:+.6f}|{b}>" for a, b in zip(st.amplitudes, st.basis) if a != 0.0
        )
        lines.append(
            f"{st.label:8s} {st.manifold:^8d} {st.energy_offset(g):>+14.6f}  {amps}"
        )
    lines.append(
        "resonant detunings: single manifold Delta = "
        f"{resonance_detuning(1, '+'):+.6f} g, double manifold Delta = "
        f"{resonance_detuning(2, '+'):+.6f} g"
    )
    return "\n".join(lines)
