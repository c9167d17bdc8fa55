"""Photon statistics and emitter entanglement from a state snapshot."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateStateError
from .state import (
    I_EE00,
    I_EG00,
    I_EG10,
    I_GE00,
    I_GE10,
    I_GG00,
    I_GG10,
    I_GG20,
    ObservableRecord,
    StateVector,
    norm as state_norm,
)

# Below this photon number the g2 ratio would only amplify round-off, so it
# is reported as undefined instead (early-time traces start at exact vacuum).
G2_FLOOR = 1e-12

_SIGMA_YY = np.array(
    [
        [0, 0, 0, -1],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [-1, 0, 0, 0],
    ],
    dtype=np.complex128,
)


def photon_number(state: StateVector, grid=None) -> float:
    """Mean intracavity photon number.

    Explicit form: |c_gg10|^2 + 2 |c_gg20|^2 + |c_ge10|^2 + |c_eg10|^2
    plus the one-cavity-photon continuum family summed over modes. This is
    the same expression the g2 denominator uses.
    """
    y = state.data
    gg1k = state.gg1k
    return float(
        abs(y[I_GG10]) ** 2
        + 2.0 * abs(y[I_GG20]) ** 2
        + abs(y[I_GE10]) ** 2
        + abs(y[I_EG10]) ** 2
        + np.dot(gg1k.real, gg1k.real)
        + np.dot(gg1k.imag, gg1k.imag)
    )


def two_photon_probability(state: StateVector) -> float:
    """Two-photon expectation <a+ a+ a a> = 2 |c_gg20|^2."""
    return 2.0 * abs(state.data[I_GG20]) ** 2


def g2_zero_delay(state: StateVector, grid=None) -> float | None:
    """Equal-time second-order correlation 2|c_gg20|^2 / n^2.

    Returns None (undefined) while the photon number is below G2_FLOOR.
    """
    n = photon_number(state, grid)
    if n < G2_FLOOR:
        return None
    return two_photon_probability(state) / (n * n)


@dataclass(frozen=True)
class EmitterDensityMatrix:
    """4x4 reduced density matrix of the emitters in {gg, ge, eg, ee}."""

    matrix: np.ndarray = field(repr=False)
    trace_normalized: bool = True

    def __post_init__(self):
        self.matrix.setflags(write=False)


def reduced_density_matrix(state: StateVector, grid=None) -> EmitterDensityMatrix:
    """Trace out every photonic configuration; normalize to unit trace.

    Coherences survive only between emitter configurations that share the
    exact same photonic content, so each matrix entry is a sum over the
    photonic families both emitter configurations can hold.

    Raises:
        DegenerateStateError: the state carries no weight at all.
    """
    y = state.data
    rho = np.zeros((4, 4), dtype=np.complex128)
    # Emitter basis order: 0=gg, 1=ge, 2=eg, 3=ee.
    gg0k, ge0k, eg0k, gg1k = state.gg0k, state.ge0k, state.eg0k, state.gg1k
    pairs = state.pairs

    rho[0, 0] = (
        abs(y[I_GG00]) ** 2
        + abs(y[I_GG10]) ** 2
        + abs(y[I_GG20]) ** 2
        + np.vdot(gg0k, gg0k).real
        + np.vdot(gg1k, gg1k).real
        + np.vdot(pairs, pairs).real
    )
    rho[1, 1] = (
        abs(y[I_GE00]) ** 2 + abs(y[I_GE10]) ** 2 + np.vdot(ge0k, ge0k).real
    )
    rho[2, 2] = (
        abs(y[I_EG00]) ** 2 + abs(y[I_EG10]) ** 2 + np.vdot(eg0k, eg0k).real
    )
    rho[3, 3] = abs(y[I_EE00]) ** 2

    rho[0, 1] = (
        y[I_GG00] * np.conj(y[I_GE00])
        + y[I_GG10] * np.conj(y[I_GE10])
        + np.vdot(ge0k, gg0k)
    )
    rho[0, 2] = (
        y[I_GG00] * np.conj(y[I_EG00])
        + y[I_GG10] * np.conj(y[I_EG10])
        + np.vdot(eg0k, gg0k)
    )
    rho[0, 3] = y[I_GG00] * np.conj(y[I_EE00])
    rho[1, 2] = (
        y[I_GE00] * np.conj(y[I_EG00])
        + y[I_GE10] * np.conj(y[I_EG10])
        + np.vdot(eg0k, ge0k)
    )
    rho[1, 3] = y[I_GE00] * np.conj(y[I_EE00])
    rho[2, 3] = y[I_EG00] * np.conj(y[I_EE00])
    for a in range(4):
        for b in range(a + 1, 4):
            rho[b, a] = np.conj(rho[a, b])

    tr = rho.trace().real
    if tr <= 0.0:
        raise DegenerateStateError("state has zero weight; no reduced state")
    rho /= tr
    return EmitterDensityMatrix(matrix=rho)


def concurrence(rho: EmitterDensityMatrix | np.ndarray) -> float:
    """Two-qubit concurrence from the spin-flipped product matrix.

    C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)) with l_i the
    eigenvalues, in decreasing order, of rho (sy x sy) rho* (sy x sy).
    Round-off negatives are clamped before the square root and the result
    is clamped to [0, 1].
    """
    m = rho.matrix if isinstance(rho, EmitterDensityMatrix) else np.asarray(rho)
    flipped = _SIGMA_YY @ m.conj() @ _SIGMA_YY
    try:
        lam = np.linalg.eigvals(m @ flipped)
    except np.linalg.LinAlgError as exc:
        raise ArithmeticError(
            f"eigenvalue solver failed on rho*rho_tilde =\n{m @ flipped!r}"
        ) from exc
    lam = np.sort(np.maximum(lam.real, 0.0))[::-1]
    c = math.sqrt(lam[0]) - math.sqrt(lam[1]) - math.sqrt(lam[2]) - math.sqrt(lam[3])
    return min(max(c, 0.0), 1.0)


def compute_record(t: float, state: StateVector, grid=None) -> ObservableRecord:
    """Bundle the standard per-snapshot observables."""
    return ObservableRecord(
        t=t,
        n_photon=photon_number(state, grid),
        p2=two_photon_probability(state),
        g2=g2_zero_delay(state, grid),
        concurrence=concurrence(reduced_density_matrix(state, grid)),
        norm=state_norm(state, grid),
    )
