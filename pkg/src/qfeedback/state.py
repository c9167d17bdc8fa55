"""Truncated two-excitation wavefunction storage.

The state holds thirteen amplitude families: eight discrete scalars, four
vectors over the mode grid, and one symmetric two-photon family. Everything
lives in a single flat complex vector so integrators and the brute-force
verifier can treat the state as one array.

Two-photon storage is the normalized symmetric convention: the packed upper
triangle (j <= l) stores the amplitude of the properly normalized two-photon
state for each unordered mode pair, one photon pair per entry. With that
convention the flat vector is expressed in an orthonormal basis and the norm
is a plain 2-norm, with no multiplicity bookkeeping.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import MemoryBudgetError
from .model import KGrid

# Indices of the discrete scalar amplitudes in the flat vector.
I_GG00 = 0
I_GE00 = 1
I_EG00 = 2
I_EE00 = 3
I_GG10 = 4
I_GE10 = 5
I_EG10 = 6
I_GG20 = 7
N_SCALARS = 8

SCALAR_NAMES = ("gg00", "ge00", "eg00", "ee00", "gg10", "ge10", "eg10", "gg20")

# 512 MiB default cap on a single state vector.
DEFAULT_STATE_BUDGET = 512 * 1024 * 1024

_MAGIC = b"QFBSTA\x00\x00"
_VERSION = 1


def state_size(n_modes: int) -> int:
    """Number of complex amplitudes: 8 + 4 N + N (N + 1) / 2."""
    return N_SCALARS + 4 * n_modes + n_modes * (n_modes + 1) // 2


def pair_offset(n_modes: int) -> int:
    return N_SCALARS + 4 * n_modes


def pair_index(j: int, l: int, n_modes: int) -> int:
    """Packed index of the unordered mode pair {j, l} (row-major, j <= l)."""
    if j > l:
        j, l = l, j
    return j * n_modes - j * (j - 1) // 2 + (l - j)


class StateVector:
    """Wavefunction amplitudes over a fixed mode grid.

    Value-type semantics: integrator steps return new instances; snapshots
    handed to observers are read-only. The underlying flat array is exposed
    as ``data`` for the integrator and the checkpoint format.
    """

    __slots__ = ("n_modes", "data")

    def __init__(self, n_modes: int, data: np.ndarray | None = None,
                 memory_budget: int = DEFAULT_STATE_BUDGET):
        size = state_size(n_modes)
        need = size * 16
        if need > memory_budget:
            raise MemoryBudgetError(
                f"state with {n_modes} modes needs {need} bytes "
                f"(budget {memory_budget})",
                required_bytes=need,
            )
        self.n_modes = n_modes
        if data is None:
            self.data = np.zeros(size, dtype=np.complex128)
        else:
            if data.shape != (size,) or data.dtype != np.complex128:
                raise ValueError(
                    f"data must be complex128 of shape ({size},)"
                )
            self.data = data

    # -- family views -----------------------------------------------------

    @property
    def scalars(self) -> np.ndarray:
        return self.data[:N_SCALARS]

    def _vec(self, which: int) -> np.ndarray:
        n = self.n_modes
        start = N_SCALARS + which * n
        return self.data[start:start + n]

    @property
    def gg0k(self) -> np.ndarray:
        return self._vec(0)

    @property
    def ge0k(self) -> np.ndarray:
        return self._vec(1)

    @property
    def eg0k(self) -> np.ndarray:
        return self._vec(2)

    @property
    def gg1k(self) -> np.ndarray:
        return self._vec(3)

    @property
    def pairs(self) -> np.ndarray:
        """Packed symmetric two-photon amplitudes (j <= l)."""
        return self.data[pair_offset(self.n_modes):]

    def pair(self, j: int, l: int) -> complex:
        """Two-photon amplitude for the unordered pair {j, l}."""
        return self.pairs[pair_index(j, l, self.n_modes)]

    # -- scalar conveniences ----------------------------------------------

    @property
    def c_gg00(self) -> complex:
        return self.data[I_GG00]

    @property
    def c_gg10(self) -> complex:
        return self.data[I_GG10]

    @property
    def c_gg20(self) -> complex:
        return self.data[I_GG20]

    # -- generic ops --------------------------------------------------------

    def copy(self) -> "StateVector":
        return StateVector(self.n_modes, self.data.copy())

    def snapshot(self) -> "StateVector":
        """Read-only copy for observers."""
        out = self.copy()
        out.data.setflags(write=False)
        return out

    def all_finite(self) -> bool:
        return bool(np.isfinite(self.data.view(np.float64)).all())

    def __eq__(self, other):
        return (
            isinstance(other, StateVector)
            and self.n_modes == other.n_modes
            and np.array_equal(self.data, other.data)
        )

    def __repr__(self):
        return f"StateVector(n_modes={self.n_modes}, size={self.data.size})"


def vacuum_state(grid: KGrid, **kwargs) -> StateVector:
    """Empty cavity and continuum, both emitters in the ground state."""
    s = StateVector(grid.n_modes, **kwargs)
    s.data[I_GG00] = 1.0
    return s


def single_excitation_state(grid: KGrid, which: str, **kwargs) -> StateVector:
    """One excitation in 'emitter1', 'emitter2' or 'cavity'; vacuum weight 0."""
    s = StateVector(grid.n_modes, **kwargs)
    try:
        idx = {"emitter1": I_EG00, "emitter2": I_GE00, "cavity": I_GG10}[which]
    except KeyError:
        raise ValueError(
            f"which must be 'emitter1', 'emitter2' or 'cavity', got {which!r}"
        ) from None
    s.data[idx] = 1.0
    return s


def norm(state: StateVector, grid: KGrid | None = None) -> float:
    """Total probability weight of the stored amplitudes.

    In the normalized symmetric storage every entry of the flat vector is
    the amplitude of an orthonormal basis state, so this is a plain 2-norm
    squared.
    """
    x = state.data.view(np.float64)
    return float(np.dot(x, x))


# -- binary checkpoints ----------------------------------------------------
#
# 16-byte header: 8-byte magic, uint32 version, uint32 n_modes (little
# endian), then the flat complex128 array, also little endian.


def save_checkpoint(state: StateVector, path) -> None:
    header = _MAGIC + struct.pack("<II", _VERSION, state.n_modes)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(state.data.astype("<c16", copy=False).tobytes())


def load_checkpoint(path) -> StateVector:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:8] != _MAGIC:
            raise ValueError(f"{path}: not a state checkpoint")
        version, n_modes = struct.unpack("<II", header[8:])
        if version != _VERSION:
            raise ValueError(f"{path}: unsupported checkpoint version {version}")
        raw = fh.read()
    data = np.frombuffer(raw, dtype="<c16").astype(np.complex128)
    if data.size != state_size(n_modes):
        raise ValueError(f"{path}: truncated checkpoint")
    return StateVector(n_modes, data)


@dataclass(frozen=True)
class ObservableRecord:
    """Time-stamped observables of one snapshot.

    ``g2`` is None while the photon number sits below the g2 floor; CSV
    serialization turns that into an empty field rather than NaN.
    """

    t: float
    n_photon: float
    p2: float
    g2: float | None
    concurrence: float
    norm: float
