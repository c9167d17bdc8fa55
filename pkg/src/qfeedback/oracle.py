"""Brute-force verifier: assemble the full truncated Hamiltonian and evolve it.

Unlike the hand-coded closure equations, this module builds the sparse
matrix of the complete two-excitation Hamiltonian term by term (vacuum
amplitude fully dynamical) and steps the Schroedinger equation with it.
Agreement between the two routes validates the transcription of the
equations of motion; the truncation boundary (drive out of the
two-excitation sector) is dropped identically in both and its magnitude is
exposed as a diagnostic.

Sign convention: the continuum-coupling block enters with an overall minus
sign relative to the other terms, matching the phase convention of the
closure equations (a gauge choice on the outside modes; no observable
depends on it).
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp

from .errors import (
    GridTooCoarseError,
    IntegrationDivergedError,
    MemoryBudgetError,
    PhysicalDomainError,
)
from .model import CouplingMode, KGrid, SystemParams, coupling_table
from .state import (
    I_EE00,
    I_EG00,
    I_EG10,
    I_GE00,
    I_GE10,
    I_GG00,
    I_GG10,
    I_GG20,
    N_SCALARS,
    SCALAR_NAMES,
    StateVector,
    pair_index,
    pair_offset,
    state_size,
)

SQRT2 = math.sqrt(2.0)

DEFAULT_OPERATOR_BUDGET = 2 * 1024 * 1024 * 1024

_VECTOR_FAMILIES = ("gg0k", "ge0k", "eg0k", "gg1k")


class FullBasis:
    """Bijective map between basis kets and flat-vector indices."""

    def __init__(self, n_modes: int):
        self.n_modes = n_modes
        self.dimension = state_size(n_modes)

    def index(self, family: str, j: int | None = None, l: int | None = None) -> int:
        n = self.n_modes
        if family in SCALAR_NAMES:
            return SCALAR_NAMES.index(family)
        if family in _VECTOR_FAMILIES:
            if not 0 <= j < n:
                raise IndexError(f"mode index {j} out of range")
            return N_SCALARS + _VECTOR_FAMILIES.index(family) * n + j
        if family == "pair":
            if not (0 <= j < n and 0 <= l < n):
                raise IndexError(f"mode pair ({j}, {l}) out of range")
            return pair_offset(n) + pair_index(j, l, n)
        raise KeyError(f"unknown family {family!r}")

    def label(self, idx: int):
        n = self.n_modes
        if not 0 <= idx < self.dimension:
            raise IndexError(f"index {idx} out of range")
        if idx < N_SCALARS:
            return (SCALAR_NAMES[idx],)
        idx -= N_SCALARS
        if idx < 4 * n:
            return (_VECTOR_FAMILIES[idx // n], idx % n)
        idx -= 4 * n
        # Invert the packed row-major triangle index.
        j = 0
        row_len = n
        while idx >= row_len:
            idx -= row_len
            j += 1
            row_len -= 1
        return ("pair", j, j + idx)


class SparseHamiltonian:
    """Time-independent part plus the phasor-driven coupling pattern.

    The sparsity structure is fixed once; evaluating at a time t only
    refreshes the data vector (static values plus base coupling weights
    times the per-mode phasor or its conjugate).
    """

    def __init__(self, params: SystemParams, grid: KGrid, mode: CouplingMode,
                 static_values, coupling_w0, coupling_mode_idx, coupling_conj,
                 csr, gather_order, nu):
        self.params = params
        self.grid = grid
        self.mode = mode
        self.dimension = csr.shape[0]
        self._static = static_values
        self._w0 = coupling_w0
        self._mode_idx = coupling_mode_idx
        self._conj = coupling_conj
        self._csr = csr
        self._order = gather_order
        self._nu = nu
        self._values = np.empty(static_values.size + coupling_w0.size,
                                dtype=np.complex128)
        self._values[:static_values.size] = static_values
        fastest = max(
            abs(params.Delta), abs(params.delta), params.g1, params.g2,
            params.gamma, float(np.max(np.abs(nu))),
        )
        self.max_dt = 0.05 / fastest if fastest > 0 else math.inf

    def matrix_at(self, t: float) -> sp.csr_matrix:
        """Sparse matrix H(t) (shares structure with the internal CSR)."""
        phase = np.exp(1j * self._nu * t)
        ph = phase[self._mode_idx]
        np.conjugate(ph, out=ph, where=self._conj)
        ns = self._static.size
        np.multiply(self._w0, ph, out=self._values[ns:])
        np.take(self._values, self._order, out=self._csr.data)
        return self._csr

    def apply(self, t: float, y: np.ndarray) -> np.ndarray:
        """H(t) @ y."""
        return self.matrix_at(t).dot(y)

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        """Schroedinger right-hand side -i H(t) y for the full system."""
        return -1j * self.apply(t, y)


def assemble(params: SystemParams, grid: KGrid, mode: CouplingMode,
             memory_budget: int = DEFAULT_OPERATOR_BUDGET) -> SparseHamiltonian:
    """Build the full-basis Hamiltonian, term by term.

    Raises:
        MemoryBudgetError: the operator would exceed ``memory_budget``.
    """
    n = grid.n_modes
    basis = FullBasis(n)
    dim = basis.dimension
    nnz_est = 2 * n * n + 20 * n + 40
    required = nnz_est * 40 + dim * 16 * 8
    if required > memory_budget:
        raise MemoryBudgetError(
            f"operator with {n} modes needs about {required} bytes "
            f"(budget {memory_budget})",
            required_bytes=required,
        )

    table = coupling_table(mode, params, grid)
    g0 = table.g0.real.astype(np.float64)
    nu = table.nu

    p = params
    rows = []
    cols = []
    vals = []

    def put(r, c, w):
        rows.append(r)
        cols.append(c)
        vals.append(w)

    def put_herm(r, c, w):
        put(r, c, w)
        put(c, r, np.conj(w))

    # Diagonal: detunings plus the non-hermitian emitter decay.
    half = -0.5j * p.gamma
    put(I_GE00, I_GE00, p.delta + half)
    put(I_EG00, I_EG00, p.delta + half)
    put(I_EE00, I_EE00, 2.0 * p.delta + 2.0 * half)
    put(I_GG10, I_GG10, p.Delta)
    put(I_GE10, I_GE10, p.Delta + p.delta + half)
    put(I_EG10, I_EG10, p.Delta + p.delta + half)
    put(I_GG20, I_GG20, 2.0 * p.Delta)

    # Emitter-cavity exchange.
    put_herm(I_GE00, I_GG10, p.g2)
    put_herm(I_EG00, I_GG10, p.g1)
    put_herm(I_EE00, I_GE10, p.g1)
    put_herm(I_EE00, I_EG10, p.g2)
    put_herm(I_GE10, I_GG20, SQRT2 * p.g2)
    put_herm(I_EG10, I_GG20, SQRT2 * p.g1)

    # Coherent drive ladder (including the vacuum row, kept dynamical here).
    put_herm(I_GG00, I_GG10, p.epsilon)
    put_herm(I_GG10, I_GG20, SQRT2 * p.epsilon)
    put_herm(I_GE00, I_GE10, p.epsilon)
    put_herm(I_EG00, I_EG10, p.epsilon)

    static_rows = np.array(rows, dtype=np.int64)
    static_cols = np.array(cols, dtype=np.int64)
    static_vals = np.array(vals, dtype=np.complex128)

    js = np.arange(n, dtype=np.int64)
    ix_gg0k = N_SCALARS + js
    ix_ge0k = N_SCALARS + n + js
    ix_eg0k = N_SCALARS + 2 * n + js
    ix_gg1k = N_SCALARS + 3 * n + js

    # Per-mode static blocks: detunings, exchange and drive inside the
    # one-continuum-photon families.
    diag_rows = [ix_ge0k, ix_eg0k, ix_gg1k]
    diag_vals = [
        np.full(n, p.delta + half, dtype=np.complex128),
        np.full(n, p.delta + half, dtype=np.complex128),
        np.full(n, p.Delta, dtype=np.complex128),
    ]
    herm_blocks = [
        (ix_ge0k, ix_gg1k, np.full(n, p.g2, dtype=np.complex128)),
        (ix_eg0k, ix_gg1k, np.full(n, p.g1, dtype=np.complex128)),
        (ix_gg0k, ix_gg1k, np.full(n, p.epsilon, dtype=np.complex128)),
    ]
    sr = [static_rows] + diag_rows
    sc = [static_cols] + diag_rows
    sv = [static_vals] + diag_vals
    for r, c, w in herm_blocks:
        sr += [r, c]
        sc += [c, r]
        sv += [w, np.conj(w)]
    static_rows = np.concatenate(sr)
    static_cols = np.concatenate(sc)
    static_vals = np.concatenate(sv)

    # Coupling pattern: the continuum block with the gauge minus sign.
    # Hermitian partners use the conjugated phasor.
    jj, ll = np.triu_indices(n)
    pp = pair_offset(n) + np.arange(jj.size, dtype=np.int64)
    off = jj != ll
    dg = ~off

    c_rows = []
    c_cols = []
    c_w0 = []
    c_mode = []
    c_conj = []

    def put_coupling(r, c, w, midx):
        # H[r, c] = w * exp(i nu t); H[c, r] = conj.
        c_rows.append(r)
        c_cols.append(c)
        c_w0.append(w)
        c_mode.append(midx)
        c_conj.append(np.zeros(np.shape(r), dtype=bool))
        c_rows.append(c)
        c_cols.append(r)
        c_w0.append(np.conj(w))
        c_mode.append(midx)
        c_conj.append(np.ones(np.shape(r), dtype=bool))

    full = np.full(n, I_GG10, dtype=np.int64)
    put_coupling(full, ix_gg0k, -g0.astype(np.complex128), js)
    put_coupling(np.full(n, I_GE10, dtype=np.int64), ix_ge0k,
                 -g0.astype(np.complex128), js)
    put_coupling(np.full(n, I_EG10, dtype=np.int64), ix_eg0k,
                 -g0.astype(np.complex128), js)
    put_coupling(np.full(n, I_GG20, dtype=np.int64), ix_gg1k,
                 -SQRT2 * g0.astype(np.complex128), js)
    # One continuum photon absorbed into the cavity out of a pair: the
    # amplitude reaching mode j uses the coupling of the partner mode.
    put_coupling(ix_gg1k[jj[off]], pp[off], -g0[ll[off]].astype(np.complex128),
                 ll[off])
    put_coupling(ix_gg1k[ll[off]], pp[off], -g0[jj[off]].astype(np.complex128),
                 jj[off])
    put_coupling(ix_gg1k[jj[dg]], pp[dg],
                 -SQRT2 * g0[jj[dg]].astype(np.complex128), jj[dg])

    coupling_rows = np.concatenate(c_rows)
    coupling_cols = np.concatenate(c_cols)
    coupling_w0 = np.concatenate(c_w0)
    coupling_mode = np.concatenate(c_mode)
    coupling_conj = np.concatenate(c_conj)

    all_rows = np.concatenate([static_rows, coupling_rows])
    all_cols = np.concatenate([static_cols, coupling_cols])
    nnz = all_rows.size

    tagged = sp.coo_matrix(
        (np.arange(1, nnz + 1, dtype=np.float64), (all_rows, all_cols)),
        shape=(dim, dim),
    ).tocsr()
    if tagged.nnz != nnz:
        raise AssertionError("duplicate matrix entries in assembly")
    gather_order = tagged.data.astype(np.int64) - 1
    csr = sp.csr_matrix(
        (np.empty(nnz, dtype=np.complex128), tagged.indices, tagged.indptr),
        shape=(dim, dim),
    )
    return SparseHamiltonian(
        params=params,
        grid=grid,
        mode=mode,
        static_values=static_vals,
        coupling_w0=coupling_w0,
        coupling_mode_idx=coupling_mode,
        coupling_conj=coupling_conj,
        csr=csr,
        gather_order=gather_order,
        nu=nu,
    )


def boundary_leak(state: StateVector, params: SystemParams) -> float:
    """Magnitude of the dropped drive out of the two-excitation sector.

    The truncation discards the coupling from the doubly excited cavity to
    the absent three-excitation sector; epsilon |c_gg20| measures how much
    amplitude that channel would move and is the quality diagnostic of the
    two-photon limit.
    """
    return params.epsilon * abs(state.data[I_GG20])


def evolve_full(initial: StateVector, t_end: float, dt: float,
                hamiltonian: SparseHamiltonian, observer=None,
                stride: int = 1) -> StateVector:
    """RK4 on the full (vacuum-dynamical) system; same contract as the
    closure integrator."""
    if t_end <= 0:
        raise PhysicalDomainError("t_end must be > 0")
    if stride < 1:
        raise PhysicalDomainError("stride must be >= 1")
    grid = hamiltonian.grid
    if grid.t_recurrence <= t_end:
        raise GridTooCoarseError(
            f"recurrence horizon {grid.t_recurrence:g} <= t_end {t_end:g}; "
            "refusing to integrate into the revival regime"
        )
    if dt <= 0:
        raise PhysicalDomainError("dt must be > 0")
    if dt > hamiltonian.max_dt * (1.0 + 1e-12):
        raise PhysicalDomainError(
            f"dt={dt:g} exceeds the stability bound {hamiltonian.max_dt:g}"
        )
    n_steps = math.ceil(t_end / dt)
    h = t_end / n_steps
    y = initial.data.copy()
    if observer is not None:
        observer(0.0, StateVector(initial.n_modes, y.copy()).snapshot())
    for step in range(1, n_steps + 1):
        t = (step - 1) * h
        k1 = hamiltonian.derivative(t, y)
        k2 = hamiltonian.derivative(t + 0.5 * h, y + (0.5 * h) * k1)
        k3 = hamiltonian.derivative(t + 0.5 * h, y + (0.5 * h) * k2)
        k4 = hamiltonian.derivative(t + h, y + h * k3)
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.isfinite(y.view(np.float64)).all():
            raise IntegrationDivergedError(
                f"non-finite amplitude after step at t={t:g}, dt={h:g}",
                t=t, dt=h,
            )
        if observer is not None and (step % stride == 0 or step == n_steps):
            observer(step * h, StateVector(initial.n_modes, y.copy()).snapshot())
    return StateVector(initial.n_modes, y)
