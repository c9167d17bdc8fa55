"""Equations of motion under the weak-drive closure and the RK4 stepper.

The vacuum amplitude is held frozen (its derivative is zero and its stored
value feeds the drive term), all other amplitudes follow the closed
two-excitation equations with the continuum integrals replaced by plain
sums over the discrete modes. This module is the performance-critical
O(N^2) core; the two-photon loops live in compiled kernels with a fixed
summation order so results do not depend on thread or worker counts.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .errors import GridTooCoarseError, IntegrationDivergedError, PhysicalDomainError
from .model import CouplingMode, CouplingTable, KGrid, SystemParams, coupling_table
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
    StateVector,
    state_size,
)

SQRT2 = math.sqrt(2.0)


class DerivativeWorkspace:
    """Scratch arrays and cached couplings owned by one integrator.

    Not thread-safe: each concurrently running trajectory needs its own
    instance. Contents carry no meaning between calls.
    """

    def __init__(self, params: SystemParams, grid: KGrid, mode: CouplingMode):
        self.params = params
        self.grid = grid
        self.mode = mode
        self.table: CouplingTable = coupling_table(mode, params, grid)
        n = grid.n_modes
        size = state_size(n)
        self.n_modes = n
        self.size = size
        self.g_t = np.empty(n, dtype=np.complex128)
        self.gc_t = np.empty(n, dtype=np.complex128)
        # split re/im copies feeding the vectorized pair kernel
        self.g_re = np.empty(n, dtype=np.float64)
        self.g_im = np.empty(n, dtype=np.float64)
        self.b_re = np.empty(n, dtype=np.float64)
        self.b_im = np.empty(n, dtype=np.float64)
        self.v_re = np.empty(n, dtype=np.float64)
        self.v_im = np.empty(n, dtype=np.float64)
        self.stage = [np.empty(size, dtype=np.complex128) for _ in range(4)]
        self.ytmp = np.empty(size, dtype=np.complex128)
        self.yout = np.empty(size, dtype=np.complex128)
        self.max_dt = _stability_bound(params, self.table)

    def couplings_at(self, t: float):
        np.multiply(self.table.g0, np.exp(1j * self.table.nu * t), out=self.g_t)
        np.conjugate(self.g_t, out=self.gc_t)
        return self.g_t, self.gc_t


def _stability_bound(params: SystemParams, table: CouplingTable) -> float:
    fastest = max(
        abs(params.Delta),
        abs(params.delta),
        params.g1,
        params.g2,
        params.gamma,
        table.max_phase_rate,
    )
    return 0.05 / fastest if fastest > 0 else math.inf


def _derivative_into(y: np.ndarray, t: float, ws: DerivativeWorkspace,
                     out: np.ndarray) -> None:
    p = ws.params
    n = ws.n_modes
    g_t, gc_t = ws.couplings_at(t)

    o = N_SCALARS
    gg0k = y[o:o + n]
    ge0k = y[o + n:o + 2 * n]
    eg0k = y[o + 2 * n:o + 3 * n]
    gg1k = y[o + 3 * n:o + 4 * n]
    pairs = y[o + 4 * n:]

    s_gg0k, s_ge0k, s_eg0k, s_gg1k = _kernels.four_dots(
        g_t, gg0k, ge0k, eg0k, gg1k
    )

    d_pairs = out[o + 4 * n:]
    np.copyto(ws.g_re, g_t.real)
    np.copyto(ws.g_im, g_t.imag)
    np.copyto(ws.b_re, gg1k.real)
    np.copyto(ws.b_im, gg1k.imag)
    ws.v_re.fill(0.0)
    ws.v_im.fill(0.0)
    _kernels.pair_fused(
        pairs.view(np.float64), d_pairs.view(np.float64),
        ws.g_re, ws.g_im, ws.b_re, ws.b_im, ws.v_re, ws.v_im, n,
    )

    gg00 = y[I_GG00]
    ge00 = y[I_GE00]
    eg00 = y[I_EG00]
    ee00 = y[I_EE00]
    gg10 = y[I_GG10]
    ge10 = y[I_GE10]
    eg10 = y[I_EG10]
    gg20 = y[I_GG20]

    delta = p.delta
    Delta = p.Delta
    g1 = p.g1
    g2 = p.g2
    eps = p.epsilon
    hg = 0.5 * p.gamma

    out[I_GG00] = 0.0  # frozen vacuum amplitude
    out[I_GE00] = -1j * (delta * ge00 + g2 * gg10 + eps * ge10) - hg * ge00
    out[I_EG00] = -1j * (delta * eg00 + g1 * gg10 + eps * eg10) - hg * eg00
    out[I_EE00] = (
        -1j * (2.0 * delta * ee00 + g1 * ge10 + g2 * eg10) - p.gamma * ee00
    )
    out[I_GG10] = 1j * s_gg0k - 1j * (
        Delta * gg10 + g2 * ge00 + g1 * eg00 + eps * (gg00 + SQRT2 * gg20)
    )
    out[I_GE10] = (
        -1j * ((Delta + delta) * ge10 + SQRT2 * g2 * gg20 + g1 * ee00 + eps * ge00)
        - hg * ge10
        + 1j * s_ge0k
    )
    out[I_EG10] = (
        -1j * ((Delta + delta) * eg10 + g2 * ee00 + SQRT2 * g1 * gg20 + eps * eg00)
        - hg * eg10
        + 1j * s_eg0k
    )
    out[I_GG20] = (
        -1j * (
            2.0 * Delta * gg20
            + SQRT2 * g2 * ge10
            + SQRT2 * g1 * eg10
            + SQRT2 * eps * gg10
        )
        + 1j * SQRT2 * s_gg1k
    )

    d_gg0k = out[o:o + n]
    d_ge0k = out[o + n:o + 2 * n]
    d_eg0k = out[o + 2 * n:o + 3 * n]
    d_gg1k = out[o + 3 * n:o + 4 * n]

    np.multiply(gg1k, -1j * eps, out=d_gg0k)
    d_gg0k += (1j * gg10) * gc_t

    a_emit = -(1j * delta + hg)
    np.multiply(ge0k, a_emit, out=d_ge0k)
    d_ge0k += (-1j * g2) * gg1k
    d_ge0k += (1j * ge10) * gc_t

    np.multiply(eg0k, a_emit, out=d_eg0k)
    d_eg0k += (-1j * g1) * gg1k
    d_eg0k += (1j * eg10) * gc_t

    np.multiply(gg1k, -1j * Delta, out=d_gg1k)
    d_gg1k += (-1j * g2) * ge0k
    d_gg1k += (-1j * g1) * eg0k
    d_gg1k += (-1j * eps) * gg0k
    # += i * v with v accumulated in split buffers by the pair kernel
    d_gg1k.real -= ws.v_im
    d_gg1k.imag += ws.v_re
    d_gg1k += (1j * SQRT2 * gg20) * gc_t


def derivative(state: StateVector, t: float, params: SystemParams, grid: KGrid,
               mode: CouplingMode,
               workspace: DerivativeWorkspace | None = None) -> StateVector:
    """Time derivative of every amplitude at time t (closure form)."""
    ws = workspace or DerivativeWorkspace(params, grid, mode)
    out = StateVector(state.n_modes)
    _derivative_into(state.data, t, ws, out.data)
    return out


def _step_into(y: np.ndarray, t: float, h: float, ws: DerivativeWorkspace,
               out: np.ndarray) -> None:
    k1, k2, k3, k4 = ws.stage
    yt = ws.ytmp
    f64 = np.float64
    _derivative_into(y, t, ws, k1)
    _kernels.axpy(y.view(f64), 0.5 * h, k1.view(f64), yt.view(f64))
    _derivative_into(yt, t + 0.5 * h, ws, k2)
    _kernels.axpy(y.view(f64), 0.5 * h, k2.view(f64), yt.view(f64))
    _derivative_into(yt, t + 0.5 * h, ws, k3)
    _kernels.axpy(y.view(f64), h, k3.view(f64), yt.view(f64))
    _derivative_into(yt, t + h, ws, k4)
    _kernels.rk4_combine(y.view(f64), k1.view(f64), k2.view(f64),
                         k3.view(f64), k4.view(f64), h, out.view(f64))


def step_rk4(state: StateVector, t: float, dt: float, params: SystemParams,
             grid: KGrid, mode: CouplingMode,
             workspace: DerivativeWorkspace | None = None) -> StateVector:
    """One classical RK4 step; couplings are re-evaluated at the substage
    times, which keeps the explicitly time-dependent system at order four."""
    ws = workspace or DerivativeWorkspace(params, grid, mode)
    if dt <= 0:
        raise PhysicalDomainError("dt must be > 0")
    if dt > ws.max_dt * (1.0 + 1e-12):
        raise PhysicalDomainError(
            f"dt={dt:g} exceeds the stability bound {ws.max_dt:g} "
            "(0.05 / fastest rate)"
        )
    out = StateVector(state.n_modes)
    _step_into(state.data, t, dt, ws, out.data)
    if not out.all_finite():
        raise IntegrationDivergedError(
            f"non-finite amplitude after step at t={t:g}, dt={dt:g}", t=t, dt=dt
        )
    return out


def evolve(initial: StateVector, t_end: float, dt: float, params: SystemParams,
           grid: KGrid, mode: CouplingMode, observer=None, stride: int = 1,
           workspace: DerivativeWorkspace | None = None) -> StateVector:
    """Integrate from t = 0 to t_end with ceil(t_end / dt) uniform steps.

    ``observer(t, snapshot)`` is called at t = 0, every ``stride`` steps and
    at the final step; snapshots are read-only copies. Refuses to start when
    the grid recurrence horizon does not cover t_end.
    """
    if t_end <= 0:
        raise PhysicalDomainError("t_end must be > 0")
    if stride < 1:
        raise PhysicalDomainError("stride must be >= 1")
    if grid.t_recurrence <= t_end:
        raise GridTooCoarseError(
            f"recurrence horizon {grid.t_recurrence:g} <= t_end {t_end:g}; "
            "refusing to integrate into the revival regime"
        )
    ws = workspace or DerivativeWorkspace(params, grid, mode)
    if dt <= 0:
        raise PhysicalDomainError("dt must be > 0")
    if dt > ws.max_dt * (1.0 + 1e-12):
        raise PhysicalDomainError(
            f"dt={dt:g} exceeds the stability bound {ws.max_dt:g}"
        )
    n_steps = math.ceil(t_end / dt)
    h = t_end / n_steps

    cur = StateVector(initial.n_modes, initial.data.copy())
    nxt = StateVector(initial.n_modes, ws.yout)
    if observer is not None:
        observer(0.0, cur.snapshot())
    for step in range(1, n_steps + 1):
        t = (step - 1) * h
        _step_into(cur.data, t, h, ws, nxt.data)
        if not nxt.all_finite():
            raise IntegrationDivergedError(
                f"non-finite amplitude after step at t={t:g}, dt={h:g}",
                t=t, dt=h,
            )
        cur.data, nxt.data = nxt.data, cur.data
        if observer is not None and (step % stride == 0 or step == n_steps):
            observer(step * h, cur.snapshot())
    if cur.data is ws.yout:
        cur.data = cur.data.copy()
    return cur
