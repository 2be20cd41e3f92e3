"""Time-domain validation: implicit midpoint integration and error metrics.

The integrator is the A-stable implicit midpoint rule with a fixed step;
the step matrix is factorized once and reused. Impulse responses are
computed by integrating the uncontrolled system from the initial state
B v (M x0 = B v for generalized systems), never by sampling a delta on
the grid.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import GridMismatchError, SingularMatrixError, SingularStepError, ZeroVectorError
from .systems import (
    DescriptorIndex1,
    GeneralizedSystem,
    StandardSystem,
    _dense,
    _factor,
    eliminate_descriptor,
    spectral_abscissa,
)

__all__ = [
    "Trajectory",
    "InputSignal",
    "impulse_input",
    "step_input",
    "custom_input",
    "implicit_midpoint",
    "impulse_response",
    "relative_error_series",
    "mac",
    "mac_matrix",
    "half_decay_time",
]


@dataclass
class Trajectory:
    """Sampled output y(t_k) on a uniform grid (optionally with states)."""

    times: np.ndarray
    outputs: np.ndarray
    states: np.ndarray = None

    @property
    def dt(self):
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    def output_norms(self):
        return np.linalg.norm(self.outputs, axis=1)


@dataclass
class InputSignal:
    """Control signal: impulse (via initial condition), constant, or callable."""

    kind: str
    vector: np.ndarray = None
    fn: object = None

    def sample(self, t, m):
        if self.kind == "impulse":
            return np.zeros(m)
        if self.kind == "constant":
            v = np.asarray(1.0 if self.vector is None else self.vector, dtype=float)
            return np.full(m, float(v)) if v.ndim == 0 else v.reshape(m)
        return np.asarray(self.fn(t), dtype=float).reshape(m)


def impulse_input(v=None):
    """Impulse u(t) = delta(t) v; realized as x0 = B v by the integrator."""
    return InputSignal(kind="impulse", vector=None if v is None else np.asarray(v, dtype=float))


def step_input(c=1.0):
    """Constant input u(t) = c * ones_m (or the given vector)."""
    return InputSignal(kind="constant", vector=np.asarray(c, dtype=float))


def custom_input(fn):
    return InputSignal(kind="custom", fn=fn)


def _simulatable(sys):
    """(M or None, A, B, C, D) of the system in integrable form."""
    if hasattr(sys, "to_system"):
        sys = sys.to_system()
    if isinstance(sys, DescriptorIndex1):
        gen, _ = eliminate_descriptor(sys)
        return _dense(gen.M), _dense(gen.A), gen.B, gen.C, gen.D
    if isinstance(sys, GeneralizedSystem):
        return sys.M, sys.A, _dense(sys.B), _dense(sys.C), sys.D
    if isinstance(sys, StandardSystem):
        return None, sys.A, _dense(sys.B), _dense(sys.C), sys.D
    raise TypeError(f"unsupported system type {type(sys)!r}")


def implicit_midpoint(sys, u, x0, dt, t_f, store_states=False):
    """Integrate M x' = A x + B u from x(0) = x0 with the midpoint rule.

    One step solves (M - dt/2 A) x_{k+1} = (M + dt/2 A) x_k + dt B u(t_k + dt/2);
    outputs are y_k = C x_k + D u(t_k). Second-order accurate,
    unconditionally stable on stable linear systems.
    """
    if dt <= 0 or t_f <= 0:
        raise ValueError("dt and t_f must be positive")
    m_mat, a, b, c, d = _simulatable(sys)
    n, m = b.shape
    if m_mat is None:
        m_mat = sp.identity(n, format="csc") if sp.issparse(a) else np.eye(n)
    minus = m_mat - (dt / 2.0) * a
    plus = m_mat + (dt / 2.0) * a
    step_solve = _factor(minus, err=SingularStepError)
    nsteps = int(np.ceil(t_f / dt - 1e-9))
    times = dt * np.arange(nsteps + 1)
    x = np.zeros(n) if x0 is None else np.asarray(x0, dtype=float).reshape(n)
    u = u if u is not None else InputSignal(kind="impulse")
    outputs = np.empty((nsteps + 1, c.shape[0]))
    states = np.empty((nsteps + 1, n)) if store_states else None
    for k in range(nsteps + 1):
        outputs[k] = c @ x + d @ u.sample(times[k], m)
        if store_states:
            states[k] = x
        if k < nsteps:
            rhs = plus @ x + dt * (b @ u.sample(times[k] + dt / 2.0, m))
            x = step_solve(rhs)
    if not np.all(np.isfinite(outputs)):
        raise SingularStepError("integration produced non-finite values")
    return Trajectory(times=times, outputs=outputs, states=states)


def impulse_response(sys, v=None, dt=1e-3, t_f=1.0, store_states=False):
    """Response to u(t) = delta(t) v (default v = ones): y(t) = C e^{At} B v."""
    m_mat, a, b, c, d = _simulatable(sys)
    vv = np.ones(b.shape[1]) if v is None else np.asarray(v, dtype=float).reshape(b.shape[1])
    rhs = b @ vv
    if m_mat is None:
        x0 = rhs
    else:
        x0 = _factor(m_mat, err=SingularMatrixError)(rhs)
    if hasattr(sys, "to_system"):
        sys = sys.to_system()
    return implicit_midpoint(sys, impulse_input(vv), x0, dt, t_f, store_states=store_states)


def relative_error_series(y, y_red, window=None):
    """Pointwise relative output error and its maximum over the window.

    E(t) = ||y(t) - y_r(t)|| / ||y(t)||; grid points where both responses
    vanish give 0, points where only the reference vanishes give inf.
    """
    if y.times.shape != y_red.times.shape or not np.allclose(
        y.times, y_red.times, rtol=0, atol=1e-12 * max(y.dt, 1e-30)
    ):
        raise GridMismatchError("trajectories are on different time grids")
    ref = np.linalg.norm(y.outputs, axis=1)
    diff = np.linalg.norm(y.outputs - y_red.outputs, axis=1)
    err = np.zeros_like(ref)
    tiny = ref <= 1e-300
    err[~tiny] = diff[~tiny] / ref[~tiny]
    err[tiny & (diff > 1e-300)] = np.inf
    if window is None:
        mask = np.ones(y.times.shape, dtype=bool)
    else:
        mask = (y.times >= window.t_s - 1e-12) & (y.times <= window.t_e + 1e-12)
    e_max = float(np.max(err[mask])) if np.any(mask) else 0.0
    return err, e_max


def mac(x, y):
    """Modal assurance criterion |y^T x|^2 / (||x||^2 ||y||^2) in [0, 1]."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    nx, ny = np.dot(x, x), np.dot(y, y)
    if nx == 0.0 or ny == 0.0:
        raise ZeroVectorError("MAC requires nonzero vectors")
    return float(np.dot(y, x) ** 2 / (nx * ny))


def mac_matrix(x_cols, y_cols):
    """MAC between all column pairs of two matrices."""
    x_cols = np.atleast_2d(x_cols)
    y_cols = np.atleast_2d(y_cols)
    out = np.empty((x_cols.shape[1], y_cols.shape[1]))
    for i in range(x_cols.shape[1]):
        for j in range(y_cols.shape[1]):
            out[i, j] = mac(x_cols[:, i], y_cols[:, j])
    return out


def half_decay_time(sys):
    """Impulse-response half-decay proxy ln(2)/|spectral abscissa|."""
    ab = spectral_abscissa(sys)
    if ab >= 0:
        raise ValueError("half decay time is only defined for stable systems")
    return float(np.log(2.0) / abs(ab))
