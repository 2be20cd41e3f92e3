"""Infinite and time-limited Gramians: dense oracles and the low-rank solver.

The dense routes solve the Lyapunov equations directly (or use the
exponential-difference identity for the time-limited Gramian of a stable
system). The large-scale route is a rational Krylov subspace method with
adaptive shift selection: the basis is grown by shifted solves until the
subspace approximation of exp(A t) B stops changing, then the projected
(time-limited) Lyapunov equation is solved and a factored residual norm
decides termination. A stability-preserving variant replaces the possibly
indefinite time-limited right-hand side by its absolute-eigenvalue
surrogate.
"""

import os
import time
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.spatial import ConvexHull, QhullError

from . import linalg
from .errors import (
    DegenerateHullError,
    MaxDimExceededError,
    NearDefectiveError,
    NoConvergenceError,
    OverflowRangeError,
    SingularShiftError,
    SpectrumConflictError,
    UnstableSystemError,
)
from .systems import (
    CholeskyTransform,
    DescriptorIndex1,
    GeneralizedSystem,
    StandardSystem,
    _dense,
    _is_sparse,
    cholesky_transform,
    eliminate_descriptor,
    shifted_solve,
    spectral_abscissa,
)

__all__ = [
    "TimeWindow",
    "SolverConfig",
    "KrylovWorkspace",
    "LowRankGramian",
    "dense_threshold",
    "gramian_infinite_dense",
    "gramian_timelimited_dense",
    "gramian_timelimited_cauchy",
    "adaptive_shift",
    "expm_action_approx",
    "modified_rhs",
    "residual_norm",
    "solve_infinite_lowrank",
    "solve_timelimited_lowrank",
    "solve_modified_lowrank",
    "factor_psd",
]


def dense_threshold():
    """Dimension cutoff for dense Gramian paths (TLBT_DENSE_THRESHOLD overrides)."""
    return int(os.environ.get("TLBT_DENSE_THRESHOLD", "1000"))


@dataclass
class TimeWindow:
    """Time interval [t_s, t_e] with 0 <= t_s < t_e < inf."""

    t_e: float
    t_s: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.t_s < self.t_e < np.inf):
            raise ValueError(f"need 0 <= t_s < t_e < inf, got [{self.t_s}, {self.t_e}]")


@dataclass
class SolverConfig:
    """Tolerances and limits for the low-rank Gramian solver.

    tol_f gates the matrix-exponential action (relative change between
    checks, Frobenius), tol_p the scaled Lyapunov residual (spectral).
    Projected quantities are only evaluated every ``cadence`` iterations.
    """

    tol_f: float = 1e-8
    tol_p: float = 1e-8
    cadence: int = 5
    max_dim: int | None = None
    trunc_tol: float = 1e-12

    def __post_init__(self):
        if not (0 < self.tol_f < 1 and 0 < self.tol_p < 1):
            raise ValueError("tolerances must lie in (0, 1)")
        if self.cadence < 1:
            raise ValueError("cadence must be >= 1")


@dataclass
class KrylovWorkspace:
    """Snapshot of the rational Arnoldi state.

    q: orthonormal basis (n x d); h: projection q^T A q; b_proj: q^T B
    with leading block beta; shifts: used shifts starting with inf;
    ritz: eigenvalues of h; k: completed iteration count.
    """

    q: np.ndarray
    h: np.ndarray
    b_proj: np.ndarray
    shifts: list
    ritz: np.ndarray = None
    k: int = 0

    @property
    def m(self):
        return self.b_proj.shape[1]

    @property
    def dim(self):
        return self.q.shape[1]

    def ritz_values(self):
        if self.ritz is None or len(self.ritz) != self.h.shape[0]:
            self.ritz = linalg.gen_eig(self.h, vectors=False).values
        return self.ritz


@dataclass
class LowRankGramian:
    """Low-rank factor Z with Z Z^T approximating a Gramian."""

    z: np.ndarray
    residual: float
    subspace_dim: int
    rank: int
    wall_time: float
    trace: list = field(default=None, repr=False)
    workspace: KrylovWorkspace = field(default=None, repr=False)


# ---------------------------------------------------------------------------
# dense paths


def _reach_form(sys, side):
    """System whose reachability Gramian is the requested one."""
    if side == "reachability":
        return sys
    if side == "observability":
        return sys.transposed()
    raise ValueError(f"side must be reachability|observability, got {side!r}")


def _dense_state_input(sys):
    """Dense (A, B) of the equivalent standard-form system."""
    if isinstance(sys, DescriptorIndex1):
        sys, _ = eliminate_descriptor(sys)
    if isinstance(sys, GeneralizedSystem):
        m = _dense(sys.M)
        a = np.linalg.solve(m, _dense(sys.A))
        b = np.linalg.solve(m, _dense(sys.B))
        return a, b
    return _dense(sys.A), _dense(sys.B)


def _guard_dense(n):
    lim = dense_threshold()
    if n > lim:
        raise ValueError(f"dense Gramian path refused for n={n} > threshold {lim}")


def gramian_infinite_dense(sys, side="reachability"):
    """Solve A P + P A^T = -B B^T densely (observability via duality)."""
    a, b = _dense_state_input(_reach_form(sys, side))
    _guard_dense(a.shape[0])
    return linalg.lyap_dense(a, b @ b.T)


def gramian_timelimited_dense(sys, window, side="reachability", route="auto"):
    """Dense time-limited Gramian over [t_s, t_e].

    route="difference" uses the stable-system identity
    P_T = e^{A t_s} P_inf e^{A^T t_s} - e^{A t_e} P_inf e^{A^T t_e};
    route="lyapunov" solves A P + P A^T = -B_s B_s^T + B_e B_e^T with
    B_t = e^{A t} B (valid for admissible unstable A as well);
    route="auto" picks by stability.
    """
    a, b = _dense_state_input(_reach_form(sys, side))
    _guard_dense(a.shape[0])
    if route == "auto":
        stable = float(np.max(linalg.gen_eig(a, vectors=False).values.real)) < 0
        route = "difference" if stable else "lyapunov"
    if route == "difference":
        p_inf = linalg.lyap_dense(a, b @ b.T)
        e_e = linalg.expm(a * window.t_e)
        p = p_inf - e_e @ p_inf @ e_e.T
        if window.t_s > 0:
            e_s = linalg.expm(a * window.t_s)
            p = e_s @ p_inf @ e_s.T - e_e @ p_inf @ e_e.T
    elif route == "lyapunov":
        b_s = linalg.expm(a * window.t_s) @ b if window.t_s > 0 else b
        b_e = linalg.expm(a * window.t_e) @ b
        p = linalg.lyap_dense(a, b_s @ b_s.T - b_e @ b_e.T)
    else:
        raise ValueError(f"unknown route {route!r}")
    return 0.5 * (p + p.T)


def gramian_timelimited_cauchy(diag, t_e):
    """Time-limited reachability Gramian from the eigencoordinate factorization.

    For a controllable, diagonalizable SISO system the Gramian is
    X_B (C - e^{L t} C e^{L^H t}) X_B^H with the Cauchy matrix
    C_ij = -1/(lam_i + conj(lam_j)). Rejects near-defective eigenbases.
    """
    if diag.cond_X > 1e8:
        raise NearDefectiveError(
            f"eigenvector condition {diag.cond_X:.2e} too large for the Cauchy route"
        )
    lam = diag.eigenvalues
    denom = lam[:, None] + np.conj(lam)[None, :]
    if np.min(np.abs(denom)) == 0.0:
        raise SpectrumConflictError("lambda_i + conj(lambda_j) = 0 in Cauchy matrix")
    cau = -1.0 / denom
    e = np.exp(lam * t_e)
    middle = cau - e[:, None] * cau * np.conj(e)[None, :]
    p = diag.X_B @ middle @ diag.X_B.conj().T
    scale = np.linalg.norm(p, "fro")
    if scale > 0 and np.linalg.norm(p.imag, "fro") > 1e-10 * scale:
        raise NearDefectiveError("Cauchy-route Gramian has a non-negligible imaginary part")
    p = p.real
    return 0.5 * (p + p.T)


def factor_psd(p, trunc_tol=1e-12):
    """Cholesky-like factor Z of a symmetric PSD matrix: Z Z^T ~= P."""
    eig = linalg.sym_eig(p)
    lam, vec = eig.values, eig.vectors
    if lam.size == 0:
        return np.zeros((p.shape[0], 0))
    keep = lam > trunc_tol * max(lam[0], 0.0)
    return vec[:, keep] * np.sqrt(lam[keep])[None, :]


# ---------------------------------------------------------------------------
# operator layer: engine coordinates vs original coordinates


class _Operator:
    """Engine view of a system: start block, action, shifted solves.

    The engine runs in coordinates where the state equation reads
    x' = A_eff x + b0 u; ``back_map`` returns factors to original
    coordinates and ``residual_maps`` provides (A T, M T) with
    T = back_map(basis) for residual evaluation in original coordinates.
    """

    def __init__(self, n, m, symmetric=False):
        self.n = n
        self.m = m
        self.symmetric = symmetric

    def matvec(self, v):
        raise NotImplementedError

    def resolve(self, s, v):
        raise NotImplementedError

    def back_map(self, z):
        return z

    def residual_maps(self, q):
        raise NotImplementedError


def _is_symmetric(a, tol=1e-12):
    if _is_sparse(a):
        d = (a - a.T).tocoo()
        num = np.linalg.norm(d.data) if d.nnz else 0.0
        scale = np.linalg.norm(a.tocoo().data) if a.nnz else 0.0
    else:
        num = np.linalg.norm(a - a.T, "fro")
        scale = np.linalg.norm(a, "fro")
    return num <= tol * max(scale, 1e-300)


class _StandardOp(_Operator):
    def __init__(self, sys):
        super().__init__(sys.n, sys.m, symmetric=_is_symmetric(sys.A))
        self.sys = sys
        self.b0 = _dense(sys.B)

    def matvec(self, v):
        return self.sys.A @ v

    def resolve(self, s, v):
        return shifted_solve(self.sys, s, v)

    def residual_maps(self, q):
        return self.sys.A @ q, q


class _CholeskyOp(_Operator):
    """SPD-M generalized system folded through its Cholesky factor."""

    def __init__(self, gen):
        self.ct = cholesky_transform(gen)
        std = self.ct.system
        super().__init__(std.n, std.m, symmetric=_is_symmetric(std.A))
        self.gen = gen
        self.b0 = std.B

    def matvec(self, v):
        return self.ct.system.A @ v

    def resolve(self, s, v):
        return shifted_solve(self.ct.system, s, v)

    def back_map(self, z):
        return self.ct.map_factor(z)

    def residual_maps(self, q):
        t = self.back_map(q)
        return self.gen.A @ t, self.gen.M @ t


class _MInvOp(_Operator):
    """Generalized system through the implicit M^{-1}A operator."""

    def __init__(self, gen):
        super().__init__(gen.n, gen.m, symmetric=False)
        self.gen = gen
        from .systems import _factor

        mat = sp.csc_matrix(gen.M) if _is_sparse(gen.M) else _dense(gen.M)
        self._msolve = _factor(mat, err=SingularShiftError)
        self.b0 = self._msolve(_dense(gen.B))

    def matvec(self, v):
        return self._msolve(self.gen.A @ v)

    def resolve(self, s, v):
        return shifted_solve(self.gen, s, self.gen.M @ v)

    def residual_maps(self, q):
        return self.gen.A @ q, self.gen.M @ q


class _DescriptorOp(_Operator):
    """Index-1 descriptor system through implicit block elimination."""

    def __init__(self, d):
        super().__init__(d.n_f, d.m, symmetric=False)
        self.d = d
        from .systems import _factor

        mat = sp.csc_matrix(d.M1) if _is_sparse(d.M1) else _dense(d.M1)
        self._m1solve = _factor(mat, err=SingularShiftError)
        b_hat = _dense(d.B1) - d.A2 @ d.a4_solve(_dense(d.B2))
        self.b0 = self._m1solve(np.asarray(b_hat))
        self._m1 = d.M1

    def matvec(self, v):
        return self._m1solve(np.asarray(self.d.schur_apply(v)))

    def resolve(self, s, v):
        return shifted_solve(self.d, s, self._m1 @ v)

    def residual_maps(self, q):
        return np.asarray(self.d.schur_apply(q)), self._m1 @ q


def _make_operator(sys):
    if isinstance(sys, DescriptorIndex1):
        return _DescriptorOp(sys)
    if isinstance(sys, GeneralizedSystem):
        # SPD mass folds through its Cholesky factor (dense at desk
        # scale); otherwise work on the implicit M^{-1}A operator
        if sys.spd and sys.n <= dense_threshold():
            return _CholeskyOp(sys)
        return _MInvOp(sys)
    if isinstance(sys, StandardSystem):
        return _StandardOp(sys)
    raise TypeError(f"unsupported system type {type(sys)!r}")


# ---------------------------------------------------------------------------
# adaptive shift selection


def _perturbed(point, scale):
    """Deterministic fallback shift near a degenerate candidate region."""
    s = point + 0.05 * max(abs(point), 0.1 * scale, 1e-8)
    return complex(max(s.real, 0.0), abs(s.imag))


def _hull_boundary(points, npts):
    """Sample npts points from the boundary of the convex hull of complex points."""
    xy = np.column_stack([points.real, points.imag])
    try:
        hull = ConvexHull(xy)
    except QhullError:
        # collinear: sample the segment between the two most distant points
        d0 = np.argmax(np.abs(points - points[0]))
        d1 = np.argmax(np.abs(points - points[d0]))
        return np.linspace(points[d0], points[d1], npts)
    verts = points[hull.vertices]
    edges = np.abs(np.roll(verts, -1) - verts)
    perim = edges.sum()
    out = []
    for i, v in enumerate(verts):
        w = verts[(i + 1) % len(verts)]
        cnt = max(int(round(npts * edges[i] / perim)), 2)
        out.append(np.linspace(v, w, cnt, endpoint=False))
    return np.concatenate(out)


def _select_shift(ritz, shifts, m, symmetric=False, npts=2000):
    """Next pole for the rational Krylov basis.

    Maximizes prod|s - z_j| / prod|s - s_j|^m over a discretized boundary
    of the convex hull of the mirrored Ritz values {-conj(z)}, excluding
    points too close to previous shifts (1e-8 relative) or to mirrored
    Ritz values (1e-12 relative). Complex results come back as the
    upper-half-plane representative of the conjugate pair.
    """
    ritz = np.asarray(ritz, dtype=complex)
    if ritz.size == 0:
        raise DegenerateHullError("no Ritz values available")
    scale = float(np.max(np.abs(ritz)))
    if scale == 0.0:
        scale = 1.0
    mirrored = -np.conj(ritz)
    uniq = np.unique(np.round(mirrored / scale, 14))
    if uniq.size == 1:
        return _perturbed(mirrored[0], scale)
    if symmetric or np.all(np.abs(mirrored.imag) <= 1e-12 * scale):
        lo, hi = mirrored.real.min(), mirrored.real.max()
        cand = np.linspace(lo, hi, npts).astype(complex)
    else:
        cand = _hull_boundary(mirrored, npts)
    cand = np.where(cand.real < 0, 1j * cand.imag, cand)
    keep = np.ones(cand.shape, dtype=bool)
    finite = [s for s in shifts if np.isfinite(s)]
    for s in finite:
        keep &= np.abs(cand - s) > 1e-8 * np.maximum(np.abs(cand), abs(s))
    for z in mirrored:
        keep &= np.abs(cand - z) > 1e-12 * np.maximum(np.abs(cand), abs(z))
    cand = cand[keep]
    if cand.size == 0:
        raise DegenerateHullError("all shift candidates excluded")
    with np.errstate(divide="ignore"):
        obj = np.sum(np.log(np.abs(cand[:, None] - ritz[None, :])), axis=1)
        for s in finite:
            obj -= m * np.log(np.abs(cand - s))
    s = cand[int(np.argmax(obj))]
    if abs(s.imag) <= 1e-12 * max(abs(s), scale):
        return float(s.real)
    return complex(s.real, abs(s.imag))


def adaptive_shift(ws):
    """Select the next shift for a workspace (see :func:`_select_shift`)."""
    symmetric = _is_symmetric(ws.h, tol=1e-12)
    try:
        return _select_shift(ws.ritz_values(), ws.shifts, ws.m, symmetric=symmetric)
    except DegenerateHullError:
        mirrored = -np.conj(ws.ritz_values()[0])
        return _perturbed(mirrored, max(float(np.max(np.abs(ws.ritz_values()))), 1.0))


# ---------------------------------------------------------------------------
# projected quantities


def expm_action_approx(ws, t):
    """Galerkin approximation of e^{A t} B from the workspace.

    Returns (coefficients e^{H t} q^T B, lifted n x m approximation).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    coeff = linalg.expm(ws.h * t) @ ws.b_proj if t > 0 else ws.b_proj.copy()
    return coeff, ws.q @ coeff


def _abs_eig_factor(w_sym, tol=1e-12):
    """Factor F with F F^T = sum |lambda_i| v_i v_i^T of a symmetric matrix."""
    eig = linalg.sym_eig(w_sym)
    lam, vec = eig.values, eig.vectors
    if lam.size == 0:
        return np.zeros((w_sym.shape[0], 0))
    scale = float(np.max(np.abs(lam)))
    if scale == 0.0:
        return np.zeros((w_sym.shape[0], 0))
    keep = np.abs(lam) > tol * scale
    return vec[:, keep] * np.sqrt(np.abs(lam[keep]))[None, :]


def modified_rhs(ws, window):
    """Coefficient factor of the stability-preserving surrogate right-hand side.

    Eigendecomposes the projected time-limited inhomogeneity
    b_s b_s^T - b_e b_e^T (b_t = e^{H t} q^T B) and takes absolute values
    of the nonzero eigenvalues; at most 2m columns.
    """
    b_s = expm_action_approx(ws, window.t_s)[0] if window.t_s > 0 else ws.b_proj
    b_e = expm_action_approx(ws, window.t_e)[0]
    return _abs_eig_factor(b_s @ b_s.T - b_e @ b_e.T)


def residual_norm(sys, ws, y, rhs_factors):
    """Scaled Lyapunov residual of the lifted candidate solution.

    ``rhs_factors`` is a list of (coefficient_factor, sign) pairs in
    workspace coordinates; the right-hand side of the equation is
    -(sum sign * (Q F)(Q F)^T) mapped to original coordinates. Computed
    from a thin factored representation (one A-application per basis
    column), spectral norm, scaled by the right-hand-side norm.
    """
    op = _make_operator(sys)
    w_proj = np.zeros((ws.dim, ws.dim))
    for f, sign in rhs_factors:
        w_proj += sign * (f @ f.T)
    return _factored_residual(op, ws.q, y, w_proj)


def _factored_residual(op, q, y, w_proj):
    """mu = ||A X M^T + M X A^T + G||/||G|| with X = T Y T^T lifted from q."""
    at, mt = op.residual_maps(q)
    d = q.shape[1]
    u = np.hstack([np.asarray(at), np.asarray(mt)])
    ru = np.linalg.qr(u, mode="r")
    k = np.zeros((2 * d, 2 * d))
    k[:d, d:] = y
    k[d:, :d] = y
    k[d:, d:] = w_proj
    core = ru @ k @ ru.T
    num = float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (core + core.T)))))
    rhs_core = ru[:, d:] @ w_proj @ ru[:, d:].T
    den = float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (rhs_core + rhs_core.T)))))
    if den == 0.0:
        return num
    return num / den


# ---------------------------------------------------------------------------
# the rational Krylov solver


def _require_stable(sys):
    n = sys.n_f if isinstance(sys, DescriptorIndex1) else sys.n
    if n > dense_threshold():
        warnings.warn(
            "system too large for dense stability verification; proceeding unverified",
            stacklevel=3,
        )
        return
    ab = spectral_abscissa(sys)
    if ab >= 0:
        warnings.warn(
            f"system is not asymptotically stable (spectral abscissa {ab:.3e})",
            stacklevel=3,
        )
        raise UnstableSystemError(
            "low-rank Krylov path requires a stable system; use the dense route"
        )


def _small_lyap(h, w):
    """Projected Lyapunov solve H Y + Y H^T = -W, symmetrized."""
    return linalg.lyap_dense(h, w)


def _solve_lowrank(sys, window, cfg, mode, side):
    """Shared driver behind the three low-rank Gramian solvers."""
    cfg = cfg or SolverConfig()
    _require_stable(sys)
    t0 = time.perf_counter()
    op = _make_operator(_reach_form(sys, side))
    n, m = op.n, op.m

    b = np.atleast_2d(op.b0.astype(float))
    q = linalg.orthonormal_extend(np.zeros((n, 0)), b)
    if q.shape[1] == 0:
        raise ValueError("input factor B is numerically zero")
    aq = np.asarray(op.matvec(q))
    shifts = [np.inf]
    last_block = q
    max_dim = min(n, cfg.max_dim) if cfg.max_dim else min(n, 600)

    trace = []
    prev_lift = {}
    k = 0
    since_check = 0
    stagnant = 0
    force_check = q.shape[1] >= n
    mu = np.inf
    f_change = np.inf

    def run_check(ws):
        """Returns (converged, y, rhs_coeff_factors, f_change, mu)."""
        nonlocal prev_lift
        d = ws.dim
        exact_space = d >= n
        f_changes = []
        coeffs = {}
        if mode != "infinite":
            times = [("e", window.t_e)] + ([("s", window.t_s)] if window.t_s > 0 else [])
            for key, t in times:
                try:
                    coeff, lifted = expm_action_approx(ws, t)
                except OverflowRangeError:
                    return False, None, None, np.inf, np.inf
                coeffs[key] = coeff
                bnorm = np.linalg.norm(b)
                cur = np.linalg.norm(lifted)
                diff = np.linalg.norm(lifted - prev_lift[key]) if key in prev_lift else np.inf
                prev_lift[key] = lifted
                if cur <= 1e-14 * bnorm and (diff <= 1e-14 * bnorm or not np.isfinite(diff)):
                    f_changes.append(0.0)
                elif np.isfinite(diff):
                    f_changes.append(diff / max(cur, 1e-300))
                else:
                    f_changes.append(np.inf)
        fch = max(f_changes) if f_changes else 0.0
        if not exact_space and fch >= cfg.tol_f:
            return False, None, None, fch, np.inf
        # projected right-hand side
        b_s = coeffs.get("s", ws.b_proj)
        if mode == "infinite":
            rhs_factors = [(ws.b_proj, +1)]
        elif mode == "timelimited":
            rhs_factors = [(b_s, +1), (coeffs["e"], -1)]
        else:  # modified
            f_mod = _abs_eig_factor(b_s @ b_s.T - coeffs["e"] @ coeffs["e"].T)
            rhs_factors = [(f_mod, +1)]
        w_proj = np.zeros((d, d))
        for f, sign in rhs_factors:
            w_proj += sign * (f @ f.T)
        try:
            y = _small_lyap(ws.h, w_proj)
        except SpectrumConflictError:
            return False, None, None, fch, np.inf
        mu_k = _factored_residual(op, ws.q, y, w_proj)
        return mu_k < cfg.tol_p, y, rhs_factors, fch, mu_k

    y = None
    while True:
        d = q.shape[1]
        ws = KrylovWorkspace(q=q, h=q.T @ aq, b_proj=q.T @ b, shifts=list(shifts), k=k)
        scheduled = since_check >= cfg.cadence
        if scheduled or force_check or d >= n:
            converged, y, rhs_factors, f_change, mu = run_check(ws)
            since_check = 0
            force_check = False
            trace.append(
                {
                    "k": k,
                    "shift": shifts[-1] if len(shifts) > 1 else np.inf,
                    "dim": d,
                    "f_change": f_change,
                    "mu": mu,
                }
            )
            if converged:
                break
        if d >= max_dim:
            converged, y, rhs_factors, f_change, mu = run_check(ws)
            if converged:
                trace.append(
                    {"k": k, "shift": shifts[-1], "dim": d, "f_change": f_change, "mu": mu}
                )
                break
            raise MaxDimExceededError(
                f"subspace cap {max_dim} reached (dim {d}, mu {mu:.3e}, "
                f"expm change {f_change:.3e})"
            )
        # grow the basis
        try:
            s = _select_shift(ws.ritz_values(), shifts, m, symmetric=op.symmetric)
        except DegenerateHullError:
            s = _perturbed(-np.conj(ws.ritz_values()[0]), float(np.max(np.abs(ws.ritz_values()))) or 1.0)
        try:
            g = op.resolve(s, last_block)
        except SingularShiftError:
            s = _perturbed(complex(s), max(abs(complex(s)), 1.0))
            g = op.resolve(s, last_block)  # second failure propagates
        g = np.asarray(g)
        is_complex = np.iscomplexobj(g) and abs(np.imag(complex(s))) > 0
        before = q.shape[1]
        q = linalg.orthonormal_extend(q, g.real)
        k += 1
        since_check += 1
        shifts.append(complex(s) if is_complex else float(np.real(s)))
        if is_complex:
            q = linalg.orthonormal_extend(q, g.imag)
            shifts.append(np.conj(complex(s)))
            k += 1
            since_check += 1
        added = q.shape[1] - before
        if added:
            new_cols = q[:, before:]
            aq = np.hstack([aq, np.asarray(op.matvec(new_cols))])
            last_block = q[:, -min(m, q.shape[1]):]
            stagnant = 0
        else:
            stagnant += 1
            force_check = True
            if stagnant > 2:
                raise NoConvergenceError(
                    f"rational Krylov basis stagnated at dim {q.shape[1]} (mu {mu:.3e})"
                )

    # eigendecompose and truncate
    eig = linalg.sym_eig(y)
    lam, vec = eig.values, eig.vectors
    lead = max(lam[0], 0.0) if lam.size else 0.0
    keep = lam > cfg.trunc_tol * max(lead, 1e-300)
    z_coeff = vec[:, keep] * np.sqrt(lam[keep])[None, :]
    z = np.asarray(op.back_map(ws.q @ z_coeff))
    ws.ritz = None
    return LowRankGramian(
        z=z,
        residual=float(mu),
        subspace_dim=int(ws.dim),
        rank=int(z.shape[1]),
        wall_time=time.perf_counter() - t0,
        trace=trace,
        workspace=ws,
    )


def solve_infinite_lowrank(sys, cfg=None, side="reachability"):
    """Low-rank factor of the infinite Gramian by the rational Krylov method."""
    return _solve_lowrank(sys, None, cfg, "infinite", side)


def solve_timelimited_lowrank(sys, window, cfg=None, side="reachability"):
    """Low-rank factor of the time-limited Gramian over [t_s, t_e]."""
    return _solve_lowrank(sys, window, cfg, "timelimited", side)


def solve_modified_lowrank(sys, window, cfg=None, side="reachability"):
    """Low-rank factor of the stability-preserving modified Gramian."""
    return _solve_lowrank(sys, window, cfg, "modified", side)
