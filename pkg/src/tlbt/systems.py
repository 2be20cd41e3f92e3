"""LTI system representations and structural transformations.

Standard (A, B, C[, D]) systems, generalized (M, A, B, C[, D]) systems
with nonsingular M, and semi-explicit index-one descriptor systems in
block form. Matrices can be dense ndarrays or scipy.sparse matrices;
descriptor block elimination is exposed both densely (small systems) and
implicitly through actions and shifted solves, since the eliminated state
matrix is dense in general.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import linalg
from .errors import (
    NotSpdError,
    SingularBlockError,
    SingularMatrixError,
    SingularShiftError,
    SingularTransformError,
)

__all__ = [
    "StandardSystem",
    "GeneralizedSystem",
    "DescriptorIndex1",
    "DiagonalizedSystem",
    "diagonalize",
    "eliminate_descriptor",
    "shifted_solve",
    "cholesky_transform",
    "CholeskyTransform",
    "similarity_transform",
    "spectral_abscissa",
    "alpha_shift",
]

#: below this total dimension, sparse block systems may be densified freely
DENSE_FALLBACK = 500


def _is_sparse(a):
    return sp.issparse(a)


def _dense(a):
    return a.toarray() if _is_sparse(a) else np.asarray(a, dtype=float)


def _shape(a):
    return a.shape


@dataclass
class StandardSystem:
    """State-space system ``x' = A x + B u``, ``y = C x + D u``."""

    A: object
    B: object
    C: object
    D: object = None

    def __post_init__(self):
        n, n2 = _shape(self.A)
        if n != n2:
            raise ValueError("A must be square")
        if _shape(self.B)[0] != n or _shape(self.C)[1] != n:
            raise ValueError("B/C dimensions inconsistent with A")
        if not _is_sparse(self.A):
            self.A = linalg.check_finite(np.asarray(self.A, dtype=float), "A")
        if not _is_sparse(self.B):
            self.B = linalg.check_finite(np.atleast_2d(np.asarray(self.B, dtype=float)), "B")
        if not _is_sparse(self.C):
            self.C = linalg.check_finite(np.atleast_2d(np.asarray(self.C, dtype=float)), "C")
        if self.D is None:
            self.D = np.zeros((_shape(self.C)[0], _shape(self.B)[1]))
        else:
            self.D = linalg.check_finite(np.atleast_2d(np.asarray(self.D, dtype=float)), "D")
        if self.D.shape != (self.p, self.m):
            raise ValueError("D must be p x m")

    @property
    def n(self):
        return _shape(self.A)[0]

    @property
    def m(self):
        return _shape(self.B)[1]

    @property
    def p(self):
        return _shape(self.C)[0]

    def transposed(self):
        """Dual system (A^T, C^T, B^T); swaps reachability and observability."""
        return StandardSystem(self.A.T, _dense(self.C).T, _dense(self.B).T, self.D.T)


@dataclass
class GeneralizedSystem:
    """Generalized state-space system ``M x' = A x + B u``, ``y = C x + D u``.

    ``spd`` flags M as symmetric positive definite (verified on demand by
    :func:`cholesky_transform`).
    """

    M: object
    A: object
    B: object
    C: object
    D: object = None
    spd: bool = False

    def __post_init__(self):
        n, n2 = _shape(self.M)
        if n != n2 or _shape(self.A) != (n, n):
            raise ValueError("M and A must be square of equal size")
        if _shape(self.B)[0] != n or _shape(self.C)[1] != n:
            raise ValueError("B/C dimensions inconsistent with A")
        if not _is_sparse(self.B):
            self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        if not _is_sparse(self.C):
            self.C = np.atleast_2d(np.asarray(self.C, dtype=float))
        if self.D is None:
            self.D = np.zeros((_shape(self.C)[0], _shape(self.B)[1]))
        else:
            self.D = np.atleast_2d(np.asarray(self.D, dtype=float))

    @property
    def n(self):
        return _shape(self.A)[0]

    @property
    def m(self):
        return _shape(self.B)[1]

    @property
    def p(self):
        return _shape(self.C)[0]

    def transposed(self):
        return GeneralizedSystem(
            self.M.T, self.A.T, _dense(self.C).T, _dense(self.B).T, self.D.T, spd=self.spd
        )


@dataclass
class DescriptorIndex1:
    """Semi-explicit index-one descriptor system in block form.

    ``M = [[M1, 0], [0, 0]]``, ``A = [[A1, A2], [A3, A4]]`` with M1 and A4
    nonsingular; B, C split conformably. ``n_f`` differential states.
    """

    M1: object
    A1: object
    A2: object
    A3: object
    A4: object
    B1: object
    B2: object
    C1: object
    C2: object
    _a4_solve: object = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        nf = _shape(self.A1)[0]
        na = _shape(self.A4)[0]
        if _shape(self.M1) != (nf, nf) or _shape(self.A1) != (nf, nf):
            raise ValueError("M1/A1 must be n_f x n_f")
        if _shape(self.A2) != (nf, na) or _shape(self.A3) != (na, nf) or _shape(self.A4) != (na, na):
            raise ValueError("off-diagonal blocks inconsistent")
        if _shape(self.B1)[0] != nf or _shape(self.B2)[0] != na:
            raise ValueError("B blocks inconsistent")
        if _shape(self.C1)[1] != nf or _shape(self.C2)[1] != na:
            raise ValueError("C blocks inconsistent")

    @property
    def n_f(self):
        return _shape(self.A1)[0]

    @property
    def n(self):
        return self.n_f + _shape(self.A4)[0]

    @property
    def m(self):
        return _shape(self.B1)[1]

    @property
    def p(self):
        return _shape(self.C1)[0]

    def transposed(self):
        return DescriptorIndex1(
            self.M1.T, self.A1.T, self.A3.T, self.A2.T, self.A4.T,
            _dense(self.C1).T, _dense(self.C2).T, _dense(self.B1).T, _dense(self.B2).T,
        )

    def a4_solve(self, rhs):
        """Solve ``A4 x = rhs`` with a cached factorization."""
        if self._a4_solve is None:
            use_sparse = _is_sparse(self.A4) or self.n >= DENSE_FALLBACK
            mat = sp.csc_matrix(self.A4) if use_sparse else _dense(self.A4)
            self._a4_solve = _factor(mat, err=SingularBlockError)
        return self._a4_solve(np.asarray(rhs))

    def schur_apply(self, v):
        """Action of the eliminated state matrix  A1 - A2 A4^{-1} A3."""
        v = np.asarray(v)
        return self.A1 @ v - self.A2 @ self.a4_solve(self.A3 @ v)

    def assemble(self):
        """Full (M, A, B, C) matrices of the blocked pencil (sparse)."""
        nf, na = self.n_f, self.n - self.n_f
        m_full = sp.bmat(
            [[sp.csc_matrix(self.M1), None], [None, sp.csc_matrix((na, na))]], format="csc"
        )
        a_full = sp.bmat(
            [
                [sp.csc_matrix(self.A1), sp.csc_matrix(self.A2)],
                [sp.csc_matrix(self.A3), sp.csc_matrix(self.A4)],
            ],
            format="csc",
        )
        b_full = np.vstack([_dense(self.B1), _dense(self.B2)])
        c_full = np.hstack([_dense(self.C1), _dense(self.C2)])
        return m_full, a_full, b_full, c_full


@dataclass
class DiagonalizedSystem:
    """Eigencoordinate form of a SISO system: ``A = X diag(lam) X^{-1}``.

    ``w = X^{-1} B`` and ``X_B = X diag(w)``; every ``w_i`` must be nonzero
    (controllability in eigencoordinates).
    """

    eigenvalues: np.ndarray
    X: np.ndarray
    w: np.ndarray
    X_B: np.ndarray

    @property
    def cond_X(self):
        return np.linalg.cond(self.X)


def diagonalize(sys):
    """Build the eigencoordinate form of a SISO :class:`StandardSystem`."""
    if sys.m != 1:
        raise ValueError("diagonalization path requires m = 1")
    eig = linalg.gen_eig(_dense(sys.A))
    x = eig.vectors
    w = linalg.lu_solve(x, _dense(sys.B)[:, 0].astype(complex))
    if np.min(np.abs(w)) <= 1e-14 * np.max(np.abs(w)):
        raise ValueError("system is numerically uncontrollable in eigencoordinates")
    return DiagonalizedSystem(eigenvalues=eig.values, X=x, w=w, X_B=x * w[None, :])


def eliminate_descriptor(d):
    """Eliminate algebraic states: returns (GeneralizedSystem, D).

    Dense construction; intended for systems at desk scale (the eliminated
    state matrix is dense in general). Large systems should go through
    :func:`shifted_solve` / :meth:`DescriptorIndex1.schur_apply` instead.
    """
    a2 = _dense(d.A2)
    b2 = _dense(d.B2)
    a3 = _dense(d.A3)
    c2 = _dense(d.C2)
    a4_inv_a3 = np.asarray(d.a4_solve(a3))
    a4_inv_b2 = np.asarray(d.a4_solve(b2))
    a_hat = _dense(d.A1) - a2 @ a4_inv_a3
    b_hat = _dense(d.B1) - a2 @ a4_inv_b2
    c_hat = _dense(d.C1) - c2 @ a4_inv_a3
    d_term = -c2 @ a4_inv_b2
    gen = GeneralizedSystem(_dense(d.M1), a_hat, b_hat, c_hat, D=d_term)
    return gen, d_term


def _factor(mat, err=SingularShiftError):
    """LU factorization returning a solve closure; sparse or dense, any dtype."""
    if _is_sparse(mat):
        try:
            lu = spla.splu(sp.csc_matrix(mat))
        except RuntimeError as exc:
            raise err(f"matrix factorization failed: {exc}") from exc
        def solve(rhs):
            out = lu.solve(np.asarray(rhs))
            if not np.all(np.isfinite(out)):
                raise err("matrix is numerically singular")
            return out
        return solve
    mat = np.asarray(mat)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            lu_piv = sla.lu_factor(mat, check_finite=False)
    except ValueError as exc:
        raise err(f"matrix factorization failed: {exc}") from exc
    pivots = np.abs(np.diag(lu_piv[0]))
    if np.min(pivots) <= np.finfo(float).eps * max(np.linalg.norm(mat, 1), 1e-300):
        raise err("matrix is numerically singular")
    return lambda rhs: sla.lu_solve(lu_piv, np.asarray(rhs), check_finite=False)


def shifted_solve(sys, s, w):
    """Solve the shifted system for the rational Krylov engine.

    Standard: ``(A - s I) V = W``; generalized: ``(A - s M) V = W``;
    descriptor: the sparse augmented system ``(A - s M)[V; Psi] = [W; 0]``
    returning the leading ``n_f`` rows (equal to the dense eliminated
    solve ``(A_hat - s M1)^{-1} W``).
    """
    w = np.asarray(w)
    rhs = w if w.ndim == 2 else w[:, None]
    complex_shift = bool(np.iscomplexobj(np.asarray(s))) and abs(np.imag(s)) > 0
    if isinstance(sys, DescriptorIndex1):
        m_full, a_full, _, _ = sys.assemble()
        shifted = a_full - s * m_full if complex_shift else a_full - np.real(s) * m_full
        rhs_full = np.vstack([rhs, np.zeros((sys.n - sys.n_f, rhs.shape[1]), dtype=rhs.dtype)])
        if sys.n < DENSE_FALLBACK and not complex_shift:
            sol = _factor(_dense(shifted))(rhs_full)
        else:
            sol = _factor(sp.csc_matrix(shifted, dtype=complex if complex_shift else float))(rhs_full)
        out = sol[: sys.n_f]
    elif isinstance(sys, GeneralizedSystem):
        shifted = sys.A - s * sys.M
        out = _factor(shifted)(rhs)
    elif isinstance(sys, StandardSystem):
        if _is_sparse(sys.A):
            shifted = sys.A - s * sp.identity(sys.n, format="csc")
        else:
            shifted = sys.A - s * np.eye(sys.n)
        out = _factor(shifted)(rhs)
    else:
        raise TypeError(f"unsupported system type {type(sys)!r}")
    return out if w.ndim == 2 else out[:, 0]


@dataclass
class CholeskyTransform:
    """Result of :func:`cholesky_transform`: transformed system plus L.

    Gramian factors computed for the transformed standard system map back
    to generalized coordinates via ``map_factor`` (Z = L^{-T} Z_std).
    """

    system: StandardSystem
    L: np.ndarray

    def map_factor(self, z):
        return sla.solve_triangular(self.L.T, z, lower=False)


def cholesky_transform(g):
    """Fold SPD mass matrix into the system: (L^{-1}AL^{-T}, L^{-1}B, CL^{-T})."""
    m = _dense(g.M)
    if np.linalg.norm(m - m.T, "fro") > 1e-10 * max(np.linalg.norm(m, "fro"), 1e-300):
        raise NotSpdError("M is not symmetric")
    try:
        l = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise NotSpdError(f"M is not positive definite: {exc}") from exc
    a = _dense(g.A)
    a_t = sla.solve_triangular(l, sla.solve_triangular(l, a.T, lower=True).T, lower=True)
    b_t = sla.solve_triangular(l, _dense(g.B), lower=True)
    c_t = sla.solve_triangular(l, _dense(g.C).T, lower=True).T
    return CholeskyTransform(system=StandardSystem(a_t, b_t, c_t, g.D), L=l)


def similarity_transform(sys, t):
    """Change of state coordinates: (T^{-1} A T, T^{-1} B, C T)."""
    t = np.asarray(t, dtype=float)
    try:
        a = linalg.lu_solve(t, _dense(sys.A) @ t)
        b = linalg.lu_solve(t, _dense(sys.B))
    except SingularMatrixError as exc:
        raise SingularTransformError(f"transformation is singular: {exc}") from exc
    return StandardSystem(a, b, _dense(sys.C) @ t, sys.D)


def _state_matrix(obj):
    """Dense effective state matrix of a system or raw square matrix."""
    if isinstance(obj, DescriptorIndex1):
        gen, _ = eliminate_descriptor(obj)
        obj = gen
    if isinstance(obj, GeneralizedSystem):
        return np.linalg.solve(_dense(obj.M), _dense(obj.A))
    if isinstance(obj, StandardSystem):
        return _dense(obj.A)
    return _dense(obj)


def spectral_abscissa(obj):
    """Largest real part of the (generalized) spectrum."""
    a = _state_matrix(obj)
    if a.size == 0:
        return -np.inf
    return float(np.max(linalg.gen_eig(a, vectors=False).values.real))


def alpha_shift(sys, alpha):
    """Replace A by A - alpha*M (A - alpha*I for standard systems)."""
    if alpha == 0.0:
        return sys
    if isinstance(sys, GeneralizedSystem):
        return GeneralizedSystem(sys.M, sys.A - alpha * sys.M, sys.B, sys.C, sys.D, spd=sys.spd)
    if isinstance(sys, StandardSystem):
        eye = sp.identity(sys.n, format="csc") if _is_sparse(sys.A) else np.eye(sys.n)
        return StandardSystem(sys.A - alpha * eye, sys.B, sys.C, sys.D)
    if isinstance(sys, DescriptorIndex1):
        return DescriptorIndex1(
            sys.M1, sys.A1 - alpha * sys.M1, sys.A2, sys.A3, sys.A4,
            sys.B1, sys.B2, sys.C1, sys.C2,
        )
    raise TypeError(f"unsupported system type {type(sys)!r}")
