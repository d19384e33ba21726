"""Eigenvalue counting via symmetric-indefinite inertia, dense pencil
spectra (the brute-force oracle), heat traces and 2->infinity norms.

Counting below a shift never computes eigenvalues: one symmetric
factorization of K - lambda*diag(M) yields the exact integer count through
Sylvester's law of inertia.  Zero pivots are classified against the scaled
tolerance tau0 = 1e-12 * max|A_ij| and reported as OnEigenvalue, never
silently absorbed.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import (
    FactorizationBreakdown,
    MissingVectors,
    OnEigenvalue,
    SingularDirichletBlock,
    SizeCap,
)
from .model import Inertia, SpectralSummary

#: relative pivot tolerance for rank decisions
PIVOT_RTOL = 1e-12

#: orders up to this go straight to the dense factorization
_DENSE_SWITCH = 800

#: hard cap for dense eigensolver / dense fallback paths
DENSE_CAP = 4000


def _classify(values: np.ndarray, tau0: float) -> Inertia:
    neg = int(np.sum(values < -tau0))
    pos = int(np.sum(values > tau0))
    return Inertia(n_minus=neg, n_zero=values.size - neg - pos, n_plus=pos)


def _inertia_dense(A: np.ndarray, tau0: float) -> Inertia:
    # Bunch-Kaufman: D is block diagonal with 1x1 and symmetric 2x2 blocks
    _, D, _ = sla.ldl(A)
    vals = []
    i = 0
    order = A.shape[0]
    while i < order:
        if i + 1 < order and D[i + 1, i] != 0.0:
            a, b, c = D[i, i], D[i + 1, i], D[i + 1, i + 1]
            root = np.hypot(a - c, 2.0 * b)
            vals.append(((a + c) + root) / 2.0)
            vals.append(((a + c) - root) / 2.0)
            i += 2
        else:
            vals.append(D[i, i])
            i += 1
    return _classify(np.array(vals), tau0)


def _inertia_sparse(A: sp.spmatrix, tau0: float) -> Inertia:
    """Signed diagonal of a symmetric-mode LU with diagonal pivoting.

    With diag_pivot_thresh=0 SuperLU keeps pivots on the diagonal whenever
    structurally possible; if it was still forced off the diagonal the row
    and column permutations differ and we refuse the factorization rather
    than trust it.
    """
    lu = splu(
        A.tocsc(),
        diag_pivot_thresh=0.0,
        permc_spec="MMD_AT_PLUS_A",
        options=dict(SymmetricMode=True, Equil=False),
    )
    if not np.array_equal(lu.perm_r, lu.perm_c):
        raise FactorizationBreakdown("pivoting left the diagonal")
    return _classify(lu.U.diagonal(), tau0)


def inertia(A) -> Inertia:
    """Signature (n_minus, n_zero, n_plus) of a symmetric matrix.

    Accepts dense arrays or scipy sparse matrices.  Small or dense inputs go
    through a blocked LDL^T factorization; large sparse inputs through a
    diagonal-pivot sparse LU, falling back to the dense path (up to order
    4000) when diagonal pivoting is impossible.
    """
    if sp.issparse(A):
        order = A.shape[0]
        amax = float(abs(A).max()) if A.nnz else 0.0
    else:
        A = np.asarray(A, dtype=float)
        order = A.shape[0]
        amax = float(np.abs(A).max()) if order else 0.0
    if A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(A.data if sp.issparse(A) else A)):
        raise ValueError("matrix entries must be finite")
    if amax == 0.0:
        return Inertia(0, order, 0)
    tau0 = PIVOT_RTOL * amax

    if not sp.issparse(A):
        return _inertia_dense(A, tau0)
    if order <= _DENSE_SWITCH:
        return _inertia_dense(A.toarray(), tau0)
    try:
        return _inertia_sparse(A, tau0)
    except (FactorizationBreakdown, RuntimeError) as exc:
        if order <= DENSE_CAP:
            return _inertia_dense(A.toarray(), tau0)
        raise FactorizationBreakdown(
            f"sparse factorization failed at order {order}: {exc}"
        ) from exc


def _as_mass_vector(M, order: int) -> np.ndarray:
    """Normalize a diagonal mass (vector, dense diagonal matrix or sparse
    diagonal matrix) to a 1-D nonnegative array."""
    if sp.issparse(M):
        dense = M.toarray()
    else:
        dense = np.asarray(M, dtype=float)
    if dense.ndim == 2:
        if np.any(dense != np.diag(np.diag(dense))):
            raise ValueError("mass matrix must be diagonal")
        dense = np.diag(dense)
    if dense.shape != (order,):
        raise ValueError("mass diagonal has the wrong length")
    if np.any(dense < 0):
        raise ValueError("mass diagonal must be nonnegative")
    return dense


def _check_massless_block(K, m: np.ndarray):
    """The counting semantics need K positive definite on the mass-free
    nodes; verify by factorizing that principal block."""
    idx = np.flatnonzero(m == 0.0)
    if idx.size == 0:
        return
    Kzz = K[np.ix_(idx, idx)] if not sp.issparse(K) else K.tocsr()[idx][:, idx]
    inert = inertia(Kzz)
    if inert.n_minus or inert.n_zero:
        raise SingularDirichletBlock(
            "stiffness is not positive definite on the mass-free nodes: "
            f"(n_minus, n_zero, n_plus) = {(inert.n_minus, inert.n_zero, inert.n_plus)}"
        )


def _shift(K, m: np.ndarray, lam: float):
    if sp.issparse(K):
        return (K - lam * sp.diags(m)).tocsr()
    return K - lam * np.diag(m)


def count_below(K, M, lam: float) -> int:
    """Number of finite pencil eigenvalues of (K, diag M) strictly below
    ``lam``, computed as n_minus(K - lam*diag(M)).

    M may be a vector or a diagonal matrix, with zeros allowed (the pencil
    then has rank(M) finite eigenvalues); K must be positive definite on the
    mass-free nodes, which is checked.  If the shifted matrix is numerically
    singular the shift sits on an eigenvalue: OnEigenvalue is raised and the
    caller perturbs (the convention is lam -> lam*(1 + 1e-9)).
    """
    order = K.shape[0]
    m = _as_mass_vector(M, order)
    _check_massless_block(K, m)
    inert = inertia(_shift(K, m, lam))
    if inert.n_zero:
        raise OnEigenvalue(
            f"shift {lam!r} lies on the pencil spectrum (n_zero={inert.n_zero})"
        )
    return inert.n_minus


def pencil_eigs(K, M, want_vectors: bool = False) -> SpectralSummary:
    """All finite generalized eigenvalues of (K, diag M), sorted ascending;
    dense solve, order capped at 4000.

    Zero-mass nodes are eliminated exactly: with z the mass-free nodes and p
    the rest, the finite spectrum is that of the condensed pencil
    (K_pp - K_pz K_zz^{-1} K_zp, M_p), and eigenvectors are extended back by
    x_z = -K_zz^{-1} K_zp x_p.  Returned eigenvectors are M-orthonormal.
    """
    order = K.shape[0]
    if order > DENSE_CAP:
        raise SizeCap(f"dense eigensolver capped at order {DENSE_CAP}, got {order}")
    m = _as_mass_vector(M, order)
    _check_massless_block(K, m)
    Kd = K.toarray() if sp.issparse(K) else np.asarray(K, dtype=float)
    Kd = (Kd + Kd.T) / 2.0

    pos = np.flatnonzero(m > 0.0)
    zero = np.flatnonzero(m == 0.0)
    meta = {"order": order, "mass_rank": int(pos.size)}
    if pos.size == 0:
        return SpectralSummary(
            eigenvalues=np.empty(0),
            eigenvectors=np.empty((order, 0)) if want_vectors else None,
            metadata=meta,
        )

    if zero.size:
        Kzz = Kd[np.ix_(zero, zero)]
        Kzp = Kd[np.ix_(zero, pos)]
        back = sla.solve(Kzz, Kzp, assume_a="pos")
        S = Kd[np.ix_(pos, pos)] - Kzp.T @ back
        S = (S + S.T) / 2.0
    else:
        back = None
        S = Kd

    d = 1.0 / np.sqrt(m[pos])
    Aw = d[:, None] * S * d[None, :]
    Aw = (Aw + Aw.T) / 2.0
    if want_vectors:
        w, Y = sla.eigh(Aw)
        X = np.zeros((order, pos.size))
        X[pos] = d[:, None] * Y
        if zero.size:
            X[zero] = -back @ X[pos]
        return SpectralSummary(eigenvalues=w, eigenvectors=X, metadata=meta)
    w = sla.eigvalsh(Aw)
    return SpectralSummary(eigenvalues=w, metadata=meta)


def heat_trace(s: SpectralSummary, t: float) -> float:
    """Trace of the semigroup at time t: sum_k exp(-t * mu_k)."""
    if t <= 0:
        raise ValueError("heat trace needs t > 0")
    if s.count and s.eigenvalues[0] < 0:
        raise ValueError("heat trace expects a nonnegative spectrum")
    return float(np.sum(np.exp(-t * s.eigenvalues)))


#: tolerance on the weighted orthonormality of supplied eigenvectors
ORTHONORMALITY_TOL = 1e-8


def two_infinity_norm(s: SpectralSummary, w, t: float) -> float:
    """Exact 2->infinity operator norm of the discrete semigroup exp(-tL) on
    the weighted space l2(w): max over nodes x of
    (sum_k exp(-2 t mu_k) u_k(x)^2)^(1/2).

    The eigenvectors must be w-orthonormal (checked); the weights enter only
    through that normalization.
    """
    if s.eigenvectors is None:
        raise MissingVectors("two_infinity_norm needs eigenvectors")
    if t <= 0:
        raise ValueError("needs t > 0")
    wv = np.asarray(w, dtype=float)
    U = s.eigenvectors
    gram = U.T @ (wv[:, None] * U)
    if np.abs(gram - np.eye(gram.shape[0])).max() > ORTHONORMALITY_TOL:
        raise ValueError("eigenvectors are not w-orthonormal")
    amp = U * np.exp(-t * s.eigenvalues)[None, :]
    return float(np.sqrt(np.max(np.sum(amp * amp, axis=1))))
