"""Dense complex matrix utilities: exp/log, indefinite adjoint, block maps."""

import numpy as np
import scipy.linalg

from .errors import NotUnipotent

# Global scale factor for structural tolerances (singularity tests,
# certificate checks).  Absolute tolerances are TOL_FACTOR * max(1, scale).
TOL_FACTOR = 1e-10

# Spectrum of a unipotent matrix must sit within this distance of 1.
TOL_SPECTRUM = 1e-8


def as_cmatrix(a):
    """Coerce to a square complex128 ndarray, rejecting non-finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def ipq(p, q):
    """Signature matrix I_{p,q} = diag(1_p, -1_q)."""
    return np.diag(np.concatenate([np.ones(p), -np.ones(q)])).astype(complex)


def is_nilpotent(x, tol=1e-13):
    """True if x^n vanishes (relative to max(1, |x|)^n)."""
    x = as_cmatrix(x)
    n = x.shape[0]
    power = np.eye(n, dtype=complex)
    for _ in range(n):
        power = power @ x
    scale = max(1.0, np.linalg.norm(x)) ** n
    return np.linalg.norm(power) <= tol * scale


def mat_exp(x):
    """Matrix exponential.

    Uses the exactly terminating power series when the input is nilpotent
    (so unipotent group elements are produced without truncation error),
    and scaling-and-squaring (scipy) otherwise.

    Parameters
    ----------
    x : array_like
        Square complex matrix.

    Returns
    -------
    ndarray
        exp(x).
    """
    x = as_cmatrix(x)
    n = x.shape[0]
    if is_nilpotent(x):
        total = np.eye(n, dtype=complex)
        term = np.eye(n, dtype=complex)
        for k in range(1, n):
            term = term @ x / k
            total = total + term
        return total
    return scipy.linalg.expm(x)


def mat_log_unipotent(g):
    """Logarithm of a unipotent matrix via the terminating Mercator series.

    Unipotency is certified by (g - I)^n vanishing, which is stable for
    defective matrices (an eigenvalue test would see sqrt(eps) splitting
    of Jordan blocks and reject exact unipotents).
    """
    g = as_cmatrix(g)
    n = g.shape[0]
    nil = g - np.eye(n, dtype=complex)
    scale = max(1.0, np.linalg.norm(nil))
    if np.linalg.norm(np.linalg.matrix_power(nil, n)) > TOL_SPECTRUM * scale**n:
        raise NotUnipotent(f"(g - 1)^{n} does not vanish; g is not unipotent")
    total = np.zeros_like(nil)
    power = np.eye(n, dtype=complex)
    for k in range(1, n):
        power = power @ nil
        total = total + ((-1) ** (k + 1)) * power / k
    return total


def indef_adjoint(x, p, q):
    """Adjoint with respect to the (p,q) hermitian form: I_{p,q} x^* I_{p,q}."""
    x = as_cmatrix(x)
    if x.shape[0] != p + q:
        raise ValueError(f"matrix of size {x.shape[0]} does not match p+q={p+q}")
    j = ipq(p, q)
    return j @ x.conj().T @ j


def block_split(g, p, q):
    """Split a (p+q) x (p+q) matrix into (A, B, C, D) blocks."""
    g = as_cmatrix(g)
    if g.shape[0] != p + q:
        raise ValueError(f"matrix of size {g.shape[0]} does not match p+q={p+q}")
    return g[:p, :p], g[:p, p:], g[p:, :p], g[p:, p:]


def block_join(a, b, c, d):
    """Assemble a matrix from its (A, B, C, D) blocks."""
    return np.block([[np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)],
                     [np.asarray(c, dtype=complex), np.asarray(d, dtype=complex)]])


def solve_right(a, b):
    """Solve X b = a for X, i.e. compute a b^{-1} without forming b^{-1}."""
    return np.linalg.solve(np.asarray(b, dtype=complex).T,
                           np.asarray(a, dtype=complex).T).T


def smallest_singular_value(m):
    """Smallest singular value (0.0 for an empty block)."""
    m = np.asarray(m, dtype=complex)
    if m.size == 0:
        return np.inf
    return float(np.linalg.svd(m, compute_uv=False)[-1])
