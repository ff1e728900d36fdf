"""Concrete matrix groups SU(p,q) in SL(p+q,C), involutions, Harish-Chandra
factorization through the dense cell P+ K_C P-, and the bounded domain action.

Conventions: I_{p,q} = diag(1_p, -1_q); G = SU(p,q) = {g : g* I g = I, det g = 1};
sigma(g) = I g^{-*} I fixes G inside G_C = SL(p+q,C); theta(g) = I g I;
p^+ / p^- are the upper-right / lower-left block complements of
k_C = block-diagonal.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import NotInDenseCell, OutsideDomain
from .matcore import (
    TOL_FACTOR,
    as_cmatrix,
    block_join,
    block_split,
    indef_adjoint,
    ipq,
    smallest_singular_value,
    solve_right,
)

MEMBERSHIP_TOL = 1e-9


@dataclass(frozen=True)
class GroupSpec:
    """One of the supported real forms (or its ambient complexification).

    name : str
        Registry key ('sl2', 'su11', 'su21', 'su22').
    p, q : int
        Block sizes; the hermitian form has signature (p, q).
    complexified : bool
        True when elements range over all of SL(p+q,C) rather than SU(p,q).
    """

    name: str
    p: int
    q: int
    complexified: bool = False

    @property
    def n(self):
        return self.p + self.q

    @property
    def rank(self):
        return min(self.p, self.q)

    @property
    def is_tube(self):
        return self.p == self.q

    @property
    def form_matrix(self):
        return ipq(self.p, self.q)


GROUPS = {
    "sl2": GroupSpec("sl2", 1, 1, complexified=True),
    "su11": GroupSpec("su11", 1, 1),
    "su21": GroupSpec("su21", 2, 1),
    "su22": GroupSpec("su22", 2, 2),
}


def get_group(name):
    """Look up a GroupSpec by registry key."""
    try:
        return GROUPS[name]
    except KeyError:
        raise KeyError(
            f"unknown group {name!r}; choose from {sorted(GROUPS)}"
        ) from None


# ---------------------------------------------------------------------------
# membership certificates
# ---------------------------------------------------------------------------

def in_group(spec, g, tol=MEMBERSHIP_TOL):
    """Certificate for g in G: g* I g = I (skipped for ambient SL) and det = 1."""
    g = as_cmatrix(g)
    if g.shape[0] != spec.n:
        return False
    if abs(np.linalg.det(g) - 1.0) > tol:
        return False
    if spec.complexified:
        return True
    j = spec.form_matrix
    return np.linalg.norm(g.conj().T @ j @ g - j) <= tol * max(1.0, np.linalg.norm(g) ** 2)


def in_algebra(spec, x, tol=MEMBERSHIP_TOL):
    """Certificate for x in g = su(p,q) (or sl(p+q,C) when complexified)."""
    x = as_cmatrix(x)
    if x.shape[0] != spec.n:
        return False
    if abs(np.trace(x)) > tol:
        return False
    if spec.complexified:
        return True
    j = spec.form_matrix
    return np.linalg.norm(x.conj().T @ j + j @ x) <= tol * max(1.0, np.linalg.norm(x))


def assert_in_group(spec, g, tol=MEMBERSHIP_TOL):
    if not in_group(spec, g, tol):
        raise ValueError(f"matrix is not in {spec.name} to tolerance {tol}")


# ---------------------------------------------------------------------------
# involutions
# ---------------------------------------------------------------------------

def sigma_group(spec, g):
    """Conjugation of G_C fixing G: sigma(g) = I g^{-*} I."""
    g = as_cmatrix(g)
    j = spec.form_matrix
    return j @ np.linalg.inv(g).conj().T @ j


def theta_group(spec, g):
    """Cartan involution on the group: theta(g) = I g I."""
    j = spec.form_matrix
    return j @ as_cmatrix(g) @ j


def sigma_alg(spec, x):
    """Conjugation of g_C fixing su(p,q): sigma(x) = -I x* I."""
    j = spec.form_matrix
    return -(j @ as_cmatrix(x).conj().T @ j)


def theta_alg(spec, x):
    """Cartan involution on the algebra: theta(x) = I x I."""
    j = spec.form_matrix
    return j @ as_cmatrix(x) @ j


def kc_star(spec, k):
    """The anti-holomorphic 'star' on K_C: k* = sigma(k)^{-1} = I k^* I."""
    return indef_adjoint(k, spec.p, spec.q)


# ---------------------------------------------------------------------------
# random elements (for invariant suites)
# ---------------------------------------------------------------------------

def random_algebra_element(spec, rng, scale=1.0):
    """Random Lie algebra element with Frobenius norm equal to `scale`."""
    n, p, q = spec.n, spec.p, spec.q
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    if spec.complexified:
        x = m - (np.trace(m) / n) * np.eye(n)
    else:
        a = (m[:p, :p] - m[:p, :p].conj().T) / 2
        d = (m[p:, p:] - m[p:, p:].conj().T) / 2
        b = m[:p, p:]
        # shift the (imaginary) traces so that tr(a) + tr(d) = 0
        s = np.trace(a) + np.trace(d)
        a = a - (s / (2 * p)) * np.eye(p)
        d = d - (s / (2 * q)) * np.eye(q)
        x = block_join(a, b, b.conj().T, d)
    return x * (scale / np.linalg.norm(x))


def random_group_element(spec, rng, scale=1.0):
    """Random group element exp(x) with x a random algebra element.

    `scale` bounds the norm of x; the draw is uniform in [0.2, 1] * scale
    so elements do not cluster near the identity.
    """
    from .matcore import mat_exp

    x = random_algebra_element(spec, rng, scale=scale * rng.uniform(0.2, 1.0))
    return mat_exp(x)


# ---------------------------------------------------------------------------
# Harish-Chandra factorization g = exp(Z+) k exp(Z-)
# ---------------------------------------------------------------------------

@dataclass
class HCTriple:
    """Factors of g = exp(emb+(zplus)) . k . exp(emb-(zminus)).

    zplus is p x q, zminus is q x p, k is block-diagonal in K_C.
    """

    group: GroupSpec
    zplus: np.ndarray
    k: np.ndarray
    zminus: np.ndarray

    def reassemble(self):
        return exp_pplus(self.group, self.zplus) @ self.k @ exp_pminus(
            self.group, self.zminus
        )


def exp_pplus(spec, z):
    """exp of the p^+ embedding of a p x q block: [[1, Z], [0, 1]]."""
    z = np.asarray(z, dtype=complex).reshape(spec.p, spec.q)
    return block_join(np.eye(spec.p), z, np.zeros((spec.q, spec.p)), np.eye(spec.q))


def exp_pminus(spec, w):
    """exp of the p^- embedding of a q x p block: [[1, 0], [W, 1]]."""
    w = np.asarray(w, dtype=complex).reshape(spec.q, spec.p)
    return block_join(np.eye(spec.p), np.zeros((spec.p, spec.q)), w, np.eye(spec.q))


def embed_pplus(spec, z):
    """Lie algebra embedding of a p x q block into p^+."""
    z = np.asarray(z, dtype=complex).reshape(spec.p, spec.q)
    return block_join(np.zeros((spec.p, spec.p)), z,
                      np.zeros((spec.q, spec.p)), np.zeros((spec.q, spec.q)))


def embed_pminus(spec, w):
    w = np.asarray(w, dtype=complex).reshape(spec.q, spec.p)
    return block_join(np.zeros((spec.p, spec.p)), np.zeros((spec.p, spec.q)),
                      w, np.zeros((spec.q, spec.q)))


def hc_factorize(spec, g):
    """Factor g through the dense cell: g = exp(Z+) k exp(Z-).

    Parameters
    ----------
    spec : GroupSpec
    g : array_like
        Element of G_C (any invertible matrix is accepted; the cell
        condition is what matters).

    Returns
    -------
    HCTriple

    Raises
    ------
    NotInDenseCell
        If the lower-right block of g is singular, i.e. g is outside
        the dense cell P+ K_C P-.
    """
    g = as_cmatrix(g)
    p, q = spec.p, spec.q
    a, b, c, d = block_split(g, p, q)
    gnorm = np.linalg.norm(g)
    if smallest_singular_value(d) <= TOL_FACTOR * max(1.0, gnorm):
        raise NotInDenseCell(
            f"lower-right block is singular (smallest sv "
            f"{smallest_singular_value(d):.3e}); not in the dense cell"
        )
    zplus = solve_right(b, d)          # B D^{-1}
    zminus = np.linalg.solve(d, c)     # D^{-1} C
    k = block_join(a - zplus @ c, np.zeros((p, q)), np.zeros((q, p)), d)
    return HCTriple(spec, zplus, k, zminus)


# ---------------------------------------------------------------------------
# bounded domain D = {Z : 1 - Z* Z > 0} and its G-action
# ---------------------------------------------------------------------------

def base_point(spec):
    """Origin of the bounded domain (the p x q zero block)."""
    return np.zeros((spec.p, spec.q), dtype=complex)


def in_domain(spec, z, tol=0.0):
    """True if 1 - Z*Z is positive definite (with margin `tol`)."""
    z = np.asarray(z, dtype=complex).reshape(spec.p, spec.q)
    h = np.eye(spec.q) - z.conj().T @ z
    return bool(np.min(np.linalg.eigvalsh(h)) > tol)


def domain_action(spec, g, z):
    """Fractional-linear action g.Z = (AZ + B)(CZ + D)^{-1}.

    Raises OutsideDomain when CZ + D is singular or the image leaves the
    closed domain (possible for general complexified g).
    """
    z = np.asarray(z, dtype=complex).reshape(spec.p, spec.q)
    a, b, c, d = block_split(as_cmatrix(g), spec.p, spec.q)
    den = c @ z + d
    if smallest_singular_value(den) <= TOL_FACTOR * max(1.0, np.linalg.norm(g)):
        raise OutsideDomain("CZ + D is singular at this point")
    image = solve_right(a @ z + b, den)
    if not in_domain(spec, image, tol=-MEMBERSHIP_TOL):
        raise OutsideDomain("image point leaves the bounded domain")
    return image


def universal_cocycle(spec, g, z):
    """Canonical automorphy factor J(g, Z) = k-part of g exp(emb+(Z)).

    Block formula: diag(A - (AZ+B)(CZ+D)^{-1} C, CZ + D).
    """
    g = as_cmatrix(g)
    z = np.asarray(z, dtype=complex).reshape(spec.p, spec.q)
    a, b, c, d = block_split(g, spec.p, spec.q)
    # blocks of g . exp(emb+(Z))
    return hc_factorize(spec, block_join(a, a @ z + b, c, c @ z + d)).k


def universal_kernel(spec, z, w):
    """Canonical kernel K(Z, W) = k-part of exp(-sigma(emb+(W))) exp(emb+(Z)).

    Its lower-right block is 1 - W* Z.
    """
    z = np.asarray(z, dtype=complex).reshape(spec.p, spec.q)
    w = np.asarray(w, dtype=complex).reshape(spec.p, spec.q)
    wh = w.conj().T
    m = block_join(np.eye(spec.p), z, -wh, np.eye(spec.q) - wh @ z)
    return hc_factorize(spec, m).k


def transvection(spec, z):
    """The symmetric-space transvection g_Z in G with g_Z . 0 = Z.

    Built as exp [[0, W], [W*, 0]] where W = U atanh(s) V* from the SVD
    Z = U diag(s) V*; requires Z in the open domain.
    """
    from .matcore import mat_exp

    z = np.asarray(z, dtype=complex).reshape(spec.p, spec.q)
    if not in_domain(spec, z):
        raise OutsideDomain("transvection base point must lie in the open domain")
    u, s, vh = np.linalg.svd(z)
    w = (u[:, : spec.q] * np.arctanh(s)) @ vh
    x = block_join(np.zeros((spec.p, spec.p)), w, w.conj().T,
                   np.zeros((spec.q, spec.q)))
    return mat_exp(x)
