"""Truncated Bargmann-Fock model of the nilradical representation.

The Fock space is the space of holomorphic polynomials on the half layer
n_{1/2} in the complex coordinates w = (w_1, ..., w_d) fixed by the root
datum's complex structure, truncated at a total degree cap D, with monomial
norms ||w^alpha||^2 = alpha!.

Representation conventions (for central scale s > 0, default 1):

    omega(n_z^+) zeta(w) = zeta(w - z)                 (translation, exact)
    omega(n_z^-) zeta(w) = e^{<w,z>} zeta(w)           (multiplication)
    omega(exp v) zeta    = e^{-i s (v|E)} zeta          (v central)

where n_z^+ = exp(sum_m z_m u^+_m / sqrt(s)), n_z^- = sigma(n_z^+) is its
conjugate, and <w,z> = sum_m w_m conj(z_m).  A general element of N_C acts
through the two-step BCH splitting exp(u^+ + u^- + v) =
exp(u^+) exp(u^-) exp(v - [u^+,u^-]/2).  With these conventions omega is
unitary on N and omega(n_z^+)^* = omega(n_z^-)^{-1}.
"""

import itertools
import math

import numpy as np

from .groups import hc_factorize
from .matcore import as_cmatrix, mat_exp, mat_log_unipotent

MATRIX_COEFF_FIT_TOL = 1e-12


def multi_indices(d, cap):
    """All exponent tuples in d variables of total degree <= cap.

    Ordered by total degree, then lexicographically; d = 0 gives [()].
    """
    out = []
    for deg in range(cap + 1):
        if d == 0:
            if deg == 0:
                out.append(())
            continue
        for comb in itertools.combinations_with_replacement(range(d), deg):
            alpha = [0] * d
            for i in comb:
                alpha[i] += 1
            out.append(tuple(alpha))
    # combinations_with_replacement is lex in the variable list; normalize
    return sorted(out, key=lambda a: (sum(a), tuple(-x for x in a)))


class FockSpace:
    """Degree-truncated polynomial model with its coordinate dictionary.

    Parameters
    ----------
    rd : RootDatum
        Supplies the half-layer complex structure and the center pairing.
    degree_cap : int
        Total-degree truncation D.
    scale : float
        Central character scale s > 0; the stored polynomial variable is
        sqrt(s) times the intrinsic complex coordinate.
    """

    def __init__(self, rd, degree_cap=12, scale=1.0):
        if scale <= 0:
            raise ValueError("central character scale must be positive")
        self.rd = rd
        self.degree_cap = int(degree_cap)
        self.scale = float(scale)
        self.fstruct = rd.fock_structure
        self.d = self.fstruct.d
        self.indices = multi_indices(self.d, self.degree_cap)
        self.index_of = {a: i for i, a in enumerate(self.indices)}
        self.dim = len(self.indices)
        self.norms_sq = np.array(
            [float(np.prod([math.factorial(x) for x in a])) if a else 1.0
             for a in self.indices]
        )
        self._check_center_pairing()

    def _check_center_pairing(self):
        # the Weyl commutation bookkeeping assumes ([u+_m, u-_m'] | E) is
        # -i times the identity pairing in the chosen basis
        fst = self.fstruct
        for m, up in enumerate(fst.u_plus_basis):
            for mp, um in enumerate(fst.u_minus_basis):
                val = self.rd.e_pairing(up @ um - um @ up)
                want = -1j if m == mp else 0.0
                assert abs(val - want) < 1e-9, "center pairing not diagonal"

    def coords(self, z):
        """Scaled complex coordinates of z in the half layer."""
        return np.sqrt(self.scale) * self.fstruct.coords(z)

    def matrix_from_coords(self, w):
        """Inverse of coords: the real half-layer element with coordinates w."""
        return self.fstruct.from_coords(np.asarray(w, dtype=complex) / np.sqrt(self.scale))

    def matrix_from_coords_plus(self, w):
        """The u^+-layer matrix whose translation parameter is w."""
        w = np.atleast_1d(np.asarray(w, dtype=complex)) / np.sqrt(self.scale)
        out = np.zeros((self.rd.n, self.rd.n), dtype=complex)
        for wm, um in zip(w, self.fstruct.u_plus_basis):
            out = out + wm * um
        return out

    def zero(self):
        return FockVector(self, np.zeros(self.dim, dtype=complex))

    def constant(self, value=1.0):
        coeffs = np.zeros(self.dim, dtype=complex)
        coeffs[self.index_of[(0,) * self.d]] = value
        return FockVector(self, coeffs)

    def basis_vector(self, alpha):
        coeffs = np.zeros(self.dim, dtype=complex)
        coeffs[self.index_of[tuple(alpha)]] = 1.0
        return FockVector(self, coeffs)

    def vector(self, coeffs, tail_mass=0.0):
        coeffs = np.asarray(coeffs, dtype=complex)
        assert coeffs.shape == (self.dim,)
        return FockVector(self, coeffs.copy(), tail_mass)

    def degree_mask(self, max_degree):
        return np.array([sum(a) <= max_degree for a in self.indices])

    def compatible(self, other):
        """Same coordinate dictionary: group, truncation, and scale agree."""
        return (self is other
                or (self.rd.spec.name == other.rd.spec.name
                    and self.degree_cap == other.degree_cap
                    and self.scale == other.scale))


class FockVector:
    """Immutable coefficient vector over the monomial basis of a FockSpace."""

    def __init__(self, space, coeffs, tail_mass=0.0):
        self.space = space
        self.coeffs = np.asarray(coeffs, dtype=complex)
        self.tail_mass = float(tail_mass)

    def inner(self, other):
        """<self, other> = sum_alpha a_alpha conj(b_alpha) alpha!."""
        assert self.space.compatible(other.space)
        return complex(np.sum(self.coeffs * np.conj(other.coeffs) * self.space.norms_sq))

    def norm(self):
        return math.sqrt(max(self.inner(self).real, 0.0))

    def evaluate(self, w):
        """Value of the polynomial at the coordinate point w."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        total = 0.0 + 0.0j
        for alpha, c in zip(self.space.indices, self.coeffs):
            if c != 0:
                total += c * np.prod([wm**am for wm, am in zip(w, alpha)])
        return total

    def __add__(self, other):
        assert self.space.compatible(other.space)
        return FockVector(self.space, self.coeffs + other.coeffs,
                          max(self.tail_mass, other.tail_mass))

    def __sub__(self, other):
        assert self.space.compatible(other.space)
        return FockVector(self.space, self.coeffs - other.coeffs,
                          max(self.tail_mass, other.tail_mass))

    def __rmul__(self, scalar):
        return FockVector(self.space, scalar * self.coeffs,
                          abs(scalar) * self.tail_mass)

    def __neg__(self):
        return FockVector(self.space, -self.coeffs, self.tail_mass)


class FockOperator:
    """Dense matrix acting on FockVector coefficient vectors."""

    def __init__(self, space, mat, mult_param=None):
        self.space = space
        self.mat = as_cmatrix(mat)
        assert self.mat.shape == (space.dim, space.dim)
        # when set, the operator is multiplication by e^{sum b_m w_m} and a
        # truncation tail can be estimated for each application
        self.mult_param = mult_param

    @classmethod
    def identity(cls, space):
        return cls(space, np.eye(space.dim, dtype=complex))

    def apply(self, vec):
        assert vec.space is self.space
        tail = vec.tail_mass
        if self.mult_param is not None:
            tail = max(tail, _mult_tail_mass(self.space, self.mult_param, vec.coeffs))
        return FockVector(self.space, self.mat @ vec.coeffs, tail)

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            assert other.space is self.space
            return FockOperator(self.space, self.mat @ other.mat)
        return self.apply(other)

    def __rmul__(self, scalar):
        return FockOperator(self.space, scalar * self.mat, self.mult_param)

    def inverse(self):
        return FockOperator(self.space, np.linalg.inv(self.mat))

    def gram_adjoint(self):
        """Adjoint for the Fock inner product (monomial Gram = diag(alpha!))."""
        g = self.space.norms_sq
        return FockOperator(self.space, (self.mat.conj().T * g[None, :]) / g[:, None])


# ---------------------------------------------------------------------------
# the three building blocks: translation, multiplication, central scalar
# ---------------------------------------------------------------------------

def translation_op(space, a):
    """omega(n_a^+): the exact substitution zeta(w) -> zeta(w - a)."""
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    assert a.shape == (space.d,)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for col, alpha in enumerate(space.indices):
        # expand prod_m (w_m - a_m)^{alpha_m}
        for beta in itertools.product(*(range(x + 1) for x in alpha)):
            coef = 1.0 + 0.0j
            for am, bm, xm in zip(a, beta, alpha):
                coef *= math.comb(xm, bm) * (-am) ** (xm - bm)
            mat[space.index_of[tuple(beta)], col] += coef
    return FockOperator(space, mat)


def multiplication_op(space, b):
    """omega(n_{conj(b)}^-): multiplication by e^{sum b_m w_m}, truncated."""
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    assert b.shape == (space.d,)
    mat = np.zeros((space.dim, space.dim), dtype=complex)
    for col, alpha in enumerate(space.indices):
        room = space.degree_cap - sum(alpha)
        for gamma in multi_indices(space.d, room):
            coef = 1.0 + 0.0j
            for bm, gm in zip(b, gamma):
                coef *= bm**gm / math.factorial(gm)
            target = tuple(x + g for x, g in zip(alpha, gamma))
            mat[space.index_of[target], col] += coef
    return FockOperator(space, mat, mult_param=b)


def _mult_tail_mass(space, b, coeffs, extra_layers=24):
    """Fock norm of the coefficients that multiplication_op(b) truncates."""
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if space.d == 0:
        return 0.0
    tail_sq = 0.0
    kernel = multi_indices(space.d, space.degree_cap + extra_layers)
    for alpha, c in zip(space.indices, coeffs):
        if c == 0:
            continue
        for gamma in kernel:
            total = sum(alpha) + sum(gamma)
            if total <= space.degree_cap or total > space.degree_cap + extra_layers:
                continue
            coef = c
            for bm, gm in zip(b, gamma):
                coef *= bm**gm / math.factorial(gm)
            nrm = np.prod([math.factorial(x + g) for x, g in zip(alpha, gamma)])
            tail_sq += abs(coef) ** 2 * nrm
    return math.sqrt(tail_sq)


def central_value(space, v):
    """omega(exp v) for v in the complexified center: e^{-i s (v|E)}."""
    return np.exp(-1j * space.scale * self_pairing(space, v))


def self_pairing(space, v):
    return space.rd.e_pairing(v)


# ---------------------------------------------------------------------------
# actions of N and N_C
# ---------------------------------------------------------------------------

def fock_act_nc(space, kind, z):
    """omega(n_z^{+/-}) for the coordinate parameter z in C^d.

    kind='plus' gives the translation zeta(w - z); kind='minus' gives
    multiplication by e^{<w,z>} (the sigma-conjugate generator, so that
    omega(n_z^+)^* = omega(n_z^-)^{-1} holds with the same parameter).
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    if kind == "plus":
        return translation_op(space, z)
    if kind == "minus":
        return multiplication_op(space, np.conj(z))
    raise ValueError("kind must be 'plus' or 'minus'")


def fock_act_group(space, n):
    """omega(n) for a unipotent n in N_C, via log and the BCH splitting.

    Returns (FockOperator, scalar) with the central scalar folded into the
    operator matrix; the scalar is also reported for diagnostic use.
    """
    xi = mat_log_unipotent(as_cmatrix(n))
    return fock_act_nilpotent(space, xi)


def fock_act_nilpotent(space, xi):
    """omega(exp xi) for xi in the complexified nilradical."""
    rd = space.rd
    comps = rd.restricted_decompose(xi)
    half = np.zeros_like(xi)
    center = np.zeros_like(xi)
    for lab, c in comps.items():
        grade = sum(lab)
        if grade == 1:
            half = half + c
        elif grade == 2:
            center = center + c
        else:
            raise ValueError("element is not in the complexified nilradical")
    a_raw, b_raw = space.fstruct.split_half_complex(half)
    a = np.sqrt(space.scale) * a_raw
    b = np.sqrt(space.scale) * b_raw
    u_plus = sum((am * um for am, um in zip(a_raw, space.fstruct.u_plus_basis)),
                 np.zeros_like(xi))
    u_minus = sum((bm * um for bm, um in zip(b_raw, space.fstruct.u_minus_basis)),
                  np.zeros_like(xi))
    corr = center - 0.5 * (u_plus @ u_minus - u_minus @ u_plus)
    scalar = np.exp(-1j * space.scale * rd.e_pairing(corr))
    op = translation_op(space, a) @ multiplication_op(space, b)
    return FockOperator(space, scalar * op.mat, mult_param=b), scalar


def fock_act_n(space, z, x, zeta):
    """omega(exp(z) exp(x)) zeta for real z in n_{1/2} and central x in n_1."""
    op, _ = fock_act_nilpotent(space, as_cmatrix(z))
    scalar = np.exp(-1j * space.scale * space.rd.e_pairing(as_cmatrix(x)))
    return op.apply(scalar * zeta)


# ---------------------------------------------------------------------------
# kernel, K cap L action, matrix coefficients
# ---------------------------------------------------------------------------

def fock_kernel_value(space, z, w):
    """K(z, w) = e^{<z,w>} for coordinate vectors z, w."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    return np.exp(np.sum(z * np.conj(w)))


def fock_kernel_vector(space, w):
    """Truncation of the reproducing kernel K_w; <F, K_w> = F(w) up to tail."""
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    coeffs = np.zeros(space.dim, dtype=complex)
    for i, alpha in enumerate(space.indices):
        coeffs[i] = np.prod([np.conj(wm) ** am for wm, am in zip(w, alpha)])
        coeffs[i] /= space.norms_sq[i]
    covered = float(np.sum(np.abs(coeffs) ** 2 * space.norms_sq))
    tail = math.sqrt(max(math.exp(float(np.sum(np.abs(w) ** 2))) - covered, 0.0))
    return FockVector(space, coeffs, tail_mass=tail)


def _substitution_matrix(space, v):
    """Matrix of zeta(w) -> zeta(v w) on the monomial basis."""
    dim = space.dim
    mat = np.zeros((dim, dim), dtype=complex)
    # linear forms l_m(w) = sum_j v[m, j] w_j as coefficient vectors
    for col, alpha in enumerate(space.indices):
        poly = np.zeros(dim, dtype=complex)
        poly[space.index_of[(0,) * space.d]] = 1.0
        for m, power in enumerate(alpha):
            for _ in range(power):
                new = np.zeros(dim, dtype=complex)
                for i, beta in enumerate(space.indices):
                    if poly[i] == 0 or sum(beta) >= space.degree_cap + 1:
                        continue
                    for j in range(space.d):
                        if v[m, j] == 0:
                            continue
                        target = list(beta)
                        target[j] += 1
                        if sum(target) <= space.degree_cap:
                            new[space.index_of[tuple(target)]] += poly[i] * v[m, j]
                poly = new
        mat[:, col] = poly
    return mat


def fock_tau(space, k, tol=1e-9):
    """tau(k) zeta(w) = zeta(Ad(k)^{-1} w) for k in K cap L."""
    rd = space.rd
    k = as_cmatrix(k)
    spec = rd.spec
    if np.linalg.norm(k[: spec.p, spec.p:]) > tol or np.linalg.norm(
        k[spec.p:, : spec.p]
    ) > tol:
        raise ValueError("element is not in K (not block diagonal)")
    ad_e = k @ rd.E @ np.linalg.inv(k)
    if np.linalg.norm(ad_e - rd.E) > tol * max(1.0, np.linalg.norm(rd.E)):
        raise ValueError("element is not in L (does not fix E)")
    if space.d == 0:
        return FockOperator.identity(space)
    kinv = np.linalg.inv(k)
    cols = []
    for um in space.fstruct.u_plus_basis:
        image = k @ um @ kinv
        c_plus, c_minus = space.fstruct.split_half_complex(image)
        assert np.linalg.norm(c_minus) < 1e-8, "Ad(k) mixes the J eigenspaces"
        cols.append(c_plus)
    u = np.array(cols).T
    assert np.linalg.norm(u @ u.conj().T - np.eye(space.d)) < 1e-8
    return FockOperator(space, _substitution_matrix(space, np.linalg.inv(u)))


def matrix_coeff_m(space, pi, xi, eta, seed=777):
    """The matrix-coefficient polynomial w -> <pi(kc(n_w^+))^{-1} xi, eta>.

    pi is extended trivially off K_C through the Harish-Chandra projection
    of n_w^+.  The result is an exact polynomial of degree at most
    pi.sym_degree, fitted by least squares on random sample points with the
    residual asserted below MATRIX_COEFF_FIT_TOL.
    """
    rd = space.rd
    deg = pi.sym_degree
    fit_indices = [a for a in space.indices if sum(a) <= deg]
    n_samples = 2 * len(fit_indices) + 4
    rng = np.random.default_rng(seed)
    pts = 0.7 * (rng.standard_normal((n_samples, space.d))
                 + 1j * rng.standard_normal((n_samples, space.d)))
    vand = np.zeros((n_samples, len(fit_indices)), dtype=complex)
    vals = np.zeros(n_samples, dtype=complex)
    for s in range(n_samples):
        w = pts[s]
        half = space.matrix_from_coords_plus(w)
        n_plus = mat_exp(half)
        kc = hc_factorize(rd.spec, n_plus).k
        vals[s] = pi.inner(pi.eval(np.linalg.inv(kc)) @ xi, eta)
        for j, alpha in enumerate(fit_indices):
            vand[s, j] = np.prod([wm**am for wm, am in zip(w, alpha)])
    sol, *_ = np.linalg.lstsq(vand, vals, rcond=None)
    resid = np.linalg.norm(vand @ sol - vals)
    assert resid <= MATRIX_COEFF_FIT_TOL * max(
        1.0, np.linalg.norm(vals)
    ), f"matrix coefficient is not a degree-{deg} polynomial (residual {resid:.2e})"
    coeffs = np.zeros(space.dim, dtype=complex)
    for j, alpha in enumerate(fit_indices):
        coeffs[space.index_of[alpha]] = sol[j]
    return FockVector(space, coeffs)
