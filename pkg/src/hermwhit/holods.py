"""Finite-dimensional holomorphic representations of the complexified maximal
compact subgroup, the associated cocycle j_pi and kernel K_pi, the
vector-valued Bergman-type inner product on the bounded domain, and the
highest-restricted-weight data governing square integrability.

Representations are restricted to integral characters det(A)^m of the first
diagonal block, optionally tensored with a symmetric power Sym^k of that
block; these are single-valued on the matrix group (no branch cuts) and
cover the scalar and lowest vector-valued families.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergentIntegral
from .fock import multi_indices
from .groups import (
    base_point,
    domain_action,
    hc_factorize,
    indef_adjoint,
    universal_cocycle,
    universal_kernel,
)
from .matcore import as_cmatrix, mat_exp

KC_BLOCK_TOL = 1e-9
SCALAR_GRAM_TOL = 1e-6


class KRep:
    """det(A-block)^m or det(A-block)^m (x) Sym^k(A-block).

    The carrier space has the normalized monomial basis
    e_alpha = v^alpha * sqrt(k!/alpha!), making the restriction to the
    compact form unitary with the standard coordinate inner product
    (linear in the first slot).
    """

    def __init__(self, spec, kind, m, k=0):
        if kind not in ("char", "charsym"):
            raise ValueError("kind must be 'char' or 'charsym'")
        if kind == "char":
            k = 0
        if k < 0:
            raise ValueError("symmetric power must be nonnegative")
        self.spec = spec
        self.kind = kind
        self.m = int(m)
        self.k = int(k)
        self._sym_indices = multi_indices(spec.p, self.k)
        self._sym_indices = [a for a in self._sym_indices if sum(a) == self.k]
        self.dim = len(self._sym_indices)

    @classmethod
    def parse(cls, spec, text):
        """Build from 'char:<m>' or 'charsym:<m>,<k>'."""
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        try:
            if kind == "char":
                return cls(spec, "char", int(rest))
            if kind == "charsym":
                m_str, k_str = rest.split(",")
                return cls(spec, "charsym", int(m_str), int(k_str))
        except ValueError as exc:
            raise ValueError(f"cannot parse representation spec {text!r}") from exc
        raise ValueError(f"unknown representation kind {kind!r}")

    @property
    def sym_degree(self):
        return self.k

    def label(self):
        if self.kind == "char":
            return f"char:{self.m}"
        return f"charsym:{self.m},{self.k}"

    def _a_block(self, kmat):
        kmat = as_cmatrix(kmat)
        p = self.spec.p
        off = max(np.linalg.norm(kmat[:p, p:]), np.linalg.norm(kmat[p:, :p]))
        if off > KC_BLOCK_TOL * max(1.0, np.linalg.norm(kmat)):
            raise ValueError("element is not block diagonal (not in K_C)")
        return kmat[:p, :p]

    def eval(self, kmat):
        """The dim x dim matrix of pi at a block-diagonal element."""
        a = self._a_block(kmat)
        det_pow = np.linalg.det(a) ** self.m
        if self.k == 0:
            return np.array([[det_pow]], dtype=complex)
        return det_pow * self._sym_matrix(a)

    def _sym_matrix(self, a):
        p = self.spec.p
        dim = self.dim
        idx = {al: i for i, al in enumerate(self._sym_indices)}
        out = np.zeros((dim, dim), dtype=complex)
        for col, alpha in enumerate(self._sym_indices):
            # expand prod_i (sum_j a[j,i] v_j)^{alpha_i}
            poly = {(0,) * p: 1.0 + 0.0j}
            for i, power in enumerate(alpha):
                for _ in range(power):
                    new = {}
                    for beta, c in poly.items():
                        for j in range(p):
                            if a[j, i] == 0:
                                continue
                            t = list(beta)
                            t[j] += 1
                            t = tuple(t)
                            new[t] = new.get(t, 0.0) + c * a[j, i]
                    poly = new
            for beta, c in poly.items():
                w = math.sqrt(_multi_factorial(beta) / _multi_factorial(alpha))
                out[idx[beta], col] = c * w
        return out

    def eval_parabolic(self, g):
        """pi extended trivially off K_C through the dense factorization."""
        return self.eval(hc_factorize(self.spec, g).k)

    def inner(self, x, y):
        """Carrier-space inner product, linear in the first slot."""
        return complex(np.vdot(y, x))

    def basis_vector(self, i):
        v = np.zeros(self.dim, dtype=complex)
        v[i] = 1.0
        return v

    def highest_weight_vector(self, rd):
        return extract_mu(self, rd)[1]


def _multi_factorial(alpha):
    return float(np.prod([math.factorial(x) for x in alpha]))


# ---------------------------------------------------------------------------
# cocycle and kernel through pi
# ---------------------------------------------------------------------------

def jpi(pi, g, z):
    """j_pi(g, z): inverse of pi on the matrix cocycle."""
    j = universal_cocycle(pi.spec, g, z)
    return pi.eval(np.linalg.inv(j))


def kpi(pi, z, w):
    """K_pi(z, w): inverse of pi on the matrix kernel."""
    kmat = universal_kernel(pi.spec, z, w)
    return pi.eval(np.linalg.inv(kmat))


def kpi_inverse(pi, z, w):
    """K_pi(z, w)^{-1} = pi evaluated directly on the matrix kernel."""
    return pi.eval(universal_kernel(pi.spec, z, w))


def j_pi_inv_star(pi, g, z):
    """j_pi(g,z)^{-*} = pi of the indefinite adjoint of the matrix cocycle."""
    j = universal_cocycle(pi.spec, g, z)
    return pi.eval(indef_adjoint(j, pi.spec.p, pi.spec.q))


# ---------------------------------------------------------------------------
# holomorphic functions on the domain
# ---------------------------------------------------------------------------

class HoloFunction:
    """A V_pi-valued function on the bounded domain given by a closure."""

    def __init__(self, dim, fn, batch_fn=None):
        self.dim = dim
        self._fn = fn
        self._batch_fn = batch_fn

    def __call__(self, z):
        return self._fn(z)

    def eval_batch(self, points):
        if self._batch_fn is not None:
            return self._batch_fn(points)
        return np.array([self._fn(z) for z in points])


def constant_section(pi, xi):
    xi = np.asarray(xi, dtype=complex)
    return HoloFunction(pi.dim, lambda z: xi,
                        lambda pts: np.tile(xi, (len(pts), 1)))


def kernel_section(pi, w, xi):
    """z -> K_pi(z, W) xi, the reproducing section at W."""
    xi = np.asarray(xi, dtype=complex)
    w = np.atleast_2d(np.asarray(w, dtype=complex))

    def fn(z):
        return kpi(pi, z, w) @ xi

    if pi.kind == "char":

        def batch(pts):
            dets = _det_one_minus_zw(pts, w)
            return (dets ** pi.m)[:, None] * xi[None, :]

        return HoloFunction(pi.dim, fn, batch)
    if pi.k == 1:
        # Sym^1 is the standard block, so K_pi(z,w) = det(I-zw*)^m (I-zw*)
        ws = np.conj(w).T

        def batch(pts):
            eye = np.eye(pi.spec.p)
            mats = eye[None] - pts @ ws[None]
            dets = np.linalg.det(mats) ** pi.m
            return dets[:, None] * (mats @ xi)

        return HoloFunction(pi.dim, fn, batch)
    return HoloFunction(pi.dim, fn)


def upi_act(pi, g, f):
    """(U_pi(g) F)(z) = j_pi(g^{-1}, z) F(g^{-1} z)."""
    ginv = np.linalg.inv(as_cmatrix(g))

    def fn(z):
        return jpi(pi, ginv, z) @ f(domain_action(pi.spec, ginv, z))

    if pi.kind == "char":
        # j_char(g,z) = det(Cz+D)^m since det(A-part of the cocycle) is the
        # reciprocal of det(Cz+D) for unimodular g
        p = pi.spec.p
        a, b = ginv[:p, :p], ginv[:p, p:]
        c, d = ginv[p:, :p], ginv[p:, p:]

        def batch(pts):
            den = c[None] @ pts + d[None]          # (N, q, q)
            dets = np.linalg.det(den) ** pi.m       # (N,)
            num = a[None] @ pts + b[None]
            moved = num @ np.linalg.inv(den)
            return dets[:, None] * f.eval_batch(moved)

        return HoloFunction(pi.dim, fn, batch)
    return HoloFunction(pi.dim, fn)


def _det_one_minus_zw(points, w):
    """det(I - z w*) for a stack of domain points against a fixed w."""
    ws = np.conj(w).T
    prods = points @ ws  # (N, p, p)
    eye = np.eye(prods.shape[-1])
    return np.linalg.det(eye[None, :, :] - prods)


# ---------------------------------------------------------------------------
# quadrature on the domain
# ---------------------------------------------------------------------------

class DiskQuadrature:
    """Tensor Gauss-Legendre x uniform-angle rule on the unit disk.

    Exposes points (N,1,1), area weights, and the invariant-measure weights
    dA (1-|z|^2)^{-2}.
    """

    def __init__(self, n_rad=256, n_ang=64):
        self.n_rad = n_rad
        self.n_ang = n_ang
        x, wx = np.polynomial.legendre.leggauss(n_rad)
        r = 0.5 * (x + 1.0)
        wr = 0.5 * wx
        theta = 2.0 * np.pi * np.arange(n_ang) / n_ang
        wt = 2.0 * np.pi / n_ang
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        zz = (rr * np.exp(1j * tt)).ravel()
        self.points = zz.reshape(-1, 1, 1)
        self.area_weights = (np.outer(wr * r, np.full(n_ang, wt))).ravel()
        self.abs_sq = np.abs(zz) ** 2
        self.dstar_weights = self.area_weights / (1.0 - self.abs_sq) ** 2

    def refined(self, factor=2):
        return DiskQuadrature(self.n_rad * factor, self.n_ang)


class BallQuadrature:
    """Product rule on the unit ball in C^2 (domain of 2x1 matrices).

    Coordinates z = r (cos(t) e^{i a}, sin(t) e^{i b}); the volume element is
    r^3 cos(t) sin(t) dr dt da db and the invariant measure carries the extra
    factor (1-|z|^2)^{-3}.
    """

    def __init__(self, n_rad=32, n_t=16, n_ang=16):
        self.shape_params = (n_rad, n_t, n_ang)
        x, wx = np.polynomial.legendre.leggauss(n_rad)
        r = 0.5 * (x + 1.0)
        wr = 0.5 * wx
        t, wt = np.polynomial.legendre.leggauss(n_t)
        theta = 0.25 * np.pi * (t + 1.0)
        wth = 0.25 * np.pi * wt
        ang = 2.0 * np.pi * np.arange(n_ang) / n_ang
        wa = 2.0 * np.pi / n_ang
        pts = []
        wts = []
        for ri, wri in zip(r, wr):
            for ti, wti in zip(theta, wth):
                base = wri * wti * ri**3 * math.cos(ti) * math.sin(ti) * wa * wa
                z1 = ri * math.cos(ti) * np.exp(1j * ang)
                z2 = ri * math.sin(ti) * np.exp(1j * ang)
                for a1 in z1:
                    for a2 in z2:
                        pts.append((a1, a2))
                        wts.append(base)
        arr = np.array(pts)
        self.points = arr.reshape(-1, 2, 1)
        self.area_weights = np.array(wts)
        self.abs_sq = np.sum(np.abs(arr) ** 2, axis=1)
        self.dstar_weights = self.area_weights / (1.0 - self.abs_sq) ** 3

    def refined(self, factor=2):
        n_rad, n_t, n_ang = self.shape_params
        return BallQuadrature(n_rad * factor, n_t, n_ang)


def domain_quadrature(spec, n_rad=None, n_ang=None):
    """Default quadrature for the group's bounded domain."""
    if (spec.p, spec.q) == (1, 1):
        return DiskQuadrature(n_rad or 256, n_ang or 64)
    if (spec.p, spec.q) == (2, 1):
        return BallQuadrature(n_rad or 32, 16, n_ang or 16)
    raise ValueError(f"no quadrature implemented for {spec.name}")


# ---------------------------------------------------------------------------
# the inner product on H_pi
# ---------------------------------------------------------------------------

def _kpi_inverse_weights(pi, quad):
    """Stack of K_pi(z,z)^{-1} over quadrature nodes (vectorized for chars
    and for Sym^1 factors; det(I - zz*) = 1 - |z|^2 on rank-one domains)."""
    if pi.kind == "char":
        lam = -pi.m
        return ((1.0 - quad.abs_sq) ** lam)[:, None, None] * np.eye(1)[None]
    if pi.k == 1:
        pts = quad.points
        eye = np.eye(pi.spec.p)
        mats = eye[None] - pts @ np.conj(np.swapaxes(pts, 1, 2))
        dets = np.linalg.det(mats) ** (-pi.m)
        return dets[:, None, None] * np.linalg.inv(mats)
    out = np.empty((len(quad.points), pi.dim, pi.dim), dtype=complex)
    for i, z in enumerate(quad.points):
        out[i] = kpi_inverse(pi, z, z)
    return out


_NORMALIZATION_CACHE = {}


def ds_normalization(pi, quad):
    """c_pi with c_pi * integral of K_pi(z,z)^{-1} d*z = identity.

    The integral is asserted to be scalar; this is the normalization under
    which constants have their carrier-space norm and the kernel reproduces.
    """
    key = (pi.spec.name, pi.label(), getattr(quad, "shape_params", None) or
           (quad.n_rad, quad.n_ang))
    if key in _NORMALIZATION_CACHE:
        return _NORMALIZATION_CACHE[key]
    kinv = _kpi_inverse_weights(pi, quad)
    mass = np.tensordot(quad.dstar_weights, kinv, axes=(0, 0))
    trace = np.trace(mass) / pi.dim
    if abs(trace) < 1e-300 or not np.isfinite(abs(trace)):
        raise DivergentIntegral("kernel mass is not finite at this parameter")
    assert np.linalg.norm(mass - trace * np.eye(pi.dim)) <= SCALAR_GRAM_TOL * abs(
        trace
    ), "kernel mass matrix is not scalar"
    c = 1.0 / trace.real
    _NORMALIZATION_CACHE[key] = c
    return c


def ds_inner_product(pi, f1, f2, quad=None):
    """<F1, F2> = c_pi * integral <K_pi(z,z)^{-1} F1(z), F2(z)> d*z."""
    if quad is None:
        quad = domain_quadrature(pi.spec)
    c = ds_normalization(pi, quad)
    v1 = f1.eval_batch(quad.points)
    v2 = f2.eval_batch(quad.points)
    kinv = _kpi_inverse_weights(pi, quad)
    integrand = np.einsum("nij,nj,ni->n", kinv, v1, np.conj(v2))
    return c * complex(np.sum(quad.dstar_weights * integrand))


def ds_inner_product_with_error(pi, f1, f2, quad=None):
    """Value at the given resolution plus a refinement-difference estimate."""
    if quad is None:
        quad = domain_quadrature(pi.spec)
    coarse = ds_inner_product(pi, f1, f2, quad)
    fine = ds_inner_product(pi, f1, f2, quad.refined())
    return fine, abs(fine - coarse)


def _raw_norm_sq(pi, f, quad):
    """Unnormalized integral of <K_pi(z,z)^{-1} f(z), f(z)> d*z."""
    v = f.eval_batch(quad.points)
    kinv = _kpi_inverse_weights(pi, quad)
    integrand = np.einsum("nij,nj,ni->n", kinv, v, np.conj(v)).real
    return float(np.sum(quad.dstar_weights * integrand))


def ds_norm_checked(pi, f, quad=None, growth=1.5):
    """Norm^2 of f with divergence detection by refinement growth.

    The unnormalized integral is evaluated at three radial refinements;
    values that keep growing (without Cauchy decay of the increments)
    raise DivergentIntegral.  The returned value carries the fixed
    normalization from the base resolution.
    """
    if quad is None:
        quad = domain_quadrature(pi.spec)
    vals = []
    q = quad
    for _ in range(3):
        vals.append(_raw_norm_sq(pi, f, q))
        q = q.refined()
    d1 = abs(vals[1] - vals[0])
    d2 = abs(vals[2] - vals[1])
    growing = abs(vals[2]) > abs(vals[1]) > abs(vals[0]) > 0
    if growing and (abs(vals[2]) >= growth * abs(vals[0]) or d2 >= 0.8 * d1 > 0):
        raise DivergentIntegral(
            f"norm integral keeps growing under refinement: {vals}",
            partial=vals[-1],
        )
    c = ds_normalization(pi, quad)
    return c * vals[-1], c * d2


# ---------------------------------------------------------------------------
# highest-restricted-weight data
# ---------------------------------------------------------------------------

def extract_mu(pi, rd, t0=0.37, tol=1e-10):
    """mu[j] with pi(exp(t h_j)) xi = prod_j e^{-mu_j t} xi on the selected
    joint eigenvector, together with that (highest-weight) eigenvector.

    The exponents are read off from eigenvalues at t0 and cross-checked at
    2 t0; among joint eigenvectors the one minimizing sum_j mu_j (slowest
    decay, the highest restricted weight) is returned.
    """
    mats = []
    for j in range(rd.rank):
        g1 = mat_exp(t0 * rd.triples[j].h)
        mats.append(pi.eval(g1))
    # simultaneous eigenbasis: the implemented families are simultaneously
    # diagonalizable; diagonalize a random combination to split eigenspaces
    comb = sum((math.sqrt(2 + 7 * j) * m for j, m in enumerate(mats)),
               np.zeros((pi.dim, pi.dim), dtype=complex))
    _, vecs = np.linalg.eig(comb)
    mu_list = []
    for i in range(pi.dim):
        v = vecs[:, i]
        v = v / np.linalg.norm(v)
        mu = np.zeros(rd.rank)
        for j in range(rd.rank):
            ev1 = pi.inner(mats[j] @ v, v)
            resid = np.linalg.norm(mats[j] @ v - ev1 * v)
            assert resid < 1e-8, "representation is not simultaneously diagonal"
            g2 = mat_exp(2 * t0 * rd.triples[j].h)
            ev2 = pi.inner(pi.eval(g2) @ v, v)
            m1 = -np.log(ev1) / t0
            m2 = -np.log(ev2) / (2 * t0)
            # match branches: exponents of the implemented families are real
            assert abs(m1.imag) < 1e-8 and abs(m2.imag) < 1e-8
            assert abs(m1.real - m2.real) < tol * max(1.0, abs(m1.real)), (
                "eigenvalue is not an exact exponential in t"
            )
            mu[j] = m1.real
        mu_list.append((np.sum(mu), mu, v))
    mu_list.sort(key=lambda item: item[0])
    _, mu, vec = mu_list[0]
    return mu, vec


def classify(mu, rho, tol=1e-9):
    """Three-way position of mu against rho: 'above', 'boundary', 'below'."""
    mu = np.asarray(mu, dtype=float)
    rho = np.asarray(rho, dtype=float)
    if np.any(mu < rho - tol):
        return "below"
    if np.all(mu > rho + tol):
        return "above"
    return "boundary"


@dataclass
class DSParams:
    """Square-integrability data for (group, pi)."""

    spec: object
    pi: KRep
    mu: np.ndarray
    rho: np.ndarray
    status: str = field(init=False)

    def __post_init__(self):
        self.status = classify(self.mu, self.rho)

    @property
    def discrete(self):
        return self.status == "above"


def ds_params(pi, rd):
    mu, _ = extract_mu(pi, rd)
    _, _, rho = rd.rho_constants()
    return DSParams(rd.spec, pi, mu, rho)
