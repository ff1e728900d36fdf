"""Intertwining kernels from the holomorphic model into the Fock model of the
nilradical, the lowest-K-type sections, Whittaker vectors, and the L2(G/N)
norm in (K, a, K cap L) coordinates.

The central composite is

  Psi*(x, g.o) xi = omega(nC+(g^{-1}x))^{-1} o A_eta* o pi(kC+(g^{-1}x))^{-1}
                     o j_pi(g, o)^{-*} xi,

computed through the P+ K_C N_C factorization of g^{-1}x.  On torus words
k1 a k2 the N_C-part of a is central, so the Fock action reduces to an
explicit scalar and the section has a closed form used for fast L2 sweeps.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentIntegral
from .fock import (FockSpace, FockVector, fock_act_nilpotent,
                   matrix_coeff_m)
from .groups import base_point, transvection
from .holods import (
    classify,
    domain_quadrature,
    ds_normalization,
    extract_mu,
    j_pi_inv_star,
    _kpi_inverse_weights,
)
from .matcore import as_cmatrix, mat_exp
from .pkn import pkn_factorize, torus_pkn_closed_form

# lower cutoff of the A-integral: the double-exponential damping factor
# exp(s(1 - e^{-2t})) is below 1e-16 relative for t < -1.83 at s = 1
T_LOWER = -2.5
GROWTH_FACTOR = 1.5
GROWTH_RUNS = 3


class Divergent:
    """Sentinel value returned by reduced-norm integration on divergence."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Divergent"


DIVERGENT = Divergent()


@dataclass
class SectionSample:
    """A sampled section value at the base point k.exp(sum t_j x_j).l."""

    k: np.ndarray
    t: np.ndarray
    l: np.ndarray
    value: FockVector


class WhittakerKernel:
    """Evaluation context for the kernels Psi_{pi,eta} on one group."""

    def __init__(self, rd, pi, eta, degree_cap=12, scale=1.0):
        if pi.spec.name != rd.spec.name:
            raise ValueError("representation and root datum belong to "
                             "different groups")
        self.rd = rd
        self.spec = rd.spec
        self.pi = pi
        self.eta = np.asarray(eta, dtype=complex)
        if self.eta.shape != (pi.dim,):
            raise ValueError("eta must be a V_pi vector")
        self.space = FockSpace(rd, degree_cap=degree_cap, scale=scale)
        self._a_star = None
        self._a = None
        self._psi_cache = {}

    @property
    def a_star_matrix(self):
        """Columns: Fock coefficients of A_eta* on the V_pi basis."""
        if self._a_star is None:
            cols = [
                matrix_coeff_m(self.space, self.pi, self.pi.basis_vector(i),
                               self.eta).coeffs
                for i in range(self.pi.dim)
            ]
            self._a_star = np.stack(cols, axis=1)
        return self._a_star

    @property
    def a_matrix(self):
        """A_eta: Fock -> V_pi, the Gram adjoint of a_star_matrix."""
        if self._a is None:
            g = self.space.norms_sq
            self._a = np.conj(self.a_star_matrix).T * g[None, :]
        return self._a

    def identity_element(self):
        return np.eye(self.spec.n, dtype=complex)


def a_eta_star(wk, xi):
    """A_eta* xi: the matrix-coefficient polynomial as a FockVector."""
    xi = np.asarray(xi, dtype=complex)
    return wk.space.vector(wk.a_star_matrix @ xi)


def a_eta(wk, zeta):
    """A_eta zeta in V_pi, adjoint of a_eta_star (exact Gaussian moments)."""
    return wk.a_matrix @ zeta.coeffs


class PsiStarMap:
    """Psi*(x, z): V_pi -> Fock, stored as a coefficient matrix."""

    def __init__(self, space, mat):
        self.space = space
        self.mat = mat

    def apply(self, xi):
        return self.space.vector(self.mat @ np.asarray(xi, dtype=complex))

    def adjoint_apply(self, zeta):
        """Psi(x, z) zeta in V_pi (Fock-Gram adjoint)."""
        return np.conj(self.mat).T @ (self.space.norms_sq * zeta.coeffs)


def _psi_from_parts(wk, kmat, nlog, jstar):
    """Assemble the Psi* composite from factorization data.

    omega(n)^{-1} is built as omega(exp(-log n)) rather than by inverting
    omega(n): near the domain boundary the central scalar of omega(n)
    overflows while that of the inverse merely underflows to zero.
    """
    op_inv, _ = fock_act_nilpotent(wk.space, -nlog)
    kpart = wk.pi.eval(np.linalg.inv(kmat))
    return PsiStarMap(wk.space, op_inv.mat @ wk.a_star_matrix @ kpart @ jstar)


def psi_eval(wk, x, g, warm=None):
    """Psi*(x, g.o) as a PsiStarMap; cached on (x, g)."""
    x = as_cmatrix(x)
    g = as_cmatrix(g)
    key = (x.tobytes(), g.tobytes())
    hit = wk._psi_cache.get(key)
    if hit is not None:
        return hit
    y = np.linalg.solve(g, x)
    triple = pkn_factorize(wk.rd, y, sign="plus", warm=warm)
    jstar = j_pi_inv_star(wk.pi, g, base_point(wk.spec))
    out = _psi_from_parts(wk, triple.k, triple.n_log, jstar)
    out.triple = triple
    wk._psi_cache[key] = out
    return out


def t_lkt_eval(wk, xi, x):
    """T_{pi,eta} xi (x) = Psi*(x, o) xi, the lowest-K-type section."""
    return psi_eval(wk, x, wk.identity_element()).apply(xi)


def central_scalar_inv(wk, t):
    """1/omega(nC+(a_t)) on the torus: exp(+(s/2) sum_j (1 - e^{-2 t_j}))."""
    c = -np.expm1(-2.0 * np.asarray(t, dtype=float))
    return math.exp(0.5 * wk.space.scale * float(np.sum(c)))


def t_lkt_kak(wk, xi, k1, t, k2):
    """Closed-form section on a torus word x = k1 exp(sum t_j x_j) k2.

    The N_C-part of the torus factorization is central and commutes with
    the K cap L conjugation, so no Newton solve is needed.
    """
    trip = torus_pkn_closed_form(wk.rd, t)
    kword = as_cmatrix(k1) @ trip.k @ as_cmatrix(k2)
    v = wk.pi.eval(np.linalg.inv(kword)) @ np.asarray(xi, dtype=complex)
    scal = central_scalar_inv(wk, t)
    return wk.space.vector(scal * (wk.a_star_matrix @ v))


def kak_word_element(rd, k1, t, k2):
    """The group element k1 exp(sum t_j x_j) k2."""
    h = sum(tj * trip.x for tj, trip in zip(np.atleast_1d(t), rd.triples))
    return as_cmatrix(k1) @ mat_exp(h) @ as_cmatrix(k2)


def whittaker_function_pi(wk, z=None, g=None):
    """Pi_{pi,eta}(z) = Psi*(e, z): the Whittaker vector at z = g.o."""
    if g is None:
        if z is None:
            raise ValueError("provide z or g")
        g = transvection(wk.spec, z)
    return psi_eval(wk, wk.identity_element(), g)


def conjugate_cr_residual(wk, xi, points, h=1e-5):
    """Max Cauchy-Riemann residual of the holomorphic derivative of
    z -> Pi(z) xi over the sample points (zero iff antiholomorphic)."""
    spec = wk.spec
    worst = 0.0
    for z in points:
        z = np.asarray(z, dtype=complex)
        base = whittaker_function_pi(wk, z=z).apply(xi).coeffs
        scale = max(1.0, np.linalg.norm(base))
        for a in range(spec.p):
            for b in range(spec.q):
                e = np.zeros_like(z)
                e[a, b] = 1.0
                fp = whittaker_function_pi(wk, z=z + h * e).apply(xi).coeffs
                fm = whittaker_function_pi(wk, z=z - h * e).apply(xi).coeffs
                fip = whittaker_function_pi(wk, z=z + 1j * h * e).apply(xi).coeffs
                fim = whittaker_function_pi(wk, z=z - 1j * h * e).apply(xi).coeffs
                d_re = (fp - fm) / (2 * h)
                d_im = (fip - fim) / (2 * h)
                resid = 0.5 * np.linalg.norm(d_re - 1j * d_im)
                worst = max(worst, resid / scale)
    return worst


# ---------------------------------------------------------------------------
# L2(G/N) norms
# ---------------------------------------------------------------------------

def reduced_integrand(rd, mu, t, scale=1.0):
    """Pointwise chamber integrand: the central-scalar square, the highest
    weight decay, the a^{2 rho_n} density, and the Levi KAK density w."""
    t = np.asarray(t, dtype=float)
    mu = np.asarray(mu, dtype=float)
    rho_n = rd.rho_constants()[0]
    c = -np.expm1(-2.0 * t)
    expo = scale * c - 2.0 * mu * t + 2.0 * rho_n * t
    return math.exp(float(np.sum(expo))) * rd.l_density_w(t)


def _gl_panel_rule(lo, hi, nodes_per_unit=10, min_nodes=24):
    n = max(min_nodes, int(math.ceil((hi - lo) * nodes_per_unit)))
    x, w = np.polynomial.legendre.leggauss(n)
    pts = 0.5 * (hi - lo) * (x + 1.0) + lo
    wts = 0.5 * (hi - lo) * w
    return pts, wts


def _chamber_integral(rd, mu, t_hi, scale=1.0):
    """Integral of the reduced integrand over the chamber cut at t_hi."""
    r = rd.rank
    if r == 1:
        pts, wts = _gl_panel_rule(T_LOWER, t_hi)
        vals = np.array([reduced_integrand(rd, mu, [t], scale) for t in pts])
        return float(np.sum(wts * vals))
    if r == 2:
        p1, w1 = _gl_panel_rule(T_LOWER, t_hi)
        total = 0.0
        for t1, wt1 in zip(p1, w1):
            if t1 <= T_LOWER:
                continue
            p2, w2 = _gl_panel_rule(T_LOWER, t1)
            inner = sum(
                wt2 * reduced_integrand(rd, mu, [t1, t2], scale)
                for t2, wt2 in zip(p2, w2)
            )
            total += wt1 * inner
        return total
    raise ValueError("chamber integration implemented for rank <= 2")


def gn_l2_norm_reduced(wk, xi=None, t_hi0=4.0, max_doublings=7, rel_tol=1e-9):
    """Reduced-coordinate L2(G/N) norm of the section T xi.

    Returns a float, or the DIVERGENT sentinel when partial integrals over
    the doubled upper cutoffs grow by >= 1.5x three times in a row.
    """
    mu, hw = extract_mu(wk.pi, wk.rd)
    if xi is None:
        xi = hw
    const = a_eta_star(wk, xi).norm() ** 2
    vals = []
    t_hi = t_hi0
    for _ in range(max_doublings + 1):
        vals.append(_chamber_integral(wk.rd, mu, t_hi, wk.space.scale))
        if len(vals) >= 2 and abs(vals[-1] - vals[-2]) <= rel_tol * abs(vals[-1]):
            return const * vals[-1]
        if len(vals) >= GROWTH_RUNS + 1:
            tail = vals[-(GROWTH_RUNS + 1):]
            if all(b >= GROWTH_FACTOR * a for a, b in zip(tail, tail[1:])):
                return DIVERGENT
        t_hi *= 2.0
    # growing without the full 1.5x pattern and without stabilizing
    if vals[-1] > vals[0] * GROWTH_FACTOR:
        return DIVERGENT
    return const * vals[-1]


def haar_k_sample(spec, rng):
    """A Haar sample from K for the implemented groups."""
    if spec.name == "su11":
        th = rng.uniform(0.0, 2.0 * np.pi)
        return np.diag([np.exp(1j * th), np.exp(-1j * th)])
    if spec.name == "su21":
        gin = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        q, r = np.linalg.qr(gin)
        q = q @ np.diag(np.diag(r) / np.abs(np.diag(r)))
        k = np.zeros((3, 3), dtype=complex)
        k[:2, :2] = q
        k[2, 2] = 1.0 / np.linalg.det(q)
        return k
    raise ValueError(f"no K sampler for {spec.name}")


def k_cap_l_elements(spec, n_grid=12):
    """A uniform grid on K cap L (the stabilizer of the cone point)."""
    if spec.name == "su11":
        return [np.eye(2, dtype=complex), -np.eye(2, dtype=complex)]
    if spec.name == "su21":
        out = []
        for j in range(n_grid):
            phi = 2.0 * np.pi * j / n_grid
            out.append(np.diag([np.exp(1j * phi), np.exp(-2j * phi),
                                np.exp(1j * phi)]))
        return out
    raise ValueError(f"no K cap L grid for {spec.name}")


def _check_discrete(wk, mu):
    _, _, rho = wk.rd.rho_constants()
    status = classify(mu, rho)
    if status != "above":
        raise DivergentIntegral(
            f"parameters classified '{status}' against rho={rho}; "
            "full-coordinate integral rejected"
        )


def gn_l2_norm_full(wk, xi, t_hi=14.0, n_k=32, n_l=12, seed=2020):
    """L2(G/N) norm of T xi over K x A x (K cap L) coordinates.

    The A-part uses the exact torus closed form of the section (no Newton
    solves), the K-part averages Haar samples (a uniform exact grid for
    the circle group), and the density is a^{2 rho_n} w(a).  Returns
    (value, error_estimate); rejects non-discrete parameters.
    """
    rd = wk.rd
    mu, _ = extract_mu(wk.pi, rd)
    _check_discrete(wk, mu)
    if rd.rank != 1:
        raise ValueError("full-coordinate integration implemented for "
                         "rank-one groups")
    rho_n = rd.rho_constants()[0]
    rng = np.random.default_rng(seed)
    if wk.spec.name == "su11":
        ks = [np.diag([np.exp(1j * th), np.exp(-1j * th)])
              for th in 2.0 * np.pi * np.arange(16) / 16]
    else:
        ks = [haar_k_sample(wk.spec, rng) for _ in range(n_k)]
    ls = k_cap_l_elements(wk.spec, n_grid=n_l)

    def value_at(nodes_per_unit):
        pts, wts = _gl_panel_rule(T_LOWER, t_hi, nodes_per_unit)
        k_values = []
        for k1 in ks:
            acc = 0.0
            for l2 in ls:
                for t, w in zip(pts, wts):
                    sec = t_lkt_kak(wk, xi, k1, [t], l2)
                    dens = math.exp(2.0 * rho_n[0] * t)
                    acc += w * dens * sec.norm() ** 2
            k_values.append(acc / len(ls))
        return float(np.mean(k_values)), k_values

    v_coarse, _ = value_at(6)
    v_fine, k_values = value_at(10)
    quad_err = abs(v_fine - v_coarse)
    mc_err = (np.std(k_values) / math.sqrt(len(k_values))
              if len(k_values) > 1 else 0.0)
    return v_fine, quad_err + mc_err


def schur_orthogonality(wk1, wk2, xi1, xi2, t_hi=14.0, n_k=32, n_l=12,
                        seed=2020):
    """<T1 xi1, T2 xi2> over L2(G/N) samples; returns (value, sigma).

    Both kernels must live on the same group and Fock context.  sigma
    combines the quadrature refinement difference with the Monte-Carlo
    standard error of the K-average.
    """
    if wk1.spec.name != wk2.spec.name:
        raise ValueError("kernels on different groups")
    rd = wk1.rd
    for wk in (wk1, wk2):
        mu, _ = extract_mu(wk.pi, rd)
        _check_discrete(wk, mu)
    if rd.rank != 1:
        raise ValueError("implemented for rank-one groups")
    rho_n = rd.rho_constants()[0]
    rng = np.random.default_rng(seed)
    if wk1.spec.name == "su11":
        ks = [np.diag([np.exp(1j * th), np.exp(-1j * th)])
              for th in 2.0 * np.pi * np.arange(16) / 16]
    else:
        ks = [haar_k_sample(wk1.spec, rng) for _ in range(n_k)]
    ls = k_cap_l_elements(wk1.spec, n_grid=n_l)

    def value_at(nodes_per_unit):
        pts, wts = _gl_panel_rule(T_LOWER, t_hi, nodes_per_unit)
        k_values = []
        for k1 in ks:
            acc = 0.0 + 0.0j
            for l2 in ls:
                for t, w in zip(pts, wts):
                    s1 = t_lkt_kak(wk1, xi1, k1, [t], l2)
                    s2 = t_lkt_kak(wk2, xi2, k1, [t], l2)
                    dens = math.exp(2.0 * rho_n[0] * t)
                    acc += w * dens * s1.inner(s2)
            k_values.append(acc / len(ls))
        return complex(np.mean(k_values)), k_values

    v_coarse, _ = value_at(6)
    v_fine, k_values = value_at(10)
    sigma = abs(v_fine - v_coarse)
    if len(k_values) > 1:
        sigma += float(np.std(np.asarray(k_values))) / math.sqrt(len(k_values))
    return v_fine, max(sigma, 1e-14 * (1.0 + abs(v_fine)))


# ---------------------------------------------------------------------------
# the intertwiner on kernel-section spans
# ---------------------------------------------------------------------------

def _antiholo_mode_table(wk, x, polyradius, n_ang, kmax):
    """Monomial coefficients of the antiholomorphic family z -> Psi*(x, z).

    The family is sampled on a product torus of the given polyradius, well
    inside the domain, and the coefficients are read off by FFT.  Interior
    sampling is essential: the family has boundary singularities, so its
    angular spectrum on near-boundary rings decays too slowly for direct
    tensor quadrature, while on an interior torus the aliasing terms are
    suppressed by polyradius**n_ang.
    """
    x = as_cmatrix(x)
    rho = np.atleast_1d(np.asarray(polyradius, dtype=float))
    ang = 2.0 * np.pi * np.arange(n_ang) / n_ang
    warm = None

    def sample(z):
        nonlocal warm
        g = transvection(wk.spec, z)
        psi = psi_eval(wk, x, g, warm=warm)
        trip = getattr(psi, "triple", None)
        if trip is not None and trip.n_vec is not None:
            warm = trip.n_vec
        return psi.mat

    if len(rho) == 1:
        mats = np.stack([sample(np.array([[rho[0] * np.exp(1j * th)]]))
                         for th in ang])
        coef = np.fft.ifft(mats, axis=0)
        return {(k,): coef[k] / rho[0] ** k for k in range(kmax + 1)}
    if len(rho) == 2:
        mats = np.stack([
            np.stack([sample(np.array([[rho[0] * np.exp(1j * t1)],
                                       [rho[1] * np.exp(1j * t2)]]))
                      for t2 in ang])
            for t1 in ang])
        coef = np.fft.ifft2(mats, axes=(0, 1))
        return {(k1, k2): coef[k1, k2] / (rho[0] ** k1 * rho[1] ** k2)
                for k1 in range(kmax + 1) for k2 in range(kmax + 1)}
    raise ValueError("mode table implemented for the disk and the 2-ball")


def _monomial_moments(pi, f, quad, kmax):
    """Normalized moments m_k = c_pi int conj(z)^k K_pi(z,z)^{-1} F(z) d*z."""
    c = ds_normalization(pi, quad)
    kinv = _kpi_inverse_weights(pi, quad)
    fv = f.eval_batch(quad.points)
    wtarg = quad.dstar_weights[:, None] * np.einsum("nij,nj->ni", kinv, fv)
    zc = np.conj(quad.points[:, :, 0])
    out = {}
    if zc.shape[1] == 1:
        cur = np.ones(zc.shape[0], dtype=complex)
        for k in range(kmax + 1):
            out[(k,)] = c * (cur[:, None] * wtarg).sum(axis=0)
            cur = cur * zc[:, 0]
        return out
    cur1 = np.ones(zc.shape[0], dtype=complex)
    for k1 in range(kmax + 1):
        cur = cur1.copy()
        for k2 in range(kmax + 1):
            out[(k1, k2)] = c * (cur[:, None] * wtarg).sum(axis=0)
            cur = cur * zc[:, 1]
        cur1 = cur1 * zc[:, 0]
    return out


def t_apply(wk, f, x, quad=None, kmax=None):
    """T F (x) = c_pi * integral of Psi*(x,z) K_pi(z,z)^{-1} F(z) d*z.

    Evaluated in polar-separated form: the antiholomorphic Psi*-family is
    expanded in conjugate monomials (interior-torus FFT) and paired against
    the matching moments of F, so no Psi* evaluation ever happens near the
    domain boundary.
    """
    mu, _ = extract_mu(wk.pi, wk.rd)
    _check_discrete(wk, mu)
    if wk.spec.name == "su11":
        kmax = 120 if kmax is None else kmax
        if quad is None:
            quad = domain_quadrature(wk.spec, n_rad=160, n_ang=2 * (kmax + 8))
        modes = _antiholo_mode_table(wk, x, 0.85, 2 * (kmax + 8), kmax)
    elif wk.spec.name == "su21":
        kmax = 20 if kmax is None else kmax
        if quad is None:
            from .holods import BallQuadrature
            quad = BallQuadrature(16, 12, 2 * (kmax + 4))
        modes = _antiholo_mode_table(wk, x, (0.62, 0.62), 2 * (kmax + 4), kmax)
    else:
        raise ValueError("t_apply implemented for the disk and the 2-ball")
    moments = _monomial_moments(wk.pi, f, quad, kmax)
    acc = np.zeros(wk.space.dim, dtype=complex)
    for k, mk in moments.items():
        acc += modes[k] @ mk
    return wk.space.vector(acc)


def holo_section_pairing(pi, f, g, polyradius, n_ang, quad, kmax):
    """<f, g> on H_pi when g may be singular at the domain boundary.

    g's Taylor coefficients are read off by FFT on an interior product torus
    and paired against the weighted monomial moments of f, which avoids the
    angular aliasing a direct node sum over near-boundary rings would incur.
    """
    rho = np.atleast_1d(np.asarray(polyradius, dtype=float))
    ang = 2.0 * np.pi * np.arange(n_ang) / n_ang
    if len(rho) == 1:
        vals = np.stack([g(np.array([[rho[0] * np.exp(1j * th)]]))
                         for th in ang])
        coef = np.fft.fft(vals, axis=0) / n_ang
        gk = {(k,): coef[k] / rho[0] ** k for k in range(kmax + 1)}
    elif len(rho) == 2:
        vals = np.stack([
            np.stack([g(np.array([[rho[0] * np.exp(1j * t1)],
                                       [rho[1] * np.exp(1j * t2)]]))
                      for t2 in ang])
            for t1 in ang])
        coef = np.fft.fft2(vals, axes=(0, 1)) / n_ang**2
        gk = {(k1, k2): coef[k1, k2] / (rho[0] ** k1 * rho[1] ** k2)
              for k1 in range(kmax + 1) for k2 in range(kmax + 1)}
    else:
        raise ValueError("pairing implemented for the disk and the 2-ball")
    moments = _monomial_moments(pi, f, quad, kmax)
    return complex(sum(np.vdot(gk[k], moments[k]) for k in gk))


def t_star_section(wk, samples, weights):
    """T* f as a holomorphic section for finitely supported f on G/N.

    f is given by group points x_i (samples) with V-side values folded in:
    each entry of `samples` is (x_i, zeta_i) with zeta_i a FockVector, and
    T* f (z) = sum_i w_i Psi(x_i, z) zeta_i.
    """
    from .holods import HoloFunction

    def fn(z):
        g = transvection(wk.spec, z)
        out = np.zeros(wk.pi.dim, dtype=complex)
        for (x, zeta), w in zip(samples, weights):
            out += w * psi_eval(wk, x, g).adjoint_apply(zeta)
        return out

    return HoloFunction(wk.pi.dim, fn)


# ---------------------------------------------------------------------------
# multiplicity machinery
# ---------------------------------------------------------------------------

def standard_sample_words(rd, n_words=12, seed=99, t_scale=0.8):
    """Deterministic torus words (k1, t, k2) covering K x chamber x KcapL."""
    rng = np.random.default_rng(seed)
    ls = k_cap_l_elements(rd.spec)
    words = []
    for i in range(n_words):
        k1 = haar_k_sample(rd.spec, rng)
        t = np.sort(rng.uniform(-0.6, t_scale, size=rd.rank))[::-1]
        k2 = ls[i % len(ls)]
        words.append((k1, t, k2))
    return words


def section_samples(wk, xi, words):
    """SectionSample list for the given torus words (closed-form path)."""
    out = []
    for k1, t, k2 in words:
        val = t_lkt_kak(wk, xi, k1, t, k2)
        out.append(SectionSample(np.asarray(k1), np.asarray(t),
                                 np.asarray(k2), val))
    return out


def multiplicity_rank(rd, pi, xi=None, degree_cap=8, n_words=12, seed=99,
                      gap=1e6):
    """Numerical rank of eta -> (sampled section), with singular values.

    Stacks the section samples of t_lkt over an eta-basis; the rank counts
    singular values within `gap` of the largest.
    """
    words = standard_sample_words(rd, n_words=n_words, seed=seed)
    if xi is None:
        xi = np.zeros(pi.dim, dtype=complex)
        xi[:] = 1.0 / math.sqrt(pi.dim)
    rows = []
    for i in range(pi.dim):
        eta = np.zeros(pi.dim, dtype=complex)
        eta[i] = 1.0
        wk = WhittakerKernel(rd, pi, eta, degree_cap=degree_cap)
        row = np.concatenate([t_lkt_kak(wk, xi, k1, t, k2).coeffs
                              for k1, t, k2 in words])
        rows.append(row)
    mat = np.stack(rows)
    svals = np.linalg.svd(mat, compute_uv=False)
    rank = int(np.sum(svals > svals[0] / gap))
    return rank, svals
