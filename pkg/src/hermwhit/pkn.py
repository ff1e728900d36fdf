"""Factorization of group elements through P+ K_C N_C (and the sigma-mirrored
P- K_C N_C), with closed forms for the SL(2)/SU(1,1) family and for split
torus elements, a damped Newton solver for the general case, the j < r
membership test, and gauge fixing.

Gauge convention ("minus gauge"): for the plus factorization the
n_{1/2,C}^+ component of log n vanishes; any other representative differs by
right shift of the k-side with h in K_C P+ cap N_C = exp(n_{1/2,C}^+).  The
mirrored factorization fixes the n_{1/2,C}^- component instead.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import Inconclusive, NotInCell, NotInDenseCell
from .groups import (
    exp_pminus,
    exp_pplus,
    hc_factorize,
    sigma_alg,
    sigma_group,
)
from .matcore import as_cmatrix, mat_exp

MINUS_GAUGE = "minus-gauge"

NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 60
NEWTON_RESTARTS = 8
PLATEAU_TOL = 1e-6
FD_STEP = 1e-6


@dataclass
class PKNTriple:
    """g = exp(emb(p_block)) . k . n  (sign 'plus'; mirrored for 'minus').

    p_block is the p x q coordinate of the P+ factor (q x p for 'minus');
    n_log is the full matrix logarithm of n, with coefficient vectors over
    the half layer (half_coeffs, in the u-minus basis for 'plus') and the
    center layer (one_coeffs).
    """

    rd: object
    sign: str
    p_block: np.ndarray
    k: np.ndarray
    n: np.ndarray
    n_log: np.ndarray
    gauge: str = MINUS_GAUGE
    n_vec: object = None

    def reassemble(self):
        spec = self.rd.spec
        if self.sign == "plus":
            return exp_pplus(spec, self.p_block) @ self.k @ self.n
        return exp_pminus(spec, self.p_block) @ self.k @ self.n

    def residual_against(self, g):
        g = as_cmatrix(g)
        return np.linalg.norm(self.reassemble() - g) / max(1.0, np.linalg.norm(g))

    @property
    def half_coeffs(self):
        fs = self.rd.fock_structure
        c_plus, c_minus = fs.split_half_complex(self._half_part())
        return c_minus if self.sign == "plus" else c_plus

    @property
    def one_coeffs(self):
        fs = self.rd.fock_structure
        comps = self.rd.restricted_decompose(self.n_log)
        v = sum(
            (c for lab, c in comps.items() if sum(lab) == 2),
            np.zeros_like(self.n_log),
        )
        return fs.one_coords(v)

    def _half_part(self):
        comps = self.rd.restricted_decompose(self.n_log)
        return sum(
            (c for lab, c in comps.items() if sum(lab) == 1),
            np.zeros_like(self.n_log),
        )

    def gauge_defect(self):
        """Norm of the log-n component that the gauge requires to vanish."""
        fs = self.rd.fock_structure
        if fs.d == 0:
            return 0.0
        c_plus, c_minus = fs.split_half_complex(self._half_part())
        bad = c_plus if self.sign == "plus" else c_minus
        return float(np.linalg.norm(bad))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def torus_pkn_closed_form(rd, t):
    """Exact factorization of exp(sum t_j x_j).

    zplus = sum (1 - e^{-2 t_j}) e_j, k = exp(-sum t_j h_j), and
    n = exp((1/2i) sum (1 - e^{-2 t_j}) u_j) with u_j = i(h_j - e_j + f_j).
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (rd.rank,):
        raise ValueError(f"expected {rd.rank} torus coordinates")
    c = -np.expm1(-2.0 * t)  # 1 - e^{-2t}, stable for all t
    spec = rd.spec
    zplus = np.zeros((spec.p, spec.q), dtype=complex)
    k = np.eye(spec.n, dtype=complex)
    n_log = np.zeros((spec.n, spec.n), dtype=complex)
    for j, triple in enumerate(rd.triples):
        zplus[j, j] = c[j]
        k[j, j] = np.exp(-t[j])
        k[spec.p + j, spec.p + j] = np.exp(t[j])
        n_log = n_log + (c[j] / 2j) * triple.u
    return PKNTriple(rd, "plus", zplus, k, mat_exp(n_log), n_log)


def _sl2_closed_form(rd, g):
    """Theorem-level closed form on the SL(2,C) family: requires c + d != 0."""
    g = as_cmatrix(g)
    a, b, c, d = g[0, 0], g[0, 1], g[1, 0], g[1, 1]
    den = c + d
    if abs(den) <= 1e-13 * max(1.0, np.linalg.norm(g)):
        raise NotInCell("SL(2) element with c + d = 0 is outside P+ K_C N_C")
    k = np.diag([1.0 / den, den]).astype(complex)
    zplus = np.array([[((a + b) * den - 1.0) / den**2]], dtype=complex)
    w = -1j * c / den
    n_log = w * rd.triples[0].u
    return PKNTriple(rd, "plus", zplus, k, mat_exp(n_log), n_log)


def _try_torus_decode(rd, g, tol=1e-10):
    """Detect g = exp(sum t_j x_j) and return t, else None."""
    g = as_cmatrix(g)
    scale = max(1.0, np.linalg.norm(g))
    if np.linalg.norm(g - g.conj().T) > tol * scale:
        return None
    for triple in rd.triples:
        x = triple.x
        if np.linalg.norm(g @ x - x @ g) > tol * scale:
            return None
    t = np.array(
        [np.arcsinh(g[j, rd.spec.p + j].real) for j in range(rd.rank)]
    )
    recon = mat_exp(sum(tj * tr.x for tj, tr in zip(t, rd.triples)))
    if np.linalg.norm(recon - g) > tol * scale:
        return None
    return t


# ---------------------------------------------------------------------------
# Newton solver
# ---------------------------------------------------------------------------

def _pack_dims(rd):
    fs = rd.fock_structure
    return fs.d, len(fs.one_basis)


def _n_log_from_vec(rd, vec):
    """Real parameter vector -> log n in n^-_{1/2,C} + n_{1,C}."""
    fs = rd.fock_structure
    d, d1 = _pack_dims(rd)
    cm = vec[: 2 * d : 2] + 1j * vec[1 : 2 * d : 2]
    c1 = vec[2 * d :: 2] + 1j * vec[2 * d + 1 :: 2]
    m = np.zeros((rd.n, rd.n), dtype=complex)
    for coef, basis_elt in zip(cm, fs.u_minus_basis):
        m = m + coef * basis_elt
    for coef, basis_elt in zip(c1, fs.one_basis):
        m = m + coef * basis_elt
    return m


def _residual(rd, g, vec):
    """Lower-left block of g n^{-1}; zero iff g n^{-1} in P+ K_C."""
    n_log = _n_log_from_vec(rd, vec)
    m = g @ mat_exp(-n_log)
    c_block = m[rd.spec.p :, : rd.spec.p]
    return np.concatenate([c_block.real.ravel(), c_block.imag.ravel()])


def _newton(rd, g, vec0, tol, max_iter=NEWTON_MAX_ITER):
    vec = vec0.copy()
    res = _residual(rd, g, vec)
    for _ in range(max_iter):
        rnorm = np.linalg.norm(res)
        if rnorm <= tol:
            return vec, rnorm
        m = vec.size
        jac = np.empty((res.size, m))
        for i in range(m):
            bump = np.zeros(m)
            bump[i] = FD_STEP
            jac[:, i] = (
                _residual(rd, g, vec + bump) - _residual(rd, g, vec - bump)
            ) / (2 * FD_STEP)
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        # backtracking damping
        lam = 1.0
        for _ in range(12):
            trial = vec + lam * step
            trial_res = _residual(rd, g, trial)
            if np.linalg.norm(trial_res) < rnorm:
                vec, res = trial, trial_res
                break
            lam *= 0.5
        else:
            return vec, np.linalg.norm(res)  # stalled
    return vec, np.linalg.norm(_residual(rd, g, vec))


def _solve_n_part(rd, g, tol, warm=None):
    """Find the gauge-fixed log n for g in P+ K_C N_C by damped Newton."""
    d, d1 = _pack_dims(rd)
    nvars = 2 * d + 2 * d1
    if nvars == 0:
        return np.zeros(0)
    if warm is not None and len(warm) == nvars:
        vec, rnorm = _newton(rd, g, np.asarray(warm, dtype=float), tol)
        if rnorm <= tol:
            return vec
    vec, rnorm = _newton(rd, g, np.zeros(nvars), tol)
    if rnorm <= tol:
        return vec
    rng = np.random.default_rng(12345)
    best_vec, best_norm = vec, rnorm
    for _ in range(NEWTON_RESTARTS):
        start = 0.5 * rng.standard_normal(nvars)
        vec, rnorm = _newton(rd, g, start, tol)
        if rnorm <= tol:
            return vec
        if rnorm < best_norm:
            best_vec, best_norm = vec, rnorm
    # continuation along exp(s log g), warm-starting each stage
    try:
        x = scipy.linalg.logm(g)
        vec = np.zeros(nvars)
        for s in np.linspace(0.2, 1.0, 5):
            vec, rnorm = _newton(rd, mat_exp(s * x), vec, tol)
        if rnorm <= tol:
            return vec
        if rnorm < best_norm:
            best_norm = rnorm
    except Exception:
        pass
    raise Inconclusive(
        f"Newton residual plateaued at {best_norm:.3e} (> {PLATEAU_TOL}); "
        "membership in the cell is undecided"
    )


def _factorize_plus(rd, g, warm=None):
    g = as_cmatrix(g)
    t = _try_torus_decode(rd, g)
    if t is not None:
        return torus_pkn_closed_form(rd, t)
    if rd.spec.n == 2:
        return _sl2_closed_form(rd, g)
    tol = NEWTON_TOL * max(1.0, np.linalg.norm(g))
    vec = _solve_n_part(rd, g, tol, warm=warm)
    n_log = _n_log_from_vec(rd, vec)
    n = mat_exp(n_log)
    m = g @ mat_exp(-n_log)
    hc = hc_factorize(rd.spec, m)
    if np.linalg.norm(hc.zminus) > 1e-9 * max(1.0, np.linalg.norm(g)):
        raise Inconclusive("residual P- component after Newton solve")
    triple = PKNTriple(rd, "plus", hc.zplus, hc.k, n, n_log)
    triple.n_vec = vec
    return triple


def pkn_factorize(rd, g, sign="plus", warm=None):
    """Factor g through P+ K_C N_C (sign='plus') or P- K_C N_C ('minus').

    Returns the gauge-fixed PKNTriple.  Raises NotInCell when failure is
    certified by a closed form (SL(2) family with c + d = 0), Inconclusive
    when the Newton solve plateaus without certifying either way, and
    NotInDenseCell if the final Harish-Chandra split fails.  `warm` seeds
    the Newton solve with a previous solution vector (n_vec attribute of a
    nearby triple), which speeds up quadrature sweeps.
    """
    if sign == "plus":
        return _factorize_plus(rd, g, warm=warm)
    if sign == "minus":
        return sigma_mirror(_factorize_plus(rd, sigma_group(rd.spec, g)))
    raise ValueError("sign must be 'plus' or 'minus'")


def sigma_mirror(triple):
    """Triple for sigma(g) in the opposite cell, from a triple for g.

    sigma maps P+ to P-, fixes K_C as a set, and preserves N_C; applying
    the mirror twice gives back the original triple.
    """
    rd = triple.rd
    spec = rd.spec
    k = sigma_group(spec, triple.k)
    n_log = sigma_alg(spec, triple.n_log)
    n = mat_exp(n_log)
    if triple.sign == "plus":
        p_mat = sigma_group(spec, exp_pplus(spec, triple.p_block))
        p_block = p_mat[spec.p :, : spec.p].copy()
        return PKNTriple(rd, "minus", p_block, k, n, n_log)
    p_mat = sigma_group(spec, exp_pminus(spec, triple.p_block))
    p_block = p_mat[: spec.p, spec.p :].copy()
    return PKNTriple(rd, "plus", p_block, k, n, n_log)


# ---------------------------------------------------------------------------
# membership in the smaller cells P+ K_C N_{j,C}
# ---------------------------------------------------------------------------

def _nj_complex_basis(rd, j):
    """Real root-space basis of n_j, used with complex coefficients."""
    basis = []
    for label, root in rd.roots.items():
        if sum(label[:j]) > 0:
            basis.extend(root.basis)
    return basis


def pkn_membership(rd, g, j):
    """Decide whether g lies in P+ K_C N_{j,C}.

    Torus elements are decided exactly through the closed form: the
    n-component is sum_k (1 - e^{-2 t_k})/(2i) u_k with u_k spanning
    g^{lambda_k}, and gauge shifts cannot change those components, so
    membership holds iff t_k = 0 for all k > j.  For j = r a successful
    factorization decides membership; otherwise a least-squares Newton
    solve over n_{j,C} coordinates is attempted and Inconclusive is raised
    on a residual plateau.
    """
    g = as_cmatrix(g)
    if not 1 <= j <= rd.rank:
        raise ValueError(f"j must be in 1..{rd.rank}")
    t = _try_torus_decode(rd, g)
    if t is not None:
        return bool(np.all(np.abs(-np.expm1(-2.0 * t[j:])) <= 1e-12))
    if j == rd.rank:
        try:
            pkn_factorize(rd, g)
            return True
        except (NotInCell, NotInDenseCell):
            return False
    basis = _nj_complex_basis(rd, j)
    nvars = 2 * len(basis)
    tol = NEWTON_TOL * max(1.0, np.linalg.norm(g))

    def residual(vec):
        coef = vec[::2] + 1j * vec[1::2]
        n_log = sum(c * b for c, b in zip(coef, basis))
        m = g @ mat_exp(-n_log)
        c_block = m[rd.spec.p :, : rd.spec.p]
        return np.concatenate([c_block.real.ravel(), c_block.imag.ravel()])

    vec = np.zeros(nvars)
    rng = np.random.default_rng(54321)
    best = np.inf
    for attempt in range(1 + NEWTON_RESTARTS):
        if attempt:
            vec = 0.5 * rng.standard_normal(nvars)
        res = residual(vec)
        for _ in range(NEWTON_MAX_ITER):
            rnorm = np.linalg.norm(res)
            if rnorm <= tol:
                return True
            jac = np.empty((res.size, nvars))
            for i in range(nvars):
                bump = np.zeros(nvars)
                bump[i] = FD_STEP
                jac[:, i] = (residual(vec + bump) - residual(vec - bump)) / (
                    2 * FD_STEP
                )
            step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
            lam, improved = 1.0, False
            for _ in range(12):
                trial = vec + lam * step
                trial_res = residual(trial)
                if np.linalg.norm(trial_res) < rnorm:
                    vec, res, improved = trial, trial_res, True
                    break
                lam *= 0.5
            if not improved:
                break
        best = min(best, np.linalg.norm(res))
    raise Inconclusive(
        f"membership solve for j={j} plateaued at residual {best:.3e}"
    )
