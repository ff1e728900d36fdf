import math

import numpy as np
import pytest

from hermwhit.fock import fock_act_nilpotent
from hermwhit.groups import get_group, hc_factorize, random_group_element
from hermwhit.holods import KRep, constant_section, domain_quadrature, kernel_section
from hermwhit.matcore import mat_exp, mat_log_unipotent
from hermwhit.pkn import pkn_factorize
from hermwhit.rootdata import build_root_datum
from hermwhit.whittaker import (
    DIVERGENT,
    WhittakerKernel,
    _psi_from_parts,
    a_eta,
    a_eta_star,
    conjugate_cr_residual,
    gn_l2_norm_full,
    gn_l2_norm_reduced,
    haar_k_sample,
    holo_section_pairing,
    k_cap_l_elements,
    kak_word_element,
    multiplicity_rank,
    reduced_integrand,
    schur_orthogonality,
    t_apply,
    t_lkt_eval,
    t_lkt_kak,
    t_star_section,
    whittaker_function_pi,
)

LKT_TOL = 1e-9
EQUIV_TOL = 1e-8
GAUGE_TOL = 1e-9
NORM_REL_TOL = 1e-9


def _su11_kernel(lam, cap=12):
    rd = build_root_datum("su11")
    pi = KRep.parse(rd.spec, f"char:-{lam}")
    return WhittakerKernel(rd, pi, np.array([1.0 + 0.0j]), degree_cap=cap)


def test_construction_validation():
    rd = build_root_datum("su21")
    pi = KRep.parse(rd.spec, "char:-4")
    with pytest.raises(ValueError):
        WhittakerKernel(rd, pi, np.array([1.0, 0.0]))  # eta has wrong dim
    with pytest.raises(ValueError):
        WhittakerKernel(build_root_datum("su11"), pi, np.array([1.0]))


def test_a_eta_adjoint_pair():
    # <A* xi, zeta>_Fock = <xi, A zeta>_V, exact Gaussian moments
    rd = build_root_datum("su21")
    pi = KRep.parse(rd.spec, "charsym:-4,1")
    wk = WhittakerKernel(rd, pi, np.array([0.6 + 0.2j, -0.3 + 0.1j]),
                         degree_cap=10)
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(10):
        xi = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        zeta = wk.space.vector(rng.standard_normal(wk.space.dim)
                               + 1j * rng.standard_normal(wk.space.dim))
        lhs = a_eta_star(wk, xi).inner(zeta)
        rhs = pi.inner(xi, a_eta(wk, zeta))
        worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-11


def test_whittaker_vector_at_base_point_is_a_star():
    rd = build_root_datum("su21")
    pi = KRep.parse(rd.spec, "charsym:-4,1")
    wk = WhittakerKernel(rd, pi, np.array([0.4 + 0.1j, 0.9]), degree_cap=10)
    psi0 = whittaker_function_pi(wk, z=np.zeros((2, 1), dtype=complex))
    assert np.linalg.norm(psi0.mat - wk.a_star_matrix) < 1e-12
    with pytest.raises(ValueError):
        whittaker_function_pi(wk)


def test_lowest_section_torus_profile():
    # frozen closed form on the disk family:
    # T xi (a_t) = e^{(1 - e^{-2t})/2} e^{-lam t} on the constant mode
    lam = 3
    wk = _su11_kernel(lam)
    rd = wk.rd
    xi = np.array([1.0 + 0.0j])
    for t in np.linspace(-2.0, 2.0, 21):
        g = mat_exp(float(t) * rd.triples[0].x)
        got = complex(t_lkt_eval(wk, xi, g).coeffs[0])
        want = math.exp(0.5 * (1.0 - math.exp(-2 * t))) * math.exp(-lam * t)
        assert abs(got - want) < LKT_TOL * abs(want)


def test_kak_closed_form_matches_direct_evaluation():
    rd = build_root_datum("su21")
    pi = KRep.parse(rd.spec, "charsym:-4,1")
    wk = WhittakerKernel(rd, pi, np.array([0.8, 0.3 - 0.2j]), degree_cap=10)
    rng = np.random.default_rng(19)
    xi = np.array([0.5 + 0.1j, -0.7])
    ls = k_cap_l_elements(rd.spec)
    for i in range(4):
        k1 = haar_k_sample(rd.spec, rng)
        t = rng.uniform(-0.5, 0.9, size=1)
        k2 = ls[i % len(ls)]
        fast = t_lkt_kak(wk, xi, k1, t, k2)
        direct = t_lkt_eval(wk, xi, kak_word_element(rd, k1, t, k2))
        assert np.linalg.norm(fast.coeffs - direct.coeffs) < 1e-9


def test_section_n_equivariance():
    # T xi (x n) = omega(n)^{-1} T xi (x); sampled near the identity where
    # the degree-12 truncation tail is negligible
    rd = build_root_datum("su21")
    pi = KRep.parse(rd.spec, "char:-4")
    wk = WhittakerKernel(rd, pi, np.array([1.0 + 0.0j]), degree_cap=12)
    nil = rd.nilradical(1)
    nbasis = list(nil.half_basis) + list(nil.one_basis)
    xi = np.array([1.0 + 0.0j])
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(20):
        x = random_group_element(rd.spec, rng, scale=0.1)
        v = sum(0.1 * c * b for c, b in zip(rng.uniform(-1, 1, len(nbasis)),
                                            nbasis))
        lhs = t_lkt_eval(wk, xi, x @ mat_exp(v))
        op_inv, _ = fock_act_nilpotent(wk.space, -v)
        rhs = op_inv.apply(t_lkt_eval(wk, xi, x))
        worst = max(worst, np.linalg.norm(lhs.coeffs - rhs.coeffs)
                    / max(np.linalg.norm(rhs.coeffs), 1e-12))
    assert worst < EQUIV_TOL


@pytest.mark.parametrize("label", ["char:-4", "charsym:-4,1"])
def test_gauge_independence(label):
    # re-gauge g = p k n = p (k h)(h^{-1} n) with h in the stabilizer
    # direction; the assembled kernel must not change
    rd = build_root_datum("su21")
    spec = rd.spec
    pi = KRep.parse(spec, label)
    eta = np.ones(pi.dim, dtype=complex) / math.sqrt(pi.dim)
    wk = WhittakerKernel(rd, pi, eta, degree_cap=10)
    rng = np.random.default_rng(17)
    jstar = np.eye(pi.dim, dtype=complex)
    worst = 0.0
    for _ in range(5):
        x = random_group_element(spec, rng, scale=0.5)
        trip = pkn_factorize(rd, x)
        base = _psi_from_parts(wk, trip.k, trip.n_log, jstar).mat
        c = 0.3 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
        h = mat_exp(sum(cj * uj
                        for cj, uj in zip(c, wk.space.fstruct.u_plus_basis)))
        hc = hc_factorize(spec, trip.k @ h)
        assert np.linalg.norm(hc.zminus) < 1e-12
        n_new = np.linalg.inv(h) @ trip.n
        other = _psi_from_parts(wk, hc.k, mat_log_unipotent(n_new), jstar).mat
        worst = max(worst, np.linalg.norm(other - base)
                    / max(1.0, np.linalg.norm(base)))
    assert worst < GAUGE_TOL


def test_whittaker_vectors_are_antiholomorphic():
    rd = build_root_datum("su21")
    pi = KRep.parse(rd.spec, "char:-4")
    wk = WhittakerKernel(rd, pi, np.array([1.0 + 0.0j]), degree_cap=8)
    pts = [np.array([[0.2 + 0.1j], [0.15 - 0.2j]]),
           np.array([[-0.3 + 0.05j], [0.1 + 0.25j]]),
           np.array([[0.05 - 0.4j], [-0.2 - 0.1j]])]
    assert conjugate_cr_residual(wk, np.array([1.0 + 0.0j]), pts) < 1e-6


def test_multiplicity_ranks_and_gap():
    rd1 = build_root_datum("su11")
    r1, sv1 = multiplicity_rank(rd1, KRep.parse(rd1.spec, "char:-3"))
    assert r1 == 1
    rd2 = build_root_datum("su21")
    r2, sv2 = multiplicity_rank(rd2, KRep.parse(rd2.spec, "char:-4"))
    assert r2 == 1
    r3, sv3 = multiplicity_rank(rd2, KRep.parse(rd2.spec, "charsym:-4,1"))
    assert r3 == 2
    assert sv3[-1] > sv3[0] / 1e6


def test_reduced_norm_closed_form_and_dichotomy():
    # integral evaluates to (e/2) Gamma(lam - 1) for the disk family
    for lam in (2, 3, 4):
        wk = _su11_kernel(lam, cap=8)
        val = gn_l2_norm_reduced(wk, np.array([1.0 + 0.0j]))
        want = 0.5 * math.e * math.gamma(lam - 1)
        assert abs(val - want) < NORM_REL_TOL * want
    for lam in (0, 1):
        wk = _su11_kernel(lam, cap=8)
        assert gn_l2_norm_reduced(wk, np.array([1.0 + 0.0j])) is DIVERGENT


def test_reduced_dichotomy_on_the_ball():
    rd = build_root_datum("su21")
    for m, finite in ((2, False), (3, True), (4, True)):
        pi = KRep.parse(rd.spec, f"char:-{m}")
        wk = WhittakerKernel(rd, pi, np.array([1.0 + 0.0j]), degree_cap=8)
        out = gn_l2_norm_reduced(wk, np.array([1.0 + 0.0j]))
        if finite:
            assert isinstance(out, float) and out > 0
        else:
            assert out is DIVERGENT


def test_full_coordinate_norm_matches_reduced():
    wk = _su11_kernel(3)
    xi = np.array([1.0 + 0.0j])
    val, err = gn_l2_norm_full(wk, xi)
    want = gn_l2_norm_reduced(wk, xi)
    assert abs(val - want) < 1e-9 * want
    assert err < 1e-9


def test_full_norm_rejects_non_discrete_parameters():
    from hermwhit.errors import DivergentIntegral
    wk = _su11_kernel(1)
    with pytest.raises(DivergentIntegral):
        gn_l2_norm_full(wk, np.array([1.0 + 0.0j]))


def test_reduced_integrand_values():
    rd = build_root_datum("su11")
    assert abs(reduced_integrand(rd, [3.0], [0.0]) - 1.0) < 1e-14
    t = 0.6
    want = math.exp((1 - math.exp(-2 * t)) - 2 * 3.0 * t + 2 * 1.0 * t)
    assert abs(reduced_integrand(rd, [3.0], [t]) - want) < 1e-12
    rd2 = build_root_datum("su22")
    t = np.array([0.8, 0.3])
    c = -np.expm1(-2.0 * t)
    want = math.exp(float(np.sum(c - 2 * 3.0 * t + 2 * 2.0 * t)))
    want *= math.sinh(t[0] - t[1]) ** 2
    assert abs(reduced_integrand(rd2, [3.0, 3.0], t) - want) < 1e-12


def test_schur_orthogonality_distinct_weights():
    rd = build_root_datum("su11")
    eta = np.array([1.0 + 0.0j])
    wk3 = WhittakerKernel(rd, KRep.parse(rd.spec, "char:-3"), eta)
    wk4 = WhittakerKernel(rd, KRep.parse(rd.spec, "char:-4"), eta)
    val, sigma = schur_orthogonality(wk3, wk4, eta, eta, t_hi=10.0)
    assert abs(val) <= 3.0 * sigma


def test_schur_orthogonality_distinct_eta():
    rd = build_root_datum("su21")
    pi = KRep.parse(rd.spec, "charsym:-4,1")
    wka = WhittakerKernel(rd, pi, np.array([1.0 + 0.0j, 0.0]), degree_cap=8)
    wkb = WhittakerKernel(rd, pi, np.array([0.0, 1.0 + 0.0j]), degree_cap=8)
    xi = np.array([0.7 + 0.1j, 0.3 - 0.2j])
    val, sigma = schur_orthogonality(wka, wkb, xi, xi, t_hi=10.0, n_k=8,
                                     n_l=6)
    assert abs(val) <= 3.0 * sigma


def test_t_apply_constant_matches_lowest_section():
    wk = _su11_kernel(3)
    eta = np.array([1.0 + 0.0j])
    f = constant_section(wk.pi, eta)
    for t in (0.6, -0.4):
        x = mat_exp(t * wk.rd.triples[0].x)
        got = t_apply(wk, f, x)
        want = t_lkt_eval(wk, eta, x)
        assert np.linalg.norm(got.coeffs - want.coeffs) < 1e-5


def test_t_apply_constant_on_the_ball():
    rd = build_root_datum("su21")
    pi = KRep.parse(rd.spec, "char:-4")
    eta = np.array([1.0 + 0.0j])
    wk = WhittakerKernel(rd, pi, eta, degree_cap=8)
    x = mat_exp(0.5 * rd.triples[0].x)
    got = t_apply(wk, constant_section(pi, eta), x)
    want = t_lkt_eval(wk, eta, x)
    assert np.linalg.norm(got.coeffs - want.coeffs) < 1e-6


def test_intertwiner_adjoint_consistency():
    # <T F, f> over finitely supported f equals <F, T* f> when the
    # holomorphic pairing runs at matching angular resolution
    wk = _su11_kernel(3)
    rd = wk.rd
    rng = np.random.default_rng(15)
    xs = [mat_exp(float(t) * rd.triples[0].x) for t in (0.3, -0.4, 0.8)]
    zetas = [wk.space.vector(rng.standard_normal(wk.space.dim)
                             + 1j * rng.standard_normal(wk.space.dim))
             for _ in xs]
    weights = [0.7, -0.2, 0.4]
    F = kernel_section(wk.pi, np.array([[0.25 - 0.15j]]), [1.0])
    kmax = 120
    quad = domain_quadrature(rd.spec, n_rad=160, n_ang=2 * (kmax + 8))
    lhs = sum(w * t_apply(wk, F, x, quad=quad, kmax=kmax).inner(z)
              for w, x, z in zip(weights, xs, zetas))
    tf = t_star_section(wk, list(zip(xs, zetas)), weights)
    rhs = holo_section_pairing(wk.pi, F, tf, 0.85, 2 * (kmax + 8), quad, kmax)
    assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(lhs))


def test_haar_and_stabilizer_samplers():
    spec = get_group("su21")
    rng = np.random.default_rng(33)
    k = haar_k_sample(spec, rng)
    assert np.linalg.norm(k @ k.conj().T - np.eye(3)) < 1e-12
    assert abs(np.linalg.det(k) - 1.0) < 1e-12
    rd = build_root_datum("su21")
    for l in k_cap_l_elements(spec, n_grid=6):
        assert np.linalg.norm(l @ l.conj().T - np.eye(3)) < 1e-12
        assert np.linalg.norm(l @ rd.E @ np.linalg.inv(l) - rd.E) < 1e-12
