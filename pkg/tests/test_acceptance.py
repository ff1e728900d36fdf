"""Acceptance gate: the twelve end-to-end criteria, one pass/fail line each.

Each test prints `ACCEPTANCE <nn> <description>: PASS|FAIL` (visible with
pytest -s, or on failure) and enforces both the stated tolerance and the
runtime budget.
"""

import math
import subprocess
import sys
import time

import numpy as np

from hermwhit.fock import FockSpace, fock_act_nc, fock_act_nilpotent
from hermwhit.groups import get_group, random_group_element
from hermwhit.holods import (
    KRep,
    constant_section,
    domain_quadrature,
    ds_inner_product,
    kernel_section,
)
from hermwhit.matcore import mat_exp
from hermwhit.pkn import pkn_factorize, pkn_membership
from hermwhit.rootdata import build_root_datum, moore_table
from hermwhit.verify import suite_cocycle
from hermwhit.whittaker import (
    DIVERGENT,
    WhittakerKernel,
    a_eta_star,
    conjugate_cr_residual,
    gn_l2_norm_full,
    gn_l2_norm_reduced,
    multiplicity_rank,
    t_lkt_eval,
    whittaker_function_pi,
)


def _crit(num, desc, ok, elapsed=None, budget=None):
    if budget is not None and elapsed >= budget:
        ok = False
    stamp = f" [{elapsed:.2f}s/{budget:.0f}s]" if budget is not None else ""
    print(f"ACCEPTANCE {num:02d} {desc}: {'PASS' if ok else 'FAIL'}{stamp}")
    assert ok, f"acceptance criterion {num} failed"


def test_criterion_01_torus_closed_forms():
    t0 = time.perf_counter()
    worst = 0.0
    for name in ("sl2", "su11"):
        rd = build_root_datum(name)
        tri = rd.triples[0]
        for t in np.linspace(-3.0, 3.0, 50):
            g = mat_exp(float(t) * tri.x)
            trip = pkn_factorize(rd, g)
            c = -math.expm1(-2.0 * t)
            worst = max(worst, abs(trip.p_block[0, 0] - c))
            worst = max(worst, float(np.linalg.norm(
                trip.k - mat_exp(-float(t) * tri.h))))
            w = np.vdot(tri.u, trip.n_log) / np.vdot(tri.u, tri.u)
            worst = max(worst, abs(w - c / 2j))
    _crit(1, "torus factorization closed forms (50 pts, 1e-12)",
          worst <= 1e-12, time.perf_counter() - t0, 1.0)


def test_criterion_02_cocycle_kernel_identities():
    t0 = time.perf_counter()
    cases = suite_cocycle(7, trials=1000)
    worst = max(c.measured for c in cases)
    _crit(2, "six cocycle/kernel identities (1000 trials, 1e-9)",
          worst <= 1e-9, time.perf_counter() - t0, 10.0)


def test_criterion_03_cell_membership():
    t0 = time.perf_counter()
    rd = build_root_datum("su22")
    g2 = mat_exp(rd.triples[1].x)
    ok = pkn_membership(rd, g2, 1) is False
    ok &= pkn_membership(rd, g2, 2) is True
    for name in ("su11", "su21"):
        rd1 = build_root_datum(name)
        ok &= pkn_membership(rd1, mat_exp(rd1.triples[0].x), 1) is True
    _crit(3, "maximal-parabolic cell membership (exact)",
          ok, time.perf_counter() - t0, 1.0)


def test_criterion_04_multiplicity_tables():
    t0 = time.perf_counter()
    ok = True
    for name in ("su11", "su21", "su22"):
        rd = build_root_datum(name)
        ok &= rd.observed_table() == moore_table(rd.spec.p, rd.spec.q)
    _crit(4, "restricted-root multiplicity tables (exact)",
          ok, time.perf_counter() - t0, 1.0)


def test_criterion_05_fock_adjoint():
    t0 = time.perf_counter()
    space = FockSpace(build_root_datum("su21"), degree_cap=12)
    rng = np.random.default_rng(7)
    mask = space.degree_mask(8)
    worst = 0.0
    for _ in range(100):
        z = rng.standard_normal(space.d) + 1j * rng.standard_normal(space.d)
        z *= rng.random() / max(np.linalg.norm(z), 1e-12)
        diff = fock_act_nc(space, "plus", z).gram_adjoint().mat \
            - fock_act_nc(space, "minus", z).inverse().mat
        worst = max(worst, float(np.linalg.norm(diff[np.ix_(mask, mask)], 2)))
    _crit(5, "Fock adjoint identity (100 z, D=12, 1e-9)",
          worst <= 1e-9, time.perf_counter() - t0, 10.0)


def test_criterion_06_disk_reproducing():
    t0 = time.perf_counter()
    spec = get_group("su11")
    quad = domain_quadrature(spec)  # 256 x 64
    rng = np.random.default_rng(11)
    angles = 2.0 * np.pi * rng.random(20)
    radii = 0.8 * np.sqrt(rng.random(20))
    worst = 0.0
    for lam in (2, 3, 4):
        pi = KRep.parse(spec, f"char:-{lam}")
        one = constant_section(pi, np.array([1.0 + 0.0j]))
        for r, th in zip(radii, angles):
            w = np.array([[r * np.exp(1j * th)]])
            val = ds_inner_product(pi, one, kernel_section(pi, w, [1.0]),
                                   quad=quad)
            worst = max(worst, abs(val - 1.0))
    _crit(6, "disk kernel reproduces constants (3 weights x 20 pts, 1e-5)",
          worst <= 1e-5, time.perf_counter() - t0, 30.0)


def test_criterion_07_convergence_dichotomy():
    t0 = time.perf_counter()
    rd1 = build_root_datum("su11")
    eta = np.array([1.0 + 0.0j])
    ok = True
    for lam in (2, 3, 4):
        wk = WhittakerKernel(rd1, KRep.parse(rd1.spec, f"char:-{lam}"), eta,
                             degree_cap=8)
        ok &= isinstance(gn_l2_norm_reduced(wk, eta), float)
    for lam in (0, 1):
        wk = WhittakerKernel(rd1, KRep.parse(rd1.spec, f"char:-{lam}"), eta,
                             degree_cap=8)
        ok &= gn_l2_norm_reduced(wk, eta) is DIVERGENT
    rd2 = build_root_datum("su21")
    ok &= np.allclose(rd2.rho_constants()[0], [2.0])
    for m in (1, 2, 3, 4, 5):
        wk = WhittakerKernel(rd2, KRep.parse(rd2.spec, f"char:-{m}"), eta,
                             degree_cap=8)
        out = gn_l2_norm_reduced(wk, eta)
        ok &= (out is DIVERGENT) if m <= 2 else isinstance(out, float)
    _crit(7, "square-norm convergence dichotomy", ok,
          time.perf_counter() - t0, 30.0)


def test_criterion_08_full_vs_reduced_ratio():
    t0 = time.perf_counter()
    rd = build_root_datum("su11")
    eta = np.array([1.0 + 0.0j])
    ratios = []
    for lam in (2, 3, 4):
        wk = WhittakerKernel(rd, KRep.parse(rd.spec, f"char:-{lam}"), eta)
        full, _ = gn_l2_norm_full(wk, eta)
        red = gn_l2_norm_reduced(wk, eta)
        ratios.append(full / red)
    spread = max(ratios) / min(ratios) - 1.0
    _crit(8, "full vs reduced norm ratio constant (2%)",
          spread <= 0.02, time.perf_counter() - t0, 60.0)


def test_criterion_09_section_n_equivariance():
    t0 = time.perf_counter()
    rd = build_root_datum("su21")
    pi = KRep.parse(rd.spec, "char:-4")
    wk = WhittakerKernel(rd, pi, np.array([1.0 + 0.0j]), degree_cap=12)
    nil = rd.nilradical(1)
    nbasis = list(nil.half_basis) + list(nil.one_basis)
    xi = np.array([1.0 + 0.0j])
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(200):
        x = random_group_element(rd.spec, rng, scale=0.1)
        v = sum(0.1 * c * b
                for c, b in zip(rng.uniform(-1, 1, len(nbasis)), nbasis))
        lhs = t_lkt_eval(wk, xi, x @ mat_exp(v))
        op_inv, _ = fock_act_nilpotent(wk.space, -v)
        rhs = op_inv.apply(t_lkt_eval(wk, xi, x))
        worst = max(worst, np.linalg.norm(lhs.coeffs - rhs.coeffs)
                    / max(np.linalg.norm(rhs.coeffs), 1e-12))
    _crit(9, "N-equivariance of the section (200 pairs, 1e-8)",
          worst <= 1e-8, time.perf_counter() - t0, 30.0)


def test_criterion_10_multiplicity_rank():
    t0 = time.perf_counter()
    rd = build_root_datum("su21")
    r1, sv1 = multiplicity_rank(rd, KRep.parse(rd.spec, "char:-4"))
    r2, sv2 = multiplicity_rank(rd, KRep.parse(rd.spec, "char:-3"))
    r3, sv3 = multiplicity_rank(rd, KRep.parse(rd.spec, "charsym:-4,1"))
    ok = (r1, r2, r3) == (1, 1, 2)
    ok &= sv3[-1] >= sv3[0] / 1e6  # saturation robust at the 1e6 gap
    _crit(10, "multiplicity equals dim V_pi (gap 1e6)", ok,
          time.perf_counter() - t0, 30.0)


def test_criterion_11_whittaker_vector_consistency():
    t0 = time.perf_counter()
    rd = build_root_datum("su21")
    ok = True
    for label in ("char:-4", "charsym:-4,1"):
        pi = KRep.parse(rd.spec, label)
        eta = np.ones(pi.dim, dtype=complex) / math.sqrt(pi.dim)
        wk = WhittakerKernel(rd, pi, eta, degree_cap=8)
        psi0 = whittaker_function_pi(wk, z=np.zeros((2, 1), dtype=complex))
        ok &= np.linalg.norm(psi0.mat - wk.a_star_matrix) <= 1e-12
    pi = KRep.parse(rd.spec, "char:-4")
    wk = WhittakerKernel(rd, pi, np.array([1.0 + 0.0j]), degree_cap=8)
    rng = np.random.default_rng(31)
    pts = []
    for _ in range(100):
        z = rng.standard_normal((2, 1)) + 1j * rng.standard_normal((2, 1))
        pts.append(0.45 * rng.uniform(0.2, 1.0) * z / np.linalg.norm(z, 2))
    resid = conjugate_cr_residual(wk, np.array([1.0 + 0.0j]), pts)
    ok &= resid <= 1e-6
    _crit(11, "Whittaker vector at base point + antiholomorphy", ok,
          time.perf_counter() - t0, 10.0)


def test_criterion_12_deterministic_verify():
    t0 = time.perf_counter()
    cmd = [sys.executable, "-m", "hermwhit", "verify", "--suite", "all",
           "--seed", "7"]
    r1 = subprocess.run(cmd, capture_output=True)
    r2 = subprocess.run(cmd, capture_output=True)
    ok = r1.returncode == 0 and r2.returncode == 0
    ok &= len(r1.stdout) > 0 and r1.stdout == r2.stdout
    _crit(12, "verify --suite all --seed 7 byte-identical", ok,
          time.perf_counter() - t0)
