import numpy as np
import pytest

from hermwhit.rootdata import build_root_datum, label_name, moore_table

BRACKET_TOL = 1e-12
RHO_TOL = 1e-12
DECOMP_TOL = 1e-9

GROUP_NAMES = ["su11", "su21", "su22"]

# frozen multiplicity tables (label in torus coordinates -> real dimension)
TABLES = {
    "su11": {(2,): 1, (-2,): 1},
    "su21": {(2,): 1, (-2,): 1, (1,): 2, (-1,): 2},
    "su22": {
        (2, 0): 1, (-2, 0): 1, (0, 2): 1, (0, -2): 1,
        (1, 1): 2, (1, -1): 2, (-1, 1): 2, (-1, -1): 2,
    },
}

RHO_N = {"su11": [1.0], "su21": [2.0], "su22": [2.0, 2.0]}


@pytest.mark.parametrize("name", GROUP_NAMES)
def test_observed_table_matches_closed_form(name):
    rd = build_root_datum(name)
    assert rd.observed_table() == moore_table(rd.spec.p, rd.spec.q)
    assert rd.observed_table() == TABLES[name]


@pytest.mark.parametrize("name", GROUP_NAMES)
def test_sl2_triple_brackets(name):
    rd = build_root_datum(name)
    assert len(rd.triples) == rd.rank
    for tri in rd.triples:
        assert np.linalg.norm(tri.h @ tri.e - tri.e @ tri.h - 2 * tri.e) < BRACKET_TOL
        assert np.linalg.norm(tri.h @ tri.f - tri.f @ tri.h + 2 * tri.f) < BRACKET_TOL
        assert np.linalg.norm(tri.e @ tri.f - tri.f @ tri.e - tri.h) < BRACKET_TOL


@pytest.mark.parametrize("name", GROUP_NAMES)
def test_e_pairing_normalization(name):
    # (E|E) equals the real rank in the chosen normalization
    rd = build_root_datum(name)
    assert abs(rd.e_pairing(rd.E) - rd.rank) < RHO_TOL


@pytest.mark.parametrize("name", GROUP_NAMES)
def test_rho_constants(name):
    rd = build_root_datum(name)
    rho_n, rho_l, rho = rd.rho_constants()
    assert np.max(np.abs(rho_n - np.array(RHO_N[name]))) < RHO_TOL
    assert np.max(np.abs(rho - rho_n - rho_l)) < RHO_TOL
    # independent recomputation: half sum of positive labels weighted by mult
    want = np.zeros(rd.rank)
    for lab, mult in TABLES[name].items():
        if sum(lab) > 0:
            want += 0.5 * mult * np.array(lab, dtype=float)
    assert np.max(np.abs(rho_n - want)) < RHO_TOL


def test_rho_su22_full():
    rd = build_root_datum("su22")
    rho_n, rho_l, rho = rd.rho_constants()
    assert np.allclose(rho_l, [1.0, -1.0], atol=RHO_TOL)
    assert np.allclose(rho, [3.0, 1.0], atol=RHO_TOL)


def test_nilradical_layer_dimensions():
    dims = {}
    for name in GROUP_NAMES:
        rd = build_root_datum(name)
        for j in range(1, rd.rank + 1):
            nb = rd.nilradical(j)
            dims[(name, j)] = (nb.dim_half, nb.dim_one)
    assert dims == {
        ("su11", 1): (0, 1),
        ("su21", 1): (2, 1),
        ("su22", 1): (4, 1),
        ("su22", 2): (0, 4),
    }


def test_nilradical_index_bounds():
    rd = build_root_datum("su21")
    with pytest.raises(ValueError):
        rd.nilradical(0)
    with pytest.raises(ValueError):
        rd.nilradical(2)


@pytest.mark.parametrize("name", GROUP_NAMES)
def test_root_spaces_are_joint_eigenspaces(name):
    # [x_j, b] = label[j] b for every basis vector of every root space
    rd = build_root_datum(name)
    for lab, root in rd.roots.items():
        assert root.mult == len(root.basis)
        for b in root.basis:
            for j, tri in enumerate(rd.triples):
                comm = tri.x @ b - b @ tri.x
                assert np.linalg.norm(comm - lab[j] * b) < 1e-10


@pytest.mark.parametrize("name", GROUP_NAMES)
def test_restricted_decompose_roundtrip(name):
    rd = build_root_datum(name)
    rng = np.random.default_rng(11)
    x = rd.from_coords(rng.standard_normal(len(rd.g_basis)))
    comps = rd.restricted_decompose(x)
    total = sum(comps.values())
    assert np.linalg.norm(total - x) < DECOMP_TOL * max(1.0, np.linalg.norm(x))
    zero = tuple([0] * rd.rank)
    for lab in comps:
        assert lab == zero or lab in TABLES[name]


@pytest.mark.parametrize("name", GROUP_NAMES)
def test_coords_roundtrip(name):
    rd = build_root_datum(name)
    rng = np.random.default_rng(5)
    c = rng.standard_normal(len(rd.g_basis))
    assert np.max(np.abs(rd.coords(rd.from_coords(c)) - c)) < 1e-12


def test_complex_structure_squares_to_minus_one():
    rd = build_root_datum("su21")
    nb = rd.nilradical(1)
    for b in nb.half_basis:
        assert np.linalg.norm(
            rd.complex_structure(rd.complex_structure(b)) + b) < 1e-12


def test_jmat_is_orthogonal_antisymmetric():
    rd = build_root_datum("su22")
    nb = rd.nilradical(1)
    jm = nb.jmat(rd)
    assert np.linalg.norm(jm.T @ jm - np.eye(nb.dim_half)) < 1e-12
    assert np.linalg.norm(jm + jm.T) < 1e-12


def test_hermitian_gram_is_psd_hermitian():
    rd = build_root_datum("su21")
    nb = rd.nilradical(1)
    g = nb.hermitian_gram(rd)
    assert np.linalg.norm(g - g.conj().T) < 1e-12
    assert np.linalg.eigvalsh(g).min() > -1e-12


def test_l_density_closed_forms():
    # rank-one groups have no l-roots: density is identically 1
    for name in ("su11", "su21"):
        rd = build_root_datum(name)
        assert rd.l_density_w([0.7]) == 1.0
    rd = build_root_datum("su22")
    t = np.array([1.3, 0.4])
    assert abs(rd.l_density_w(t) - np.sinh(t[0] - t[1]) ** 2) < 1e-12


def test_label_names():
    assert label_name((2,)) == "l1"
    assert label_name((1, -1)) == "(l1-l2)/2"
    assert label_name((0, -2)) == "-l2"
