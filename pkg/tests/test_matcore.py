import numpy as np
import pytest
from hypothesis import given, strategies as st

from hermwhit.errors import NotUnipotent
from hermwhit.matcore import (
    as_cmatrix,
    block_join,
    block_split,
    indef_adjoint,
    ipq,
    is_nilpotent,
    mat_exp,
    mat_log_unipotent,
    smallest_singular_value,
    solve_right,
)

EXP_LOG_TOL = 1e-12


def _strict_upper(entries, n):
    m = np.zeros((n, n), dtype=complex)
    idx = 0
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = entries[idx]
            idx += 1
    return m


def test_as_cmatrix_rejects_bad_shapes_and_values():
    with pytest.raises(ValueError):
        as_cmatrix(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        as_cmatrix(np.zeros(4))
    with pytest.raises(ValueError):
        as_cmatrix(np.array([[1.0, np.inf], [0.0, 1.0]]))


def test_ipq_signature():
    j = ipq(2, 1)
    assert np.array_equal(np.diag(j), np.array([1, 1, -1], dtype=complex))
    assert np.linalg.norm(j @ j - np.eye(3)) == 0.0


@given(st.lists(st.complex_numbers(max_magnitude=3.0, allow_nan=False,
                                   allow_infinity=False),
                min_size=6, max_size=6))
def test_unipotent_log_exp_round_trip(entries):
    x = _strict_upper(entries, 4)
    assert is_nilpotent(x)
    g = mat_exp(x)
    back = mat_log_unipotent(g)
    assert np.linalg.norm(back - x) <= EXP_LOG_TOL * max(1.0, np.linalg.norm(x))


def test_log_accepts_defective_unipotent_with_rounding_noise():
    # a single 4x4 Jordan block: eigenvalue tests see sqrt(eps) splitting,
    # the nilpotent-power certificate must not
    g = np.eye(4, dtype=complex)
    for i in range(3):
        g[i, i + 1] = 1.0
    g += 1e-14 * np.arange(16).reshape(4, 4)
    x = mat_log_unipotent(g)
    assert np.linalg.norm(mat_exp(x) - g) < 1e-12


def test_log_rejects_non_unipotent():
    with pytest.raises(NotUnipotent):
        mat_log_unipotent(np.diag([2.0, 0.5]).astype(complex))


def test_mat_exp_nilpotent_is_exact_polynomial():
    x = np.array([[0.0, 3.0], [0.0, 0.0]], dtype=complex)
    assert np.array_equal(mat_exp(x), np.array([[1, 3], [0, 1]], dtype=complex))


def test_mat_exp_matches_series_on_generic_input():
    rng = np.random.default_rng(4)
    x = 0.3 * (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    total = np.eye(3, dtype=complex)
    term = np.eye(3, dtype=complex)
    for k in range(1, 40):
        term = term @ x / k
        total += term
    assert np.linalg.norm(mat_exp(x) - total) < 1e-13


def test_indef_adjoint_is_involutive_and_form_compatible():
    rng = np.random.default_rng(11)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    y = indef_adjoint(x, 2, 1)
    assert np.linalg.norm(indef_adjoint(y, 2, 1) - x) == 0.0
    j = ipq(2, 1)
    u = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    lhs = np.vdot(v, j @ (x @ u))
    rhs = np.vdot(y @ v, j @ u)
    assert abs(lhs - rhs) < 1e-12


def test_block_split_join_round_trip():
    rng = np.random.default_rng(2)
    g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    a, b, c, d = block_split(g, 2, 1)
    assert a.shape == (2, 2) and b.shape == (2, 1)
    assert c.shape == (1, 2) and d.shape == (1, 1)
    assert np.array_equal(block_join(a, b, c, d), g)
    with pytest.raises(ValueError):
        block_split(g, 2, 2)


def test_solve_right_matches_inverse():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))
    b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    b += 3 * np.eye(3)
    assert np.linalg.norm(solve_right(a, b) - a @ np.linalg.inv(b)) < 1e-12


def test_smallest_singular_value():
    assert smallest_singular_value(np.zeros((0, 2))) == np.inf
    m = np.diag([3.0, 0.25]).astype(complex)
    assert abs(smallest_singular_value(m) - 0.25) < 1e-14
