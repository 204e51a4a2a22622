import numpy as np
import pytest

from opsys import linalg as la
from opsys.errors import DimensionError, HermitianError
from opsys.norms import max_order_norm
from opsys.systems import (
    cone_member,
    from_blocks,
    is_matrix_order_unit,
    make_operator_system,
    named_system,
    order_unit_radius_level,
    random_hermitian_element,
    random_positive_element,
    random_system,
    subspace_member,
    system_from_json,
    system_to_json,
    to_blocks,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
E12 = np.array([[0, 1], [0, 0]], dtype=complex)


# -- construction -------------------------------------------------------------

def test_generated_by_pauli_x():
    s = make_operator_system([PAULI_X], 2)
    assert s.dim == 2
    assert s.contains(np.eye(2)) and s.contains(PAULI_X)


def test_adjoint_closure_forced():
    s = make_operator_system([E12], 2)
    assert s.dim == 3
    for m in (np.eye(2), E12, E12.conj().T):
        assert s.contains(m)


def test_empty_generators_scalar_system():
    s = make_operator_system([], 3)
    assert s.dim == 1
    assert s.contains(np.eye(3))


def test_generator_dimension_mismatch():
    with pytest.raises(DimensionError):
        make_operator_system([np.eye(3)], 2)


def test_structural_invariants_random():
    rng = np.random.default_rng(0)
    for _ in range(10):
        s = random_system(rng)
        s.validate()
        # Hermitian basis spans S_h with real orthonormality
        hb = s.hermitian_basis
        gram = np.einsum("aij,bji->ab", hb, hb).real
        assert np.allclose(gram, np.eye(s.dim), atol=1e-9)


def test_named_systems():
    assert named_system("full:3").dim == 9
    assert named_system("diag:4").dim == 4
    assert named_system("toeplitz:4").dim == 7
    assert named_system("pauli-span").dim == 3


def test_json_roundtrip():
    s = named_system("toeplitz:3")
    s2 = system_from_json(system_to_json(s))
    assert s2.d == s.d and s2.dim == s.dim
    for b in s.basis:
        assert s2.contains(b)


# -- level elements -----------------------------------------------------------

def test_block_roundtrip_bijection():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    assert np.array_equal(from_blocks(to_blocks(x, 2)), x)
    assert np.array_equal(from_blocks(to_blocks(x, 3)), x)


def test_subspace_member():
    s = make_operator_system([PAULI_X], 2)
    assert subspace_member(s, np.eye(2))
    assert not subspace_member(s, E12)
    for b in s.basis:
        assert subspace_member(s, b)


def test_cone_member_level1():
    s = make_operator_system([PAULI_X], 2)
    assert cone_member(s, np.eye(2))
    assert not cone_member(s, PAULI_X)  # eigenvalues +-1


def test_cone_member_level2_oracle():
    # [[I, X], [X, I]] flattens to I_4 + X(x)X whose eigenvalues are
    # 1 +- eig(X(x)X) = {0, 0, 2, 2}: PSD boundary element
    s = make_operator_system([PAULI_X], 2)
    x = from_blocks(np.array([[np.eye(2), PAULI_X], [PAULI_X, np.eye(2)]]))
    w = np.linalg.eigvalsh(x)
    assert np.allclose(sorted(w), [0, 0, 2, 2], atol=1e-12)
    assert cone_member(s, x)


def test_cone_rejects_outside_subspace():
    s = make_operator_system([PAULI_X], 2)
    psd_but_outside = np.array([[1.5, 0.5j], [-0.5j, 0.5]])
    assert la.lambda_min(psd_but_outside) > 0
    assert not cone_member(s, psd_but_outside)


# -- order unit radii ---------------------------------------------------------

def test_radius_identity():
    s = named_system("full:2")
    r = order_unit_radius_level(s, np.eye(2), np.eye(2))
    assert r == pytest.approx(1.0, abs=1e-6)


def test_radius_spectral():
    s = named_system("full:2")
    r = order_unit_radius_level(s, np.eye(2), np.diag([1.0, -2.0]))
    assert r == pytest.approx(1.0, abs=1e-6)


def test_radius_not_dominated():
    s = named_system("diag:2")
    e = np.diag([1.0, 0.0]).astype(complex)
    x = np.diag([0.0, 1.0]).astype(complex)
    assert order_unit_radius_level(s, e, x) is None


def test_radius_requires_hermitian():
    s = named_system("full:2")
    with pytest.raises(HermitianError):
        order_unit_radius_level(s, np.eye(2), E12)


def test_radius_level2_matches_eigen_oracle():
    rng = np.random.default_rng(2)
    s = named_system("full:2")
    x = random_hermitian_element(s, rng, level=2)
    r = order_unit_radius_level(s, np.eye(2), x)
    assert r == pytest.approx(max(la.lambda_max(x), 0.0), abs=1e-6)


# -- matrix order units (order unit iff matrix order unit) ---------------------

def test_identity_is_matrix_order_unit():
    for s in (named_system("full:2"), named_system("pauli-span"), named_system("diag:3")):
        report = is_matrix_order_unit(s, s.unit, 3, samples_per_level=8)
        assert report.ok


def test_diag_unit_counterexample():
    s = named_system("diag:2")
    report = is_matrix_order_unit(s, np.diag([1.0, 0.0]).astype(complex), 1)
    assert not report.ok
    assert report.counterexample_level == 1
    h = report.counterexample
    # the witness is a Hermitian element of S that no multiple of e dominates
    assert subspace_member(s, h)
    assert order_unit_radius_level(s, np.diag([1.0, 0.0]).astype(complex), h) is None


def test_positive_definite_unit_dominates():
    # e = I + 0.5 X is positive definite, so it dominates at every level;
    # cross-checked by the bisection returning finite radii
    s = make_operator_system([PAULI_X], 2)
    e = np.eye(2) + 0.5 * PAULI_X
    assert la.lambda_min(e) > 0
    report = is_matrix_order_unit(s, e, 3, samples_per_level=8)
    assert report.ok
    assert all(r is not None for level in report.radii.values() for r in level)


# -- cone invariants ----------------------------------------------------------

def test_cone_compatibility_under_scalar_compression():
    rng = np.random.default_rng(3)
    for _ in range(10):
        s = random_system(rng, d=3)
        n, m = 3, 2
        x = random_positive_element(s, rng, level=n)
        alpha = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
        lifted = np.kron(alpha, np.eye(3))
        y = lifted.conj().T @ x @ lifted
        assert cone_member(s, y, 1e-7)


def test_cone_properness():
    rng = np.random.default_rng(4)
    s = random_system(rng, d=3)
    x = 1e-10 * random_hermitian_element(s, rng)
    if cone_member(s, x, 1e-9) and cone_member(s, -x, 1e-9):
        assert la.op_norm(x) <= 1e-7


def test_archimedean_property_of_identity():
    rng = np.random.default_rng(5)
    s = random_system(rng, d=3)
    # boundary element: positive semidefinite member of S with lambda_min 0
    h = random_hermitian_element(s, rng)
    x = h - la.lambda_min(h) * np.eye(3)
    assert all(
        cone_member(s, 2.0 ** -k * np.eye(3) + x) for k in range(1, 21)
    )
    assert cone_member(s, x, 1e-6)


def test_operator_norm_block_estimate():
    # || [T_ij] ||_op <= n * max_ij ||T_ij||_M, with the certified upper
    # bound standing in for the max norm
    rng = np.random.default_rng(6)
    s = random_system(rng, d=3)
    n = 2
    blocks = np.empty((n, n, 3, 3), dtype=complex)
    bound = 0.0
    from opsys.systems import random_element

    for i in range(n):
        for j in range(n):
            blocks[i, j] = random_element(s, rng)
            _, upper = max_order_norm(s, blocks[i, j])
            bound = max(bound, upper)
    flat = from_blocks(blocks)
    assert la.op_norm(flat) <= n * bound + 1e-6
