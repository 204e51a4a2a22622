import numpy as np
import pytest

from opsys import linalg as la
from opsys.dual import (
    Functional,
    MatrixFunctional,
    cp_choi_problem,
    diag_lift,
    dual_order_unit_radius,
    faithful_state,
    is_cp,
    is_positive_functional,
    level_hermitian_basis,
    paulsen_system,
    positivity_minimum,
    random_hermitian_functional,
    random_positive_functional,
    series_state,
    verify_dual_unit_equivalences,
)
from opsys.errors import MembershipError, UndecidedError
from opsys.feasibility import FeasibilityProblem, dykstra_solve
from opsys.systems import (
    make_operator_system,
    named_system,
    random_element,
    random_positive_element,
    random_system,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
E12 = np.array([[0, 1], [0, 0]], dtype=complex)
E21 = E12.conj().T


# -- evaluation and involution ---------------------------------------------------

def test_eval_trace():
    s = named_system("full:3")
    tr = Functional(s, np.eye(3))
    assert tr(np.eye(3)) == pytest.approx(3.0)


def test_eval_matrix_units():
    s = named_system("full:2")
    f = Functional(s, E21)
    assert f(E12) == pytest.approx(1.0)


def test_eval_membership_error():
    s = make_operator_system([PAULI_X], 2)
    f = Functional(s, np.eye(2))
    with pytest.raises(MembershipError):
        f(E12)


def test_involution_identity():
    rng = np.random.default_rng(0)
    for _ in range(10):
        s = random_system(rng)
        f = Functional(s, rng.standard_normal((s.d, s.d))
                       + 1j * rng.standard_normal((s.d, s.d)))
        x = random_element(s, rng)
        assert abs(f.adjoint()(x) - np.conj(f(x.conj().T))) <= 1e-10


def test_canonical_riesz_agrees_on_basis():
    rng = np.random.default_rng(1)
    s = make_operator_system([E12], 2)
    raw = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    f = Functional(s, raw)
    for b in s.basis:
        assert abs(f(b) - np.trace(raw @ b)) <= 1e-12
    # canonical matrix lies in the span and is unique
    assert s.contains(f.riesz, 1e-10)


# -- positivity -------------------------------------------------------------------

def test_trace_positive():
    s = named_system("full:3")
    assert is_positive_functional(Functional(s, np.eye(3)))


def test_pauli_x_not_positive():
    s = named_system("full:2")
    assert not is_positive_functional(Functional(s, PAULI_X))


def test_subsystem_boundary_positive_brute_force():
    # S = span{I, X}: the section is x(t) = (I + tX)/2, |t| <= 1, and
    # trace(F x(t)) = (1 + t)/2 for F = (I + X)/2: min 0 at t = -1
    s = make_operator_system([PAULI_X], 2)
    f = Functional(s, (np.eye(2) + PAULI_X) / 2)
    ts = np.linspace(-1, 1, 2001)
    brute = min((1 + t) / 2 for t in ts)
    assert brute == pytest.approx(0.0, abs=1e-12)
    val, x = positivity_minimum(f)
    assert abs(val - brute) <= 1e-6
    assert is_positive_functional(f)


def test_positivity_minimum_full_is_exact():
    rng = np.random.default_rng(2)
    s = named_system("full:4")
    h = la.hermitian_part(rng.standard_normal((4, 4))
                          + 1j * rng.standard_normal((4, 4)))
    val, x = positivity_minimum(Functional(s, h))
    assert val == pytest.approx(la.lambda_min(h), abs=1e-10)
    assert np.trace(x).real == pytest.approx(1.0, abs=1e-10)


def test_positivity_dual_cone_sampling():
    rng = np.random.default_rng(3)
    s = named_system("pauli-span")
    for _ in range(10):
        f = random_hermitian_functional(s, rng)
        verdict = is_positive_functional(f)
        if verdict:
            for _ in range(200):
                x = random_positive_element(s, rng)
                assert f(x).real >= -1e-6 * max(1.0, la.op_norm(x))
        else:
            val, witness = positivity_minimum(f)
            assert val < -1e-8
            assert la.lambda_min(witness) >= -1e-8
            assert s.contains(witness, 1e-8)


# -- complete positivity -----------------------------------------------------------

def identity_grid(system):
    d = system.d
    return MatrixFunctional(
        [[Functional(system, la.basis_matrix(d, j, i)) for j in range(d)]
         for i in range(d)]
    )


def transpose_grid(system):
    d = system.d
    return MatrixFunctional(
        [[Functional(system, la.basis_matrix(d, i, j)) for j in range(d)]
         for i in range(d)]
    )


def test_identity_map_is_cp():
    s = named_system("full:2")
    mf = identity_grid(s)
    choi = mf.choi_matrix()
    # oracle: maximally entangled (rank one, trace 2)
    assert np.linalg.matrix_rank(choi) == 1
    assert la.lambda_min(choi) >= -1e-12
    assert is_cp(mf) is True


def test_transpose_map_not_cp():
    s = named_system("full:2")
    mf = transpose_grid(s)
    choi = mf.choi_matrix()
    assert la.lambda_min(choi) == pytest.approx(-1.0, abs=1e-12)  # the swap
    assert is_cp(mf) is False


def test_transpose_restricted_to_xy_plane_is_cp():
    # on span{I, X, Y} the transpose agrees with conjugation by X, a
    # unitary channel, so the restriction extends completely positively
    # even though the ambient transpose does not
    s = named_system("pauli-span")
    grid = [[Functional(s, la.basis_matrix(2, i, j)) for j in range(2)]
            for i in range(2)]
    mf = MatrixFunctional(grid)
    assert is_cp(mf) is True


def test_is_cp_rejects_non_hermitian_grid():
    s = named_system("full:2")
    f = Functional(s, E12)
    z = Functional.zero(s)
    mf = MatrixFunctional([[f, f], [z, f]])
    assert is_cp(mf) is False


def test_choi_grid_roundtrip():
    rng = np.random.default_rng(4)
    s = named_system("pauli-span")
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    mf = MatrixFunctional.from_choi(s, g @ g.conj().T)
    clone = MatrixFunctional.from_choi(s, mf.choi_matrix())
    for i in range(2):
        for j in range(2):
            assert mf.grid[i][j].isclose(clone.grid[i][j], 1e-10)


def test_cp_cross_validates_positivity_level1():
    # two independent backends must agree: Dykstra CP-extension versus the
    # projected-gradient section minimum
    rng = np.random.default_rng(5)
    s = named_system("pauli-span")
    agreements = 0
    for k in range(50):
        if k % 2 == 0:
            f = random_positive_functional(s, rng)
        else:
            f = random_hermitian_functional(s, rng)
        via_pg = is_positive_functional(f)
        via_cp = is_cp(MatrixFunctional([[f]]))
        assert via_cp is not None
        assert via_cp == via_pg
        agreements += 1
    assert agreements == 50


def test_choi_solver_agreement_on_full_algebra():
    # on M_d the CP question is the eigenvalue sign of the Choi matrix; the
    # Dykstra route (fed the fully pinned problem directly) must agree
    rng = np.random.default_rng(6)
    s = named_system("full:2")
    disagreements = 0
    for _ in range(100):
        g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        choi = la.hermitian_part(g) if rng.random() < 0.5 else g @ g.conj().T / 4
        lam = la.lambda_min(choi)
        if -1e-6 < lam < -1e-8:
            continue
        mf = MatrixFunctional.from_choi(s, choi)
        kbasis = level_hermitian_basis(s, 2)
        rhs = np.real(np.einsum("aij,ji->a", kbasis, choi))
        problem = FeasibilityProblem(4, list(zip(kbasis, rhs)))
        verdict = dykstra_solve(problem)
        eigen_cp = is_cp(mf)
        solver_cp = verdict.status == "feasible"
        if eigen_cp != solver_cp or verdict.status == "undecided":
            disagreements += 1
    assert disagreements == 0


def test_cp_problem_exposed_for_subsystems_only():
    s = named_system("pauli-span")
    f = random_positive_functional(s, np.random.default_rng(7))
    assert cp_choi_problem(MatrixFunctional([[f]])) is not None
    full = named_system("full:2")
    g = random_positive_functional(full, np.random.default_rng(8))
    assert cp_choi_problem(MatrixFunctional([[g]])) is None


# -- faithful states -----------------------------------------------------------------

def test_trace_state_values():
    s = named_system("full:2")
    delta = faithful_state(s)
    assert delta(la.basis_matrix(2, 0, 0)) == pytest.approx(0.5)


def test_trace_state_faithful_on_cone():
    rng = np.random.default_rng(9)
    s = random_system(rng)
    delta = faithful_state(s)
    for _ in range(20):
        x = random_positive_element(s, rng)
        if abs(delta(x)) <= 1e-12:
            assert la.op_norm(x) <= 1e-10


def test_series_state_faithful_brute_force():
    # dense states on diag:2 are convex combinations (t, 1-t); a weighted
    # series of a dense sample must be strictly positive on the nonzero
    # diagonal PSD matrices of the 1-simplex
    s = named_system("diag:2")
    states = [
        Functional(s, np.diag([t, 1 - t]).astype(complex))
        for t in np.linspace(0.05, 0.95, 7)
    ]
    delta = series_state(states)
    assert delta(np.eye(2)) == pytest.approx(1.0, abs=1e-12)
    for t in np.linspace(0, 1, 101):
        x = np.diag([t, 1 - t]).astype(complex)
        assert delta(x).real > 0.04


# -- dual order-unit radii -------------------------------------------------------------

def test_radius_matches_eigen_oracle_on_full():
    rng = np.random.default_rng(10)
    for d in (2, 3, 4):
        s = named_system(f"full:{d}")
        delta = faithful_state(s)
        g = random_hermitian_functional(s, rng)
        r = dual_order_unit_radius(delta, g, 1)
        oracle = max(0.0, d * la.lambda_max(g.riesz))
        assert r == pytest.approx(oracle, abs=1e-5)


def test_radius_boundary_case_delta_itself():
    s = named_system("full:2")
    delta = faithful_state(s)
    r = dual_order_unit_radius(delta, delta, 1)
    assert r == pytest.approx(1.0, abs=1e-5)


def test_radius_none_for_non_faithful():
    s = named_system("diag:2")
    vec_state = Functional(s, np.diag([1.0, 0.0]).astype(complex))
    complement = Functional(s, np.diag([0.0, 1.0]).astype(complex))
    r = dual_order_unit_radius(vec_state, complement, 1, r_max=1e4)
    assert r is None


def test_radius_level_2_agrees_with_level_1():
    # the diagonal lift of a level-1 dominated difference stays CP, so the
    # level-2 bisection lands on the same radius
    s = named_system("full:2")
    delta = faithful_state(s)
    g = random_hermitian_functional(s, np.random.default_rng(11))
    r1 = dual_order_unit_radius(delta, g, 1)
    r2 = dual_order_unit_radius(delta, g, 2)
    assert r2 == pytest.approx(r1, abs=1e-5)


def test_wittstock_decomposition():
    # every Hermitian matrix functional splits as p - q with p, q CP, via
    # the dual order-unit radius of the lifted trace state; the bisection
    # runs at coarse precision because queries inside the thin boundary
    # band legitimately come back undecided, in which case the ambient
    # Choi bound (a certified domination radius) stands in
    rng = np.random.default_rng(12)
    s = named_system("pauli-span")
    delta = faithful_state(s)
    for _ in range(3):
        grid = [[None, None], [None, None]]
        for i in range(2):
            grid[i][i] = random_hermitian_functional(s, rng)
        off = Functional(s, rng.standard_normal((2, 2))
                         + 1j * rng.standard_normal((2, 2)))
        grid[0][1] = off
        grid[1][0] = off.adjoint()
        h = MatrixFunctional(grid)
        assert h.is_hermitian()
        try:
            r = dual_order_unit_radius(delta, h, precision=0.05)
        except UndecidedError:
            r = None
        if r is None:
            r = s.d * max(0.0, la.lambda_max(h.choi_matrix()))
        lifted = diag_lift(delta, 2)
        q = (r + 0.05) * lifted
        p = h + q
        assert is_cp(p) is True
        assert is_cp(q) is True


# -- the dual-unit equivalence sweep ---------------------------------------------------

def test_equivalences_full_m2():
    s = named_system("full:2")
    report = verify_dual_unit_equivalences(
        s, faithful_state(s), max_level=3, samples=6,
        rng=np.random.default_rng(13),
    )
    assert report["faithful"]["ok"]
    assert report["order_unit"]["ok"]
    assert report["archimedean"]["ok"]
    assert report["passed"]


def test_equivalences_non_faithful_fails_with_witness():
    s = named_system("diag:2")
    vec_state = Functional(s, np.diag([1.0, 0.0]).astype(complex))
    report = verify_dual_unit_equivalences(
        s, vec_state, samples=4, rng=np.random.default_rng(14)
    )
    assert not report["faithful"]["ok"]
    assert not report["passed"]
    assert not report["order_unit"]["ok"]


# -- the block system -------------------------------------------------------------------

def test_paulsen_trivial_space():
    s, tr = paulsen_system([], d=1)
    assert s.d == 2 and s.dim == 2
    lam_mu = np.diag([2.0, 3.0]).astype(complex)
    assert tr(lam_mu) == pytest.approx(5.0)


def test_paulsen_e12_dimensions():
    s, tr = paulsen_system([E12])
    assert s.d == 4 and s.dim == 4
    block = np.zeros((4, 4), dtype=complex)
    block[:2, :2] = 1.5 * np.eye(2)
    block[2:, 2:] = 0.5 * np.eye(2)
    block[0, 3] = 2.0  # X = 2 E12 in the top-right slot
    assert s.contains(block, 1e-9)
    assert tr(block) == pytest.approx(2.0)


def test_paulsen_trace_unit_is_archimedean_matrix_order_unit():
    s, tr = paulsen_system([E12])
    report = verify_dual_unit_equivalences(
        s, tr, max_level=2, samples=4, rng=np.random.default_rng(15)
    )
    assert report["passed"], report


# -- density transfer ---------------------------------------------------------------------

def test_dense_subsystem_functional_transfer():
    # a spanning perturbed basis generates the same subspace; restriction
    # followed by extension of canonical functionals is the identity
    rng = np.random.default_rng(16)
    s = named_system("pauli-span")
    perturbed = [
        b + 1e-3 * random_element(s, rng) for b in s.basis
    ]
    t = make_operator_system(perturbed, s.d)
    assert t.dim == s.dim
    for _ in range(10):
        f = random_hermitian_functional(s, rng)
        restricted = Functional(t, f.riesz)
        extended = Functional(s, restricted.riesz)
        assert la.frobenius(extended.riesz - f.riesz) <= 1e-8
    # matrix levels inherit the density (here: equality of spans)
    from opsys.systems import subspace_member
    x = random_element(s, rng, level=2)
    assert subspace_member(t, x, 1e-8)
