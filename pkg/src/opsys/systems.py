"""Concrete operator systems S inside M_d and their matrix-level cones.

A system is stored through an orthonormal basis (trace inner product) of an
adjoint-closed unital subspace of M_d.  Elements of the matrix level M_n(S)
are handled as flattened (n*d) x (n*d) arrays; block (i, j) of a level
element occupies rows [i*d, (i+1)*d) and columns [j*d, (j+1)*d), i.e. the
flattened form of a grid ``g`` is ``sum_ij E_ij (x) g[i][j]``.  The same
block convention is used for Choi matrices in the dual module.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from ._search import smallest_passing
from .errors import DimensionError, HermitianError, ParseError, ValidationError

__all__ = [
    "OperatorSystem",
    "make_operator_system",
    "named_system",
    "system_from_json",
    "system_to_json",
    "level_of",
    "to_blocks",
    "from_blocks",
    "subspace_member",
    "cone_member",
    "order_unit_radius_level",
    "is_matrix_order_unit",
    "MatrixOrderUnitReport",
    "random_element",
    "random_hermitian_element",
    "random_positive_element",
    "random_system",
]

#: Default tolerance for subspace residuals and eigenvalue floors: one order
#: above eigensolver error, far below the O(1) scale of test matrices.
DEFAULT_TOL = 1e-8

_GS_RANK_TOL = 1e-9

#: Fixed seed for the deterministic Hermitian sampling in
#: :func:`is_matrix_order_unit` when the caller does not inject a generator.
_MOU_SAMPLE_SEED = 20240917


def _orthonormalize(vectors, rank_tol=_GS_RANK_TOL):
    """Modified Gram-Schmidt with reorthogonalization over the trace inner
    product; vectors with residual below ``rank_tol`` are dropped."""
    basis: list[np.ndarray] = []
    for v in vectors:
        nrm = la.frobenius(v)
        if nrm <= rank_tol:
            continue
        w = v / nrm
        for _ in range(2):  # second pass kills rounding drift
            for b in basis:
                w = w - la.trace_inner(b, w) * b
        res = la.frobenius(w)
        if res > rank_tol:
            basis.append(w / res)
    return basis


class OperatorSystem:
    """An adjoint-closed unital subspace of M_d with an orthonormal basis.

    Immutable after construction; all operations on it are pure functions,
    so instances are safe to share across threads.
    """

    def __init__(self, d: int, basis, name: str | None = None):
        if d < 1:
            raise DimensionError(f"ambient dimension must be positive, got {d}")
        self.d = int(d)
        mats = []
        for b in basis:
            m = la.as_matrix(b)
            if m.shape != (d, d):
                raise DimensionError(
                    f"basis element of shape {m.shape} in ambient M_{d}"
                )
            m = m.copy()
            m.flags.writeable = False
            mats.append(m)
        if not mats:
            raise ValidationError("a system needs at least one basis element")
        self.basis = tuple(mats)
        self.name = name
        self._basis_arr = np.stack(self.basis)  # (dim, d, d)
        self._hermitian_basis: np.ndarray | None = None

    # -- structure -----------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def unit(self) -> np.ndarray:
        return la.identity(self.d)

    @property
    def is_full(self) -> bool:
        return self.dim == self.d * self.d

    def __repr__(self):  # pragma: no cover - debugging aid
        tag = self.name or "system"
        return f"OperatorSystem({tag}, d={self.d}, dim={self.dim})"

    # -- coordinates ---------------------------------------------------------

    def coords(self, x) -> np.ndarray:
        """Complex coordinates <B_i, x> with respect to the orthonormal basis."""
        m = la.as_matrix(x)
        return np.einsum("kij,ij->k", self._basis_arr.conj(), m)

    def from_coords(self, c) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(c, dtype=complex), self._basis_arr)

    def project(self, x) -> np.ndarray:
        """Orthogonal projection of a d x d matrix onto the system."""
        return self.from_coords(self.coords(x))

    def residual(self, x) -> float:
        m = la.as_matrix(x)
        return la.frobenius(m - self.project(m))

    def contains(self, x, tol: float = DEFAULT_TOL) -> bool:
        return self.residual(x) <= tol

    @property
    def hermitian_basis(self) -> np.ndarray:
        """Real-orthonormal Hermitian basis of the real subspace S_h,
        stacked as an array of shape (dim, d, d)."""
        if self._hermitian_basis is None:
            cands = []
            for b in self.basis:
                cands.append(la.hermitian_part(b))
                cands.append(la.antihermitian_part(b))
            ortho = _orthonormalize(cands)
            if len(ortho) != self.dim:
                raise ValidationError(
                    f"Hermitian basis has rank {len(ortho)}, expected {self.dim};"
                    " span is not adjoint-closed"
                )
            hb = np.stack([la.hermitian_part(h) for h in ortho])
            hb.flags.writeable = False
            self._hermitian_basis = hb
        return self._hermitian_basis

    def hermitian_coords(self, x) -> np.ndarray:
        """Real coordinates of a Hermitian element over the Hermitian basis."""
        m = la.as_matrix(x)
        return np.real(np.einsum("kij,ij->k", self.hermitian_basis.conj(), m))

    def from_hermitian_coords(self, c) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(c, dtype=float), self.hermitian_basis)

    # -- validation ----------------------------------------------------------

    def validate(self, tol: float = 1e-10) -> None:
        """Check the structural invariants; raises ValidationError on failure."""
        gram = np.einsum("aij,bij->ab", self._basis_arr.conj(), self._basis_arr)
        if not np.allclose(gram, np.eye(self.dim), atol=tol):
            raise ValidationError("basis Gram matrix is not the identity")
        if self.residual(self.unit) > tol:
            raise ValidationError("identity is not in the span (system not unital)")
        for k, b in enumerate(self.basis):
            if self.residual(b.conj().T) > tol:
                raise ValidationError(
                    f"span is not adjoint-closed (basis element {k})"
                )


def make_operator_system(
    generators, d: int, *, rank_tol: float = _GS_RANK_TOL, name: str | None = None
) -> OperatorSystem:
    """Smallest operator system containing the generators.

    Spans generators, their adjoints and the identity, then orthonormalizes
    by Gram-Schmidt with the given rank tolerance.
    """
    cands = [la.identity(d)]
    for g in generators:
        m = la.as_matrix(g)
        if m.shape != (d, d):
            raise DimensionError(f"generator of shape {m.shape} in ambient M_{d}")
        cands.append(m)
        cands.append(m.conj().T)
    return OperatorSystem(d, _orthonormalize(cands, rank_tol), name=name)


# ----------------------------------------------------------------------------
# Named systems and the JSON wire format
# ----------------------------------------------------------------------------

def named_system(name: str) -> OperatorSystem:
    """Built-in systems: ``full:d``, ``pauli-span``, ``diag:d``, ``toeplitz:d``.

    ``pauli-span`` is the system generated by E_12 inside M_2, i.e. the span
    of {I, sigma_x, sigma_y}.
    """
    kind, _, arg = name.partition(":")
    if kind == "pauli-span":
        return make_operator_system([la.basis_matrix(2, 0, 1)], 2, name=name)
    try:
        d = int(arg)
    except ValueError:
        raise ParseError(f"unknown system name {name!r}") from None
    if d < 1:
        raise ParseError(f"system size must be positive in {name!r}")
    if kind == "full":
        gens = [la.basis_matrix(d, i, j) for i in range(d) for j in range(d)]
    elif kind == "diag":
        gens = [la.basis_matrix(d, i, i) for i in range(d)]
    elif kind == "toeplitz":
        gens = []
        for k in range(1, d):
            t = np.zeros((d, d), dtype=complex)
            for i in range(d - k):
                t[i, i + k] = 1.0
            gens.append(t)
    else:
        raise ParseError(f"unknown system name {name!r}")
    return make_operator_system(gens, d, name=name)


def system_from_json(obj) -> OperatorSystem:
    """Build a system from ``{"d": int, "generators": [matrix...]}``."""
    if not isinstance(obj, dict) or "d" not in obj:
        raise ParseError('system JSON must be an object with "d"')
    d = obj["d"]
    if not isinstance(d, int) or d < 1:
        raise ParseError('"d" must be a positive integer')
    gens = [la.decode_matrix(g) for g in obj.get("generators", [])]
    return make_operator_system(gens, d)


def system_to_json(system: OperatorSystem) -> dict:
    return {
        "d": system.d,
        "generators": [la.encode_matrix(b) for b in system.basis],
    }


# ----------------------------------------------------------------------------
# Matrix levels: flattened elements of M_n(S)
# ----------------------------------------------------------------------------

def level_of(system: OperatorSystem, x) -> int:
    """Matrix level n of a flattened element of M_n(S)."""
    m = la.as_matrix(x)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"level element must be square, got {m.shape}")
    n, rem = divmod(m.shape[0], system.d)
    if rem or n < 1:
        raise DimensionError(
            f"size {m.shape[0]} is not a multiple of ambient dimension {system.d}"
        )
    return n


def to_blocks(x, d: int) -> np.ndarray:
    """Grid view of a flattened level element, shape (n, n, d, d)."""
    m = la.as_matrix(x)
    n, rem = divmod(m.shape[0], d)
    if rem or m.shape[0] != m.shape[1]:
        raise DimensionError(f"cannot split shape {m.shape} into {d}-blocks")
    return m.reshape(n, d, n, d).transpose(0, 2, 1, 3)


def from_blocks(blocks) -> np.ndarray:
    """Inverse of :func:`to_blocks`; the flattening is a linear bijection."""
    b = np.asarray(blocks, dtype=complex)
    if b.ndim != 4 or b.shape[0] != b.shape[1] or b.shape[2] != b.shape[3]:
        raise DimensionError(f"expected grid of shape (n, n, d, d), got {b.shape}")
    n, d = b.shape[0], b.shape[2]
    return b.transpose(0, 2, 1, 3).reshape(n * d, n * d)


def subspace_member(system: OperatorSystem, x, tol: float = DEFAULT_TOL) -> bool:
    """True iff every grid entry of ``x`` projects onto the system within ``tol``."""
    blocks = to_blocks(x, system.d)
    n = blocks.shape[0]
    for i in range(n):
        for j in range(n):
            if system.residual(blocks[i, j]) > tol:
                return False
    return True


def cone_member(system: OperatorSystem, x, tol: float = DEFAULT_TOL) -> bool:
    """Membership in M_n(S)+ = PSD intersect M_n(S).

    Requires subspace membership blockwise, Hermitian symmetry of the
    flattened matrix, and smallest eigenvalue >= -tol.
    """
    m = la.as_matrix(x)
    if not subspace_member(system, m, tol):
        return False
    if la.op_norm(m - m.conj().T) / 2.0 > tol:
        return False
    return la.lambda_min(m) >= -tol


def order_unit_radius_level(
    system: OperatorSystem,
    e,
    x,
    *,
    tol: float = DEFAULT_TOL,
    r_max: float = 1e6,
    precision: float = 1e-8,
) -> float | None:
    """Smallest r >= 0 with ``r*(I_n (x) e) - x`` in M_n(S)+, or ``None``.

    Found by exponential search for an upper bracket followed by bisection;
    ``None`` means no r <= r_max dominates x.
    """
    em = la.as_matrix(e)
    if em.shape != (system.d, system.d):
        raise DimensionError("order unit e must be a level-1 element")
    if not cone_member(system, em, tol):
        raise ValidationError("order unit candidate e is not in S+")
    xm = la.as_matrix(x)
    n = level_of(system, xm)
    if not la.is_hermitian(xm, 1e-8):
        raise HermitianError("order_unit_radius_level requires Hermitian x")
    if not subspace_member(system, xm, tol):
        return None
    lifted = np.kron(np.eye(n), em)
    xh = la.hermitian_part(xm)

    def dominated(r: float) -> bool:
        return la.lambda_min(r * lifted - xh) >= -tol

    start = max(1.0, la.op_norm(xh))
    return smallest_passing(dominated, r_max, precision, r_start=start)


@dataclass
class MatrixOrderUnitReport:
    """Outcome of the matrix-order-unit sweep: per-level radii for sampled
    Hermitian elements, plus an explicit counterexample when one exists."""

    ok: bool
    radii: dict  # level -> list of radii (None where not dominated)
    counterexample: np.ndarray | None = None
    counterexample_level: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def _kernel_counterexample(system, e, tol):
    """Deterministic order-unit failure search: if e has (near-)kernel vector
    psi and the projection of psi psi* onto S still has positive mass at psi,
    no multiple of e dominates that projection."""
    em = la.hermitian_part(e)
    w, u = la.spectral_decompose(em)
    for k in range(len(w) - 1, -1, -1):
        if w[k] > 1e-7:
            break
        psi = u[:, k]
        h = la.hermitian_part(system.project(np.outer(psi, psi.conj())))
        gain = float(np.real(psi.conj() @ h @ psi))
        if gain > 1e-7:
            return h
    return None


def is_matrix_order_unit(
    system: OperatorSystem,
    e,
    max_level: int = 3,
    *,
    samples_per_level: int = 32,
    tol: float = DEFAULT_TOL,
    r_max: float = 1e6,
    rng: np.random.Generator | None = None,
) -> MatrixOrderUnitReport:
    """Check whether e dominates sampled Hermitian elements at levels 1..max_level.

    A level-1 order unit must pass at every level, so a single failed radius
    refutes matrix-order-unit-hood.  Sampling is deterministic by default
    (fixed internal seed) for reproducible runs; pass ``rng`` to override.
    A deterministic counterexample search along near-kernel directions of e
    supplements the random sampling at level 1.
    """
    if rng is None:
        rng = np.random.default_rng(_MOU_SAMPLE_SEED)
    ce = _kernel_counterexample(system, e, tol)
    if ce is not None:
        return MatrixOrderUnitReport(
            ok=False,
            radii={1: [None]},
            counterexample=ce,
            counterexample_level=1,
        )
    radii: dict[int, list] = {}
    ok = True
    for n in range(1, max_level + 1):
        level_radii = []
        for _ in range(samples_per_level):
            x = random_hermitian_element(system, rng, level=n)
            r = order_unit_radius_level(system, e, x, tol=tol, r_max=r_max)
            level_radii.append(r)
            if r is None:
                ok = False
        radii[n] = level_radii
        if not ok:
            return MatrixOrderUnitReport(ok=False, radii=radii)
    return MatrixOrderUnitReport(ok=True, radii=radii)


# ----------------------------------------------------------------------------
# Random sampling helpers (tests, suites, verification sweeps)
# ----------------------------------------------------------------------------

def random_element(
    system: OperatorSystem, rng: np.random.Generator, *, level: int = 1, scale: float = 1.0
) -> np.ndarray:
    """Random element of M_n(S) with independent complex Gaussian coordinates."""
    n = level
    blocks = np.empty((n, n, system.d, system.d), dtype=complex)
    for i in range(n):
        for j in range(n):
            c = rng.standard_normal(system.dim) + 1j * rng.standard_normal(system.dim)
            blocks[i, j] = system.from_coords(scale * c / np.sqrt(2 * system.dim))
    return from_blocks(blocks) if n > 1 else blocks[0, 0]


def random_hermitian_element(
    system: OperatorSystem, rng: np.random.Generator, *, level: int = 1, scale: float = 1.0
) -> np.ndarray:
    """Random Hermitian element of M_n(S); stays in the level since the
    span is adjoint-closed."""
    return la.hermitian_part(random_element(system, rng, level=level, scale=scale))


def random_positive_element(
    system: OperatorSystem, rng: np.random.Generator, *, level: int = 1, scale: float = 1.0
) -> np.ndarray:
    """Random element of M_n(S)+, built as h + (|lambda_min| + u) * identity."""
    h = random_hermitian_element(system, rng, level=level, scale=scale)
    lift = max(0.0, -la.lambda_min(h)) + float(rng.uniform(0.05, 0.5))
    return h + lift * np.eye(h.shape[0])


def random_system(
    rng: np.random.Generator, *, d: int | None = None, generators: int | None = None
) -> OperatorSystem:
    """Random operator system: the system generated by a few Gaussian matrices."""
    if d is None:
        d = int(rng.integers(2, 6))
    if generators is None:
        generators = int(rng.integers(1, 4))
    gens = [
        rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        for _ in range(generators)
    ]
    return make_operator_system(gens, d)
