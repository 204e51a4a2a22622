"""PSD-cone / affine-subspace feasibility via Dykstra's algorithm.

A problem asks for a Hermitian W with trace(A_k W) = b_k for all k and
W >= 0.  Dykstra's corrected alternating projections are used instead of
plain alternating projections because the affine set is not a cone through
the origin: with the corrections, the iterates converge to a point of the
intersection whenever one exists, and the gap between the cone-side and
affine-side iterates converges to the distance between the sets otherwise.

Verdicts are three-valued.  Infeasibility is detected heuristically (the
gap stalls at a value well above tolerance); budget exhaustion yields
"undecided", which callers surface rather than coerce.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg as la
from .errors import DimensionError, InfeasibleAffineError, ParseError

__all__ = [
    "FeasibilityProblem",
    "FeasibilityVerdict",
    "project_affine",
    "dykstra_solve",
]

_STALL_WINDOW = 50


@dataclass
class FeasibilityProblem:
    """trace(A_k W) = b_k for Hermitian A_k, real b_k, with W >= 0 sought."""

    dim: int
    constraints: list  # of (Hermitian ndarray, float)
    tol: float = 1e-7
    max_iter: int = 20000

    def __post_init__(self):
        if self.dim < 1:
            raise DimensionError(f"problem dimension must be positive, got {self.dim}")
        if not self.constraints:
            raise ValueError("constraint list must be nonempty")
        checked = []
        for a, b in self.constraints:
            m = la.as_matrix(a)
            if m.shape != (self.dim, self.dim):
                raise DimensionError(
                    f"constraint matrix of shape {m.shape}, expected {(self.dim,) * 2}"
                )
            checked.append((la.hermitian_part(m), float(b)))
        self.constraints = checked

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "constraints": [
                {"a": la.encode_matrix(a), "b": b} for a, b in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, obj) -> "FeasibilityProblem":
        try:
            cons = [(la.decode_matrix(c["a"]), float(c["b"])) for c in obj["constraints"]]
            return cls(
                dim=int(obj["dim"]),
                constraints=cons,
                tol=float(obj.get("tol", 1e-7)),
                max_iter=int(obj.get("max_iter", 20000)),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed feasibility problem JSON: {exc}") from exc


@dataclass
class FeasibilityVerdict:
    status: str  # "feasible" | "infeasible" | "undecided"
    witness: np.ndarray | None
    gap: float
    iterations: int = 0

    def __bool__(self) -> bool:
        return self.status == "feasible"


@dataclass
class _AffineSpan:
    """Orthonormalized constraint system; dependent constraints are pruned
    after a consistency check on their right-hand sides."""

    mats: np.ndarray  # (m, dim, dim), orthonormal under trace(A B)
    rhs: np.ndarray  # (m,)

    @classmethod
    def build(cls, problem: FeasibilityProblem) -> "_AffineSpan":
        mats: list[np.ndarray] = []
        rhs: list[float] = []
        for a, b in problem.constraints:
            w = a.astype(complex)
            bb = float(b)
            for _ in range(2):
                for m, r in zip(mats, rhs):
                    coef = float(np.real(np.vdot(m, w)))
                    w = w - coef * m
                    bb = bb - coef * r
            nrm = la.frobenius(w)
            if nrm <= 1e-12 * max(1.0, la.frobenius(a)):
                if abs(bb) > problem.tol:
                    raise InfeasibleAffineError(
                        f"dependent constraint with residual {abs(bb):.3e}"
                    )
                continue
            mats.append(w / nrm)
            rhs.append(bb / nrm)
        if not mats:
            # every constraint was redundant and consistent: affine set = all of M_d
            return cls(mats=np.zeros((0, problem.dim, problem.dim), dtype=complex),
                       rhs=np.zeros(0))
        return cls(mats=np.stack(mats), rhs=np.asarray(rhs))

    def project(self, w: np.ndarray) -> np.ndarray:
        if len(self.rhs) == 0:
            return w
        vals = np.real(np.einsum("kij,ij->k", self.mats.conj(), w))
        return w + np.einsum("k,kij->ij", self.rhs - vals, self.mats)

    def max_residual(self, w: np.ndarray) -> float:
        if len(self.rhs) == 0:
            return 0.0
        vals = np.real(np.einsum("kij,ij->k", self.mats.conj(), w))
        return float(np.abs(vals - self.rhs).max())


def project_affine(problem: FeasibilityProblem, w) -> np.ndarray:
    """Frobenius-nearest Hermitian W' satisfying every constraint exactly."""
    span = _AffineSpan.build(problem)
    return la.hermitian_part(span.project(la.hermitian_part(w)))


def dykstra_solve(problem: FeasibilityProblem) -> FeasibilityVerdict:
    """Run Dykstra's alternating projections between PSD cone and affine set.

    feasible:   cone and affine iterates meet within tol; witness is the
                affine-side iterate (constraints exact, lambda_min >= -gap).
    infeasible: the gap stalls (relative change < tol/10 over a 50-iteration
                window) at a value above 10 * tol.
    undecided:  iteration budget exhausted before either test fires.
    """
    span = _AffineSpan.build(problem)
    dim = problem.dim
    x = span.project(np.zeros((dim, dim), dtype=complex))
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    gaps: list[float] = []
    for it in range(1, problem.max_iter + 1):
        y = la.project_psd(x + p)
        p = x + p - y
        x = la.hermitian_part(span.project(y + q))
        q = y + q - x
        gap = la.frobenius(y - x)
        gaps.append(gap)
        if gap < problem.tol:
            return FeasibilityVerdict("feasible", x, gap, it)
        if it > _STALL_WINDOW and gap > 10 * problem.tol:
            prev = gaps[-1 - _STALL_WINDOW]
            if abs(gap - prev) < (problem.tol / 10.0) * max(1.0, gap):
                return FeasibilityVerdict("infeasible", None, gap, it)
    return FeasibilityVerdict("undecided", None, gaps[-1], problem.max_iter)
