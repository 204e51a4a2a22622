"""Dense complex matrix arithmetic: the numerical substrate for the package.

Matrices are plain ``numpy.ndarray`` objects with complex dtype.  This module
fixes the conventions everything else relies on: Hermitian symmetrization at
construction, descending eigenvalue order, PSD projection by eigenvalue
clipping, and the JSON wire format for complex matrices (an entry is a
two-element ``[re, im]`` array, a matrix is an array of rows).

All functions are pure; none mutate their arguments.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NumericalError, ParseError

__all__ = [
    "as_matrix",
    "adjoint",
    "hermitian_part",
    "antihermitian_part",
    "is_hermitian",
    "hermitian",
    "spectral_decompose",
    "eigenvalues_desc",
    "lambda_min",
    "lambda_max",
    "project_psd",
    "op_norm",
    "trace_norm",
    "frobenius",
    "trace_inner",
    "identity",
    "basis_matrix",
    "encode_matrix",
    "decode_matrix",
]


def as_matrix(a) -> np.ndarray:
    """Coerce input to a 2-D complex array."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got ndim={m.ndim}")
    return m


def _require_square(a: np.ndarray, what: str) -> np.ndarray:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"{what} requires a square matrix, got {m.shape}")
    return m


def adjoint(a) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(a).conj().T


def hermitian_part(a) -> np.ndarray:
    """(A + A*)/2.  Symmetrizes rather than rejects near-Hermitian input,
    since downstream projections accumulate asymmetry at machine precision."""
    m = _require_square(a, "hermitian_part")
    return (m + m.conj().T) / 2.0


# `hermitian` is the constructor name used at call sites that build a
# HermitianMatrix from possibly asymmetric data.
hermitian = hermitian_part


def antihermitian_part(a) -> np.ndarray:
    """(A - A*)/(2i), the Hermitian matrix Im(A)."""
    m = _require_square(a, "antihermitian_part")
    return (m - m.conj().T) / 2.0j


def is_hermitian(a, tol: float = 1e-10) -> bool:
    """True when the anti-Hermitian part is below ``tol`` (relative to scale)."""
    m = _require_square(a, "is_hermitian")
    scale = max(1.0, float(np.linalg.norm(m)))
    return float(np.linalg.norm(m - m.conj().T)) <= tol * scale


def spectral_decompose(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ``(w, u)`` with eigenvalues ``w`` real and sorted descending and
    ``u`` unitary with columns the matching eigenvectors, so that
    ``u @ diag(w) @ u.conj().T`` reconstructs the input to backend precision.
    """
    m = hermitian_part(h)
    try:
        w, u = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    return w[::-1].copy(), u[:, ::-1].copy()


def eigenvalues_desc(h) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, descending."""
    m = hermitian_part(h)
    try:
        w = np.linalg.eigvalsh(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"eigensolver did not converge: {exc}") from exc
    return w[::-1].copy()


def lambda_min(h) -> float:
    return float(eigenvalues_desc(h)[-1])


def lambda_max(h) -> float:
    return float(eigenvalues_desc(h)[0])


def project_psd(h) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix: clip the spectrum at 0.

    Idempotent, and a fixed point on PSD input.
    """
    w, u = spectral_decompose(h)
    clipped = np.clip(w, 0.0, None)
    return (u * clipped) @ u.conj().T


def op_norm(a) -> float:
    """Operator (spectral) norm: sqrt of the largest eigenvalue of A*A."""
    m = as_matrix(a)
    gram = m.conj().T @ m
    top = lambda_max(gram)
    return float(np.sqrt(max(top, 0.0)))


def trace_norm(a) -> float:
    """Nuclear norm (sum of singular values); the dual of the operator norm."""
    m = as_matrix(a)
    return float(np.linalg.svd(m, compute_uv=False).sum())


def frobenius(a) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def trace_inner(a, b) -> complex:
    """Trace inner product <A, B> = trace(A* B), antilinear in the first slot."""
    return complex(np.vdot(np.asarray(a), np.asarray(b)))


def identity(d: int) -> np.ndarray:
    return np.eye(d, dtype=complex)


def basis_matrix(d: int, i: int, j: int) -> np.ndarray:
    """Matrix unit E_ij in M_d."""
    e = np.zeros((d, d), dtype=complex)
    e[i, j] = 1.0
    return e


# ----------------------------------------------------------------------------
# JSON wire format, used repo-wide: entry [re, im], matrix = array of rows.
# Example: I_2 = [[[1,0],[0,0]],[[0,0],[1,0]]]
# ----------------------------------------------------------------------------

def encode_matrix(a) -> list:
    m = as_matrix(a)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(obj) -> np.ndarray:
    if not isinstance(obj, list) or not obj:
        raise ParseError("matrix JSON must be a nonempty array of rows")
    ncols = None
    rows = []
    for r, row in enumerate(obj):
        if not isinstance(row, list) or not row:
            raise ParseError(f"row {r} is not a nonempty array")
        if ncols is None:
            ncols = len(row)
        elif len(row) != ncols:
            raise ParseError(f"row {r} has {len(row)} entries, expected {ncols}")
        out = []
        for c, entry in enumerate(row):
            if (
                not isinstance(entry, list)
                or len(entry) != 2
                or not all(isinstance(x, (int, float)) for x in entry)
            ):
                raise ParseError(
                    f"entry ({r},{c}) must be a two-element [re, im] array"
                )
            out.append(complex(entry[0], entry[1]))
        rows.append(out)
    return np.asarray(rows, dtype=complex)
