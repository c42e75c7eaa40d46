"""Small dense complex-matrix kernels shared by every other module.

Everything in this package lives on 2x2 or 4x4 complex matrices, so the
linear algebra here is closed form throughout: no iteration, no LAPACK
round trips for things a formula does better.  The two structured
factorizations are

* ``cholesky_lower``: H = L L* for Hermitian positive-definite H, with L
  lower triangular and strictly positive diagonal;
* ``signed_triangular_factor``: H = s diag(e1, e2) s*, the indefinite
  variant keyed by a sign pair, with the same triangular shape for s.

Both factors are unique once the diagonal is pinned positive, which is what
makes them usable as coordinate charts downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "E2",
    "E4",
    "SIGMA",
    "HermitianSignature",
    "SIGNATURES",
    "NotPositiveDefinite",
    "WrongOrbit",
    "adjoint",
    "frob",
    "freeze",
    "blocks",
    "assemble",
    "cholesky_lower",
    "signed_triangular_factor",
    "matrix_exp",
    "matrix_to_json",
    "matrix_from_json",
]

# Scale-invariant cutoff for positivity / nondegeneracy of leading minors.
MINOR_TOL_FACTOR = 1e-12


class NotPositiveDefinite(ValueError):
    """A leading minor fell below tolerance: the input is off the cone."""


class WrongOrbit(ValueError):
    """The sign pattern of the input does not match the requested signature."""


def freeze(a) -> np.ndarray:
    """Return a read-only complex copy of ``a``."""
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


E2 = freeze(np.eye(2))
E4 = freeze(np.eye(4))
# The fixed block involution: swaps the two 2x2 block rows/columns.
SIGMA = freeze(np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]]))


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def frob(a: np.ndarray) -> float:
    """Frobenius norm as a plain float."""
    return float(np.linalg.norm(np.asarray(a)))


def blocks(m: np.ndarray):
    """Split a 4x4 matrix into its four 2x2 blocks (g11, g12, g21, g22)."""
    m = np.asarray(m)
    return m[:2, :2], m[:2, 2:], m[2:, :2], m[2:, 2:]


def assemble(g11, g12, g21, g22) -> np.ndarray:
    """Assemble a 4x4 matrix from 2x2 blocks."""
    return np.block([[np.asarray(g11), np.asarray(g12)], [np.asarray(g21), np.asarray(g22)]]).astype(complex)


@dataclass(frozen=True)
class HermitianSignature:
    """Sign pair (e1, e2) of a nondegenerate Hermitian 2x2 form.

    Exactly four values exist; see ``SIGNATURES``.
    """

    eps1: int
    eps2: int

    def __post_init__(self):
        if self.eps1 not in (-1, 1) or self.eps2 not in (-1, 1):
            raise ValueError("signature entries must be +1 or -1")

    def diag(self) -> np.ndarray:
        return np.diag([complex(self.eps1), complex(self.eps2)])

    def __str__(self) -> str:
        return ("+" if self.eps1 > 0 else "-") + ("+" if self.eps2 > 0 else "-")

    @classmethod
    def from_string(cls, text: str) -> "HermitianSignature":
        if len(text) != 2 or any(c not in "+-" for c in text):
            raise ValueError(f"bad signature string: {text!r}")
        return cls(1 if text[0] == "+" else -1, 1 if text[1] == "+" else -1)


SIGNATURES = (
    HermitianSignature(1, 1),
    HermitianSignature(1, -1),
    HermitianSignature(-1, 1),
    HermitianSignature(-1, -1),
)


def _require_hermitian(h: np.ndarray) -> np.ndarray:
    h = np.asarray(h, dtype=complex)
    if h.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {h.shape}")
    scale = max(frob(h), 1e-300)
    if frob(h - adjoint(h)) > 1e-12 * scale:
        raise ValueError("input is not Hermitian")
    return h


def cholesky_lower(h: np.ndarray, tol_factor: float = MINOR_TOL_FACTOR) -> np.ndarray:
    """Lower Cholesky factor of a Hermitian positive-definite 2x2 matrix.

    Returns L lower triangular with strictly positive diagonal such that
    L L* = h.  The factor is computed by the explicit closed form

        L11 = sqrt(h11),  L21 = h21 / L11,  L22 = sqrt(h22 - |L21|^2),

    which is deterministic: equal inputs give bit-identical outputs.

    Raises ``NotPositiveDefinite`` if a leading minor falls below
    ``tol_factor`` at the scale of ``h``.
    """
    h = _require_hermitian(h)
    scale = frob(h)
    minor1 = h[0, 0].real
    det = (h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]).real
    if minor1 <= tol_factor * scale:
        raise NotPositiveDefinite(f"leading 1x1 minor {minor1:.3e} below tolerance")
    if det <= tol_factor * scale * scale:
        raise NotPositiveDefinite(f"determinant {det:.3e} below tolerance")
    l11 = math.sqrt(minor1)
    l21 = h[1, 0] / l11
    l22 = math.sqrt(h[1, 1].real - abs(l21) ** 2)
    return np.array([[l11, 0.0], [l21, l22]], dtype=complex)


def signed_triangular_factor(
    h: np.ndarray,
    signature: HermitianSignature,
    tol_factor: float = MINOR_TOL_FACTOR,
) -> np.ndarray:
    """Triangular factor s with s diag(e1, e2) s* = h for indefinite h.

    The closed form mirrors the Cholesky one with signs threaded through:

        r1 = sqrt(e1 h11),  r = e1 h21 / r1,  r2 = sqrt(e2 (h22 - e1 |r|^2)).

    Preconditions (exactly the condition for h to lie on the orbit of
    diag(e1, e2) under s . s*):  e1 h11 > 0  and  e1 e2 det(h) > 0.
    Raises ``WrongOrbit`` when they fail.  The factor is unique.
    """
    h = _require_hermitian(h)
    scale = frob(h)
    e1, e2 = signature.eps1, signature.eps2
    minor1 = e1 * h[0, 0].real
    det = (h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]).real
    if minor1 <= tol_factor * scale:
        raise WrongOrbit(f"e1*h11 = {minor1:.3e} not positive at tolerance")
    if e1 * e2 * det <= tol_factor * scale * scale:
        raise WrongOrbit(f"e1*e2*det = {e1 * e2 * det:.3e} not positive at tolerance")
    r1 = math.sqrt(minor1)
    r = e1 * h[1, 0] / r1
    t = e2 * (h[1, 1].real - e1 * abs(r) ** 2)
    # t = e1 e2 det / r1^2 > 0 is implied by the checks above.
    r2 = math.sqrt(t)
    return np.array([[r1, 0.0], [r, r2]], dtype=complex)


def matrix_exp(m: np.ndarray, taylor_degree: int = 12, target_norm: float = 0.25) -> np.ndarray:
    """Matrix exponential by scaling-and-squaring with a truncated Taylor series.

    Sized for small matrices with bounded norm; with ``target_norm`` 0.25 and
    degree 12 the truncation error is far below 1e-14.
    """
    m = np.asarray(m, dtype=complex)
    norm = float(np.linalg.norm(m))
    nsq = 0 if norm <= target_norm else int(math.ceil(math.log2(norm / target_norm)))
    scaled = m / (2.0**nsq)
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, taylor_degree + 1):
        term = term @ scaled / k
        out = out + term
    for _ in range(nsq):
        out = out @ out
    return out


def matrix_to_json(m: np.ndarray) -> list:
    """Encode a complex matrix as nested arrays of [re, im] pairs."""
    m = np.asarray(m, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in m]


def matrix_from_json(data, shape=None) -> np.ndarray:
    """Decode the nested [re, im] encoding produced by ``matrix_to_json``."""
    try:
        rows = [[complex(entry[0], entry[1]) for entry in row] for row in data]
    except (TypeError, IndexError) as exc:
        raise ValueError("matrix JSON must be nested arrays of [re, im] pairs") from exc
    m = np.array(rows, dtype=complex)
    if m.ndim != 2 or (shape is not None and m.shape != shape):
        raise ValueError(f"bad matrix shape {m.shape}, expected {shape}")
    return m
