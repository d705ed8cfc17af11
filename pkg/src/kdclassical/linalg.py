"""Dense complex linear algebra: Hermiticity/PSD checks, span ranks, JSON I/O.

Matrices are plain ``numpy.ndarray`` values of dtype complex128, shape
``(d, d)``. The JSON interchange schema used by every module and the CLI is

    {"d": <int>, "entries": [[re, im], ...]}

with exactly ``d*d`` row-major pairs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import MixedDimensions, NotHermitian


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the toolkit.

    eig_psd      -- eigenvalue floor for positive semidefiniteness checks
    classicality -- smallest allowed quasiprobability value / largest |Im|
    rank_rel     -- relative singular-value cutoff for span ranks
    recon        -- Frobenius bound for accepted reconstructions
    """

    eig_psd: float = 1e-10
    classicality: float = 1e-9
    rank_rel: float = 1e-8
    recon: float = 1e-9

    def __post_init__(self) -> None:
        for name in ("eig_psd", "classicality", "rank_rel", "recon"):
            if getattr(self, name) <= 0:
                raise ValueError(f"tolerance {name} must be strictly positive")


DEFAULT_TOL = Tolerances()


def as_matrix(m: np.ndarray) -> np.ndarray:
    """Coerce to a square complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    """True iff ``max_ij |M_ij - conj(M_ji)| <= tol``."""
    a = as_matrix(m)
    return float(np.abs(a - a.conj().T).max()) <= tol


def require_hermitian(m: np.ndarray, tol: float) -> np.ndarray:
    a = as_matrix(m)
    dev = float(np.abs(a - a.conj().T).max())
    if dev > tol:
        raise NotHermitian(f"matrix deviates from Hermiticity by {dev:.3e} (tol {tol:.1e})")
    return a


def is_density_matrix(m: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> bool:
    """Hermitian within tol.recon, unit trace within tol.recon, eigenvalues >= -tol.eig_psd."""
    a = as_matrix(m)
    if not is_hermitian(a, tol.recon):
        return False
    if abs(a.trace().real - 1.0) > tol.recon or abs(a.trace().imag) > tol.recon:
        return False
    return float(np.linalg.eigvalsh(a).min()) >= -tol.eig_psd


def flatten_hermitian(m: np.ndarray) -> np.ndarray:
    """Flatten a Hermitian d x d matrix to a real vector of length d^2.

    Fixed layout: diagonal first, then the strict upper triangle row-major
    with the real part before the imaginary part of each entry.
    """
    a = as_matrix(m)
    iu = np.triu_indices(a.shape[0], k=1)
    upper = a[iu]
    off = np.empty(2 * upper.size)
    off[0::2] = upper.real
    off[1::2] = upper.imag
    return np.concatenate([a.diagonal().real, off])


def real_span_rank(matrices, tol: Tolerances = DEFAULT_TOL) -> int:
    """Rank of the real vector space spanned by a set of Hermitian matrices.

    Each matrix is flattened by :func:`flatten_hermitian`; the rank is the
    number of singular values above ``tol.rank_rel`` times the largest one.
    """
    mats = [as_matrix(m) for m in matrices]
    if not mats:
        return 0
    d = mats[0].shape[0]
    for m in mats:
        if m.shape[0] != d:
            raise MixedDimensions(f"matrices mix dimensions {d} and {m.shape[0]}")
        require_hermitian(m, tol.recon)
    stack = np.array([flatten_hermitian(m) for m in mats])
    sigma = np.linalg.svd(stack, compute_uv=False)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > tol.rank_rel * sigma[0]))


def matrix_to_json(m: np.ndarray) -> dict:
    """Encode a matrix in the interchange schema."""
    a = as_matrix(m)
    flat = a.reshape(-1)
    return {"d": int(a.shape[0]), "entries": [[float(z.real), float(z.imag)] for z in flat]}


def matrix_from_json(doc: dict) -> np.ndarray:
    """Decode the interchange schema; raises ValueError on malformed input."""
    if not isinstance(doc, dict) or "d" not in doc or "entries" not in doc:
        raise ValueError("matrix document must have keys 'd' and 'entries'")
    d = int(doc["d"])
    if d < 1:
        raise ValueError("matrix dimension must be >= 1")
    entries = doc["entries"]
    if len(entries) != d * d:
        raise ValueError(f"expected {d * d} entries, got {len(entries)}")
    flat = np.empty(d * d, dtype=np.complex128)
    for k, pair in enumerate(entries):
        if len(pair) != 2:
            raise ValueError("each entry must be a [re, im] pair")
        flat[k] = complex(float(pair[0]), float(pair[1]))
    return flat.reshape(d, d)
