"""The computational basis, its DFT-conjugate basis, and the transition matrix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import IndexOutOfRange


@dataclass(frozen=True)
class BasisPair:
    """A pair of bases related by the DFT transition matrix U_ij = <a_i|b_j>.

    The a-basis is the standard basis; |b_j> is column j of ``transition``.
    """

    dim: int
    transition: np.ndarray

    def b_column(self, j: int) -> np.ndarray:
        return self.transition[:, j]


def dft_pair(d: int) -> BasisPair:
    """Basis pair with U_ij = exp(2*pi*1j*i*j/d) / sqrt(d).

    Exponents are reduced mod d before exponentiation so the phase argument
    stays bounded for every d handled here.
    """
    if d < 1:
        raise ValueError("dimension must be a positive integer")
    idx = np.arange(d)
    exponent = np.outer(idx, idx) % d
    u = np.exp(2j * np.pi * exponent / d) / np.sqrt(d)
    u.setflags(write=False)
    return BasisPair(dim=d, transition=u)


def basis_projector(pair: BasisPair, which: str, index: int) -> np.ndarray:
    """Rank-one projector |a_i><a_i| or |b_j><b_j|."""
    d = pair.dim
    if not 0 <= index < d:
        raise IndexOutOfRange(f"index {index} outside Z_{d}")
    if which == "a":
        proj = np.zeros((d, d), dtype=np.complex128)
        proj[index, index] = 1.0
        return proj
    if which == "b":
        col = pair.b_column(index)
        return np.outer(col, col.conj())
    raise ValueError("which must be 'a' or 'b'")
