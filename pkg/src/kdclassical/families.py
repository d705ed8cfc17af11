"""Enumeration of all classical pure states under a DFT pair.

For each ordered factorization d = p*q there is one family of p*q states

    |psi_ms> = (1/sqrt(q)) sum_k w_q^{sk} |a_{kp+m}>,   m in Z_p, s in Z_q,

equal, up to the global phase w_d^{-ms}, to
(1/sqrt(p)) sum_l w_p^{-ml} |b_{lq+s}>. The degenerate factorizations (d,1)
and (1,d) reproduce the two bases themselves. Ordered factorizations are
kept distinct: (p,q) and (q,p) give different families for p != q.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dft import BasisPair, basis_projector, dft_pair
from .exceptions import BadFactorization, IndexOutOfRange, WrongFamilyKind


class Factorization(NamedTuple):
    p: int
    q: int


@dataclass(frozen=True)
class FamilyMember:
    m: int
    s: int
    vector: np.ndarray
    projector: np.ndarray


@dataclass(frozen=True)
class PureFamily:
    """Projectors of one factorization family, labeled A/B/PSI(p,q)/PHI(p,q)."""

    label: str
    dim: int
    p: int
    q: int
    members: tuple[FamilyMember, ...]

    def projectors(self) -> list[np.ndarray]:
        return [member.projector for member in self.members]

    def member(self, m: int, s: int) -> FamilyMember:
        return self.members[m * self.q + s]


@dataclass(frozen=True)
class FamilyIdentityReport:
    """Deviations of the two resolution identities of a PSI/PHI family.

    a_side: for each m, || sum_s psi_ms - sum_k a_{kp+m} ||_max
    b_side: for each s, || sum_m psi_ms - sum_l b_{lq+s} ||_max
    """

    label: str
    a_side_max_dev: float
    b_side_max_dev: float

    @property
    def max_dev(self) -> float:
        return max(self.a_side_max_dev, self.b_side_max_dev)


def factorizations(d: int) -> list[Factorization]:
    """All ordered pairs (p, q) with p*q = d, sorted by p ascending."""
    if d < 1:
        raise ValueError("dimension must be a positive integer")
    return [Factorization(p, d // p) for p in range(1, d + 1) if d % p == 0]


def family_label(p: int, q: int) -> str:
    if q == 1:
        return "A"
    if p == 1:
        return "B"
    return f"PSI({p},{q})" if p <= q else f"PHI({p},{q})"


def psi_state(pair: BasisPair, p: int, q: int, m: int, s: int) -> np.ndarray:
    """The a-basis expression of the (m, s) member of the (p, q) family."""
    d = pair.dim
    if p < 1 or q < 1 or p * q != d:
        raise BadFactorization(f"({p},{q}) is not a factorization of {d}")
    if not (0 <= m < p and 0 <= s < q):
        raise IndexOutOfRange(f"(m,s)=({m},{s}) outside Z_{p} x Z_{q}")
    v = np.zeros(d, dtype=np.complex128)
    k = np.arange(q)
    v[k * p + m] = np.exp(2j * np.pi * ((s * k) % q) / q) / np.sqrt(q)
    return v


def psi_state_b_form(pair: BasisPair, p: int, q: int, m: int, s: int) -> np.ndarray:
    """Same state built from the b-basis expression, global phase included."""
    d = pair.dim
    if p < 1 or q < 1 or p * q != d:
        raise BadFactorization(f"({p},{q}) is not a factorization of {d}")
    if not (0 <= m < p and 0 <= s < q):
        raise IndexOutOfRange(f"(m,s)=({m},{s}) outside Z_{p} x Z_{q}")
    phase = np.exp(-2j * np.pi * ((m * s) % d) / d)
    v = np.zeros(d, dtype=np.complex128)
    for l in range(p):
        coeff = np.exp(-2j * np.pi * ((m * l) % p) / p)
        v += coeff * pair.b_column(l * q + s)
    return phase * v / np.sqrt(p)


def build_family(pair: BasisPair, p: int, q: int) -> PureFamily:
    members = []
    for m in range(p):
        for s in range(q):
            v = psi_state(pair, p, q, m, s)
            proj = np.outer(v, v.conj())
            members.append(FamilyMember(m=m, s=s, vector=v, projector=proj))
    return PureFamily(
        label=family_label(p, q), dim=pair.dim, p=p, q=q, members=tuple(members)
    )


def pure_kd_set(pair: BasisPair) -> list[PureFamily]:
    """One family per factorization, in factorization order; no deduplication."""
    return [build_family(pair, p, q) for p, q in factorizations(pair.dim)]


def all_projectors(families) -> tuple[list[np.ndarray], list[str]]:
    """Flatten families into parallel projector/label lists."""
    projectors: list[np.ndarray] = []
    labels: list[str] = []
    for fam in families:
        for member in fam.members:
            projectors.append(member.projector)
            if fam.label == "A":
                labels.append(f"A[{member.m}]")
            elif fam.label == "B":
                labels.append(f"B[{member.s}]")
            else:
                labels.append(f"{fam.label}[{member.m},{member.s}]")
    return projectors, labels


def family_identity_sums(family: PureFamily) -> FamilyIdentityReport:
    """Check the resolution identities tying a PSI/PHI family to the bases."""
    if family.label in ("A", "B"):
        raise WrongFamilyKind(f"family {family.label} is a basis set, not a PSI/PHI family")
    pair = dft_pair(family.dim)
    p, q = family.p, family.q
    a_dev = 0.0
    for m in range(p):
        lhs = sum(family.member(m, s).projector for s in range(q))
        rhs = sum(basis_projector(pair, "a", k * p + m) for k in range(q))
        a_dev = max(a_dev, float(np.abs(lhs - rhs).max()))
    b_dev = 0.0
    for s in range(q):
        lhs = sum(family.member(m, s).projector for m in range(p))
        rhs = sum(basis_projector(pair, "b", l * q + s) for l in range(p))
        b_dev = max(b_dev, float(np.abs(lhs - rhs).max()))
    return FamilyIdentityReport(label=family.label, a_side_max_dev=a_dev, b_side_max_dev=b_dev)
