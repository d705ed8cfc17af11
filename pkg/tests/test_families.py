from __future__ import annotations

import numpy as np
import pytest

from kdclassical import (
    BadFactorization,
    IndexOutOfRange,
    WrongFamilyKind,
    basis_projector,
    build_family,
    classicality,
    dft_pair,
    factorizations,
    family_identity_sums,
    kd_table,
    psi_state,
    psi_state_b_form,
    pure_kd_set,
    support_counts,
)


def test_factorizations():
    assert factorizations(9) == [(1, 9), (3, 3), (9, 1)]
    assert factorizations(6) == [(1, 6), (2, 3), (3, 2), (6, 1)]
    assert len(factorizations(12)) == 6
    assert factorizations(1) == [(1, 1)]
    with pytest.raises(ValueError):
        factorizations(0)


def test_psi_state_d4_p2q2():
    v = psi_state(dft_pair(4), 2, 2, 0, 0)
    want = np.zeros(4, dtype=complex)
    want[0] = want[2] = 1 / np.sqrt(2)
    assert np.abs(v - want).max() <= 1e-15


def test_psi_state_degenerate_is_basis_vector():
    v = psi_state(dft_pair(6), 6, 1, 3, 0)
    want = np.zeros(6, dtype=complex)
    want[3] = 1.0
    assert np.abs(v - want).max() <= 1e-15


def test_psi_state_b_family_is_b_column():
    pair = dft_pair(5)
    for s in range(5):
        assert np.abs(psi_state(pair, 1, 5, 0, s) - pair.transition[:, s]).max() <= 1e-12


@pytest.mark.parametrize("d", [4, 6, 9, 10])
def test_a_side_equals_b_side_with_phase(d):
    pair = dft_pair(d)
    for p, q in factorizations(d):
        for m in range(p):
            for s in range(q):
                a_form = psi_state(pair, p, q, m, s)
                b_form = psi_state_b_form(pair, p, q, m, s)
                assert np.abs(a_form - b_form).max() <= 1e-12


def test_phase_explicit_d4():
    # (m,s) = (1,1) at p = q = 2: b-side carries the global phase w_4^{-1} = -1j,
    # giving (-1j/sqrt(2)) (|b_1> - |b_3>) = (0, 1, 0, -1)/sqrt(2).
    pair = dft_pair(4)
    want = np.array([0, 1, 0, -1], dtype=complex) / np.sqrt(2)
    assert np.abs(psi_state(pair, 2, 2, 1, 1) - want).max() <= 1e-12
    assert np.abs(psi_state_b_form(pair, 2, 2, 1, 1) - want).max() <= 1e-12


def test_psi_state_validation():
    pair = dft_pair(6)
    with pytest.raises(BadFactorization):
        psi_state(pair, 4, 2, 0, 0)
    with pytest.raises(IndexOutOfRange):
        psi_state(pair, 2, 3, 2, 0)
    with pytest.raises(IndexOutOfRange):
        psi_state(pair, 2, 3, 0, 3)


def test_member_table_d6():
    pair = dft_pair(6)
    proj = build_family(pair, 2, 3).member(1, 2).projector
    values = kd_table(proj, pair).values
    nonzero = np.abs(values) > 1e-12
    assert nonzero.sum() == 6
    assert np.abs(values[nonzero] - 1 / 6).max() <= 1e-12
    # support rows are i = 1 mod 2, columns j = 2 mod 3
    rows, cols = np.where(nonzero)
    assert set(rows) == {1, 3, 5}
    assert set(cols) == {2, 5}


def test_pure_kd_set_counts_and_labels():
    fams9 = pure_kd_set(dft_pair(9))
    assert [f.label for f in fams9] == ["B", "PSI(3,3)", "A"]
    assert sum(len(f.members) for f in fams9) == 27

    fams6 = pure_kd_set(dft_pair(6))
    assert [f.label for f in fams6] == ["B", "PSI(2,3)", "PHI(3,2)", "A"]
    assert sum(len(f.members) for f in fams6) == 24

    fams5 = pure_kd_set(dft_pair(5))
    assert [f.label for f in fams5] == ["B", "A"]
    assert sum(len(f.members) for f in fams5) == 10


def test_degenerate_families_match_basis_projectors():
    pair = dft_pair(6)
    fams = {f.label: f for f in pure_kd_set(pair)}
    for i in range(6):
        assert np.abs(fams["A"].member(i, 0).projector - basis_projector(pair, "a", i)).max() <= 1e-14
        assert np.abs(fams["B"].member(0, i).projector - basis_projector(pair, "b", i)).max() <= 1e-12


@pytest.mark.parametrize("d", list(range(1, 13)))
def test_every_member_is_classical_with_d_uniform_cells(d):
    pair = dft_pair(d)
    for fam in pure_kd_set(pair):
        for member in fam.members:
            table = kd_table(member.projector, pair)
            assert table.values.real.min() >= -1e-12
            assert np.abs(table.values.imag).max() <= 1e-12
            cells = np.abs(table.values - 1.0 / d) <= 1e-12
            assert cells.sum() == d
            assert np.abs(table.values[~cells]).max() <= 1e-12 if d > 1 else True
            n_a, n_b = support_counts(member.vector, pair)
            assert n_a * n_b == d
            assert (n_a, n_b) == (fam.q, fam.p)


def test_identity_sum_examples():
    pair9 = dft_pair(9)
    fam9 = build_family(pair9, 3, 3)
    lhs = sum(fam9.member(0, s).projector for s in range(3))
    rhs = sum(basis_projector(pair9, "a", k) for k in (0, 3, 6))
    assert np.abs(lhs - rhs).max() <= 1e-12

    pair6 = dft_pair(6)
    fam6 = build_family(pair6, 2, 3)
    lhs = sum(fam6.member(m, 1).projector for m in range(2))
    rhs = basis_projector(pair6, "b", 1) + basis_projector(pair6, "b", 4)
    assert np.abs(lhs - rhs).max() <= 1e-12

    pair4 = dft_pair(4)
    fam4 = build_family(pair4, 2, 2)
    total = sum(member.projector for member in fam4.members)
    assert np.abs(total - np.eye(4)).max() <= 1e-12


@pytest.mark.parametrize("d", [4, 6, 9, 10, 15])
def test_family_identity_reports(d):
    for fam in pure_kd_set(dft_pair(d)):
        if fam.label in ("A", "B"):
            with pytest.raises(WrongFamilyKind):
                family_identity_sums(fam)
        else:
            report = family_identity_sums(fam)
            assert report.max_dev <= 1e-12


def test_classicality_of_families_matches_engine():
    pair = dft_pair(10)
    for fam in pure_kd_set(pair):
        for member in fam.members:
            assert classicality(kd_table(member.projector, pair)).classical
