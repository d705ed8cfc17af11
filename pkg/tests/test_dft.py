from __future__ import annotations

import cmath

import numpy as np
import pytest

from kdclassical import IndexOutOfRange, basis_projector, dft_pair


def test_d1():
    assert np.array_equal(dft_pair(1).transition, np.array([[1.0 + 0j]]))


def test_d2():
    want = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    assert np.abs(dft_pair(2).transition - want).max() <= 1e-15


def test_d4_entry_oracle():
    # U_23 = exp(2*pi*1j*2*3/4) / 2 evaluated independently
    u = dft_pair(4).transition
    assert abs(u[2, 3] - cmath.exp(2j * cmath.pi * 6 / 4) / 2) <= 1e-15
    assert abs(u[2, 3] - (-0.5)) <= 1e-12


def test_rejects_nonpositive_dimension():
    with pytest.raises(ValueError):
        dft_pair(0)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8, 12, 16, 32, 64])
def test_unitarity(d):
    u = dft_pair(d).transition
    assert np.abs(u @ u.conj().T - np.eye(d)).max() <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 5, 9, 16, 64])
def test_mutual_unbiasedness(d):
    u = dft_pair(d).transition
    assert np.abs(np.abs(u) ** 2 - 1.0 / d).max() <= 1e-12


def test_projector_a_basis():
    assert np.array_equal(basis_projector(dft_pair(3), "a", 0), np.diag([1.0, 0, 0]).astype(complex))


def test_projector_b0_uniform():
    want = np.full((2, 2), 0.5, dtype=complex)
    assert np.abs(basis_projector(dft_pair(2), "b", 0) - want).max() <= 1e-15


def test_projector_b_diagonal_is_uniform():
    proj = basis_projector(dft_pair(5), "b", 2)
    assert np.abs(proj.diagonal() - 0.2).max() <= 1e-12


@pytest.mark.parametrize("d", [2, 3, 6, 9, 16, 32])
def test_projector_resolutions_of_identity(d):
    pair = dft_pair(d)
    for which in ("a", "b"):
        total = sum(basis_projector(pair, which, k) for k in range(d))
        assert np.abs(total - np.eye(d)).max() <= 1e-12


def test_projector_properties():
    pair = dft_pair(7)
    proj = basis_projector(pair, "b", 4)
    assert abs(proj.trace() - 1.0) <= 1e-12
    assert np.abs(proj - proj.conj().T).max() <= 1e-15
    assert np.abs(proj @ proj - proj).max() <= 1e-12


def test_projector_index_errors():
    pair = dft_pair(4)
    with pytest.raises(IndexOutOfRange):
        basis_projector(pair, "a", 4)
    with pytest.raises(IndexOutOfRange):
        basis_projector(pair, "b", -1)
    with pytest.raises(ValueError):
        basis_projector(pair, "c", 0)
