import numpy as np
import pytest

from conftest import planted, random_basis
from jordan_gft.errors import IllConditionedStructureError, SingularMatrixError
from jordan_gft.fixtures import (EXAMPLE_A, EXAMPLE_V1, EXAMPLE_V3, ISO_VA, UNICELL_B,
                                 example_decomposition, same_span)
from jordan_gft.jordan import (JordanForm, decomposition_from_basis, distinct_eigenvalues,
                               dual_basis, jordan_chains, jordan_decompose, normalize_chains,
                               segre_from_weyr, weyr_characteristic, weyr_from_segre)
from jordan_gft.matcore import induced_l1_norm, jordan_block

CUBE_ROOTS = [-(6 ** (1 / 3)) * np.exp(2j * np.pi * k / 3) for k in range(3)]


def conjugate_partition(weyr):
    """Oracle: block sizes from kernel dimensions by counting."""
    diffs = [weyr[0]] + [weyr[p] - weyr[p - 1] for p in range(1, len(weyr))]
    return tuple(sum(1 for d in diffs if d > k) for k in range(diffs[0]))


def chain_residual(a, c):
    return induced_l1_norm(a @ c.vectors - c.vectors @ jordan_block(c.value, c.size))


class TestWeyrSegre:
    def test_round_trip(self):
        assert segre_from_weyr((2, 4, 5, 6)) == (4, 2)
        assert weyr_from_segre((4, 2)) == (2, 4, 5, 6)

    def test_inconsistent(self):
        with pytest.raises(IllConditionedStructureError):
            segre_from_weyr((2, 3, 5))

    def test_example_at_zero(self):
        assert weyr_characteristic(EXAMPLE_A, 0) == (2, 4, 5, 6)
        assert weyr_characteristic(EXAMPLE_A.to_numpy().astype(complex) + 0j, 0) == (2, 4, 5, 6)

    def test_single_block(self):
        assert weyr_characteristic(jordan_block(5, 3), 5) == (1, 2, 3)

    def test_diagonalizable(self):
        assert weyr_characteristic(np.diag([7.0, 7.0]), 7) == (2,)

    def test_not_an_eigenvalue(self):
        with pytest.raises(ValueError):
            weyr_characteristic(np.eye(3), 2.0)


class TestDistinctEigenvalues:
    def test_example(self):
        eigs = distinct_eigenvalues(EXAMPLE_A)
        assert len(eigs) == 5
        zero = next(e for e in eigs if abs(e.value) < 1e-12)
        assert (zero.algebraic_multiplicity, zero.geometric_multiplicity, zero.index) == (6, 2, 4)
        assert zero.exact_value == 0
        four = next(e for e in eigs if abs(e.value - 4) < 1e-8)
        assert four.algebraic_multiplicity == 1
        for root in CUBE_ROOTS:
            assert any(abs(e.value - root) < 1e-8 for e in eigs)

    def test_identity(self):
        (e,) = distinct_eigenvalues(np.eye(5))
        assert (e.value, e.algebraic_multiplicity, e.geometric_multiplicity, e.index) == (1, 5, 5, 1)

    def test_companion_of_cube(self):
        # (x - 2)^3 = x^3 - 6x^2 + 12x - 8
        c = np.array([[0, 0, 8], [1, 0, -12], [0, 1, 6]], dtype=float)
        for exact in (True, False):
            (e,) = distinct_eigenvalues(c, exact=exact)
            assert abs(e.value - 2) < 1e-8
            assert (e.algebraic_multiplicity, e.geometric_multiplicity, e.index) == (3, 1, 3)

    def test_invariants(self, rng):
        for _ in range(20):
            a, blocks, _ = planted(rng)
            eigs = distinct_eigenvalues(a)
            assert sum(e.algebraic_multiplicity for e in eigs) == a.shape[0]
            for e in eigs:
                assert 1 <= e.geometric_multiplicity <= e.algebraic_multiplicity
                assert 1 <= e.index <= e.algebraic_multiplicity


class TestChains:
    def test_example_size_two_chain_span(self):
        eig = next(e for e in distinct_eigenvalues(EXAMPLE_A) if abs(e.value) < 1e-12)
        chains = jordan_chains(EXAMPLE_A, eig)
        assert [c.size for c in chains] == [4, 2]
        two = chains[1]
        a = EXAMPLE_A.to_numpy()
        assert chain_residual(a, two) == 0
        # Ker(A) is two-dimensional, so the size-2 chain is fixed only up to
        # the choice of eigenvector outside the size-4 eigenvector line and a
        # shift of the top vector.  Both chains must lie in Ker(A^2) and be
        # interchangeable inside the decomposition.
        quoted = EXAMPLE_V1.to_numpy()
        assert np.linalg.norm(a @ a @ np.hstack([two.vectors, quoted])) <= 1e-12
        four_eig = chains[0].vectors[:, :1]
        assert not same_span(two.vectors[:, :1], four_eig)
        assert not same_span(quoted[:, :1], four_eig)
        d = example_decomposition(EXAMPLE_V1)
        assert induced_l1_norm(a - d.V @ d.J @ d.W.conj().T) <= 1e-8 * induced_l1_norm(a)

    def test_single_block_canonical(self):
        eig = distinct_eigenvalues(jordan_block(0, 2))[0]
        (c,) = jordan_chains(jordan_block(0, 2), eig)
        assert np.array_equal(c.vectors, np.eye(2))

    def test_planted_segre_recovered(self, rng):
        for _ in range(60):
            a, blocks, _ = planted(rng, n_max=8)
            d = jordan_decompose(a)
            assert d.form.matches(JordanForm(tuple(blocks)), 1e-6)
            for e in d.eigenvalues:
                sizes = tuple(c.size for c in d.chains if c.i == d.eigenvalues.index(e))
                assert sizes == conjugate_partition(e.weyr)


class TestDecompose:
    def test_example_form(self):
        d = jordan_decompose(EXAMPLE_A)
        expected = JordanForm(((0, 4), (0, 2), (CUBE_ROOTS[2], 1), (CUBE_ROOTS[1], 1),
                               (CUBE_ROOTS[0], 1), (4, 1)))
        assert d.form.matches(expected, 1e-8)
        assert [s for _, s in d.form.blocks] == [4, 2, 1, 1, 1, 1]
        # canonical order: increasing |1 - lambda|
        gaps = [abs(1 - v) for v, _ in d.form.blocks]
        assert gaps == sorted(gaps)

    def test_diagonal(self):
        d = jordan_decompose(np.diag([3.0, 1.0, 2.0]))
        assert [v for v, _ in d.form.blocks] == [1, 2, 3]
        assert np.allclose(np.abs(d.V), np.eye(3)[:, [1, 2, 0]])

    def test_unicellular_fixture(self):
        d = jordan_decompose(UNICELL_B)
        assert d.form.blocks == ((0, 4),)
        assert d.is_unicellular()

    def test_invariants(self, rng):
        for _ in range(40):
            a, _, _ = planted(rng)
            d = jordan_decompose(a)
            assert induced_l1_norm(a - d.V @ d.J @ d.W.conj().T) <= 1e-8 * max(induced_l1_norm(a), 1)
            assert induced_l1_norm(d.W.conj().T @ d.V - np.eye(d.n)) <= 1e-8
            assert sum(c.size for c in d.chains) == d.n
            for c in d.chains:
                assert induced_l1_norm(c.vectors) == pytest.approx(1, abs=1e-12)
                assert chain_residual(a, c) <= 1e-8 * max(induced_l1_norm(a), 1)

    def test_large_unicellular(self, rng):
        # eigenvalues of a size-10 block split by roughly eps**(1/10)
        for _ in range(10):
            v = random_basis(rng, 10)
            a = v @ jordan_block(-2, 10) @ np.linalg.inv(v)
            assert jordan_decompose(a).form.matches(JordanForm(((-2, 10),)), 1e-6)

    def test_permutation_covariance(self, rng):
        for _ in range(20):
            a, _, _ = planted(rng, repeat=False)
            t = np.eye(len(a))[rng.permutation(len(a))]
            da, db = jordan_decompose(a), jordan_decompose(t @ a @ t.T)
            for ca in da.chains:
                cb = next(c for c in db.chains if abs(c.value - ca.value) < 1e-6)
                assert same_span(cb.vectors, t @ ca.vectors)

    def test_ill_conditioned_reported(self):
        # a perturbed Jordan block whose eigenvalues are well separated but
        # whose eigenvector matrix is numerically singular
        a = jordan_block(0, 12) + 1e-10 * np.eye(12, k=-11)
        with pytest.raises(IllConditionedStructureError):
            jordan_decompose(a, exact=False)

    def test_tiny_perturbation_snaps_to_block(self):
        # the split eigenvalues sit on a circle of radius 1e-13**(1/12) ~ 0.08;
        # the nearby J_12(0) reproduces A to within the perturbation
        a = jordan_block(0, 12) + 1e-13 * np.eye(12, k=-11)
        d = jordan_decompose(a, exact=False)
        assert [s for _, s in d.form.blocks] == [12]
        assert induced_l1_norm(a - d.V @ d.J @ d.W.conj().T) <= 1e-12


class TestNormalize:
    def test_scaling(self):
        v = 4 * np.eye(2)
        d = decomposition_from_basis(v, [(0, 2)])
        n = normalize_chains(d)
        assert np.allclose(n.V, np.eye(2))

    def test_example_v3(self):
        d = example_decomposition(EXAMPLE_V3)
        n = normalize_chains(d)
        two = next(c for c in n.chains if c.size == 2)
        assert induced_l1_norm(two.vectors) == pytest.approx(1)
        a = EXAMPLE_A.to_numpy()
        assert induced_l1_norm(two.vectors - a @ two.vectors) == pytest.approx(2)

    def test_idempotent(self):
        d = jordan_decompose(EXAMPLE_A)
        assert np.allclose(normalize_chains(d).V, d.V)


class TestDualBasis:
    def test_identity(self):
        assert np.allclose(dual_basis(np.eye(3)), np.eye(3))

    def test_unitary(self, rng):
        q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
        assert np.allclose(dual_basis(q), q)

    def test_eigenvector_matrix(self):
        va = ISO_VA.to_numpy()
        assert np.allclose(dual_basis(va).conj().T @ va, np.eye(3))

    def test_singular(self):
        with pytest.raises(SingularMatrixError):
            dual_basis(np.ones((2, 2)))
