import itertools
import warnings

import numpy as np
import pytest

from conftest import planted, random_basis
from jordan_gft.equiv import (BlockDiagonalTransform, PermutationMap, PreconditionWarning,
                              apply_isomorphism, canonical_representative, classify,
                              dual_basis_graph, find_isomorphism, format_verdict,
                              invariant_subspace_subset_check, is_jordan_equivalent,
                              is_jordan_subspace, random_jordan_equivalent,
                              structural_membership_check, toeplitz_extended, toeplitz_upper,
                              transform_decomposition)
from jordan_gft.errors import SizeLimitError
from jordan_gft.fixtures import (CHAIN_GRAPH, CHAIN_GRAPH_EXTRA, EXAMPLE_A, ISO_A, ISO_B, ISO_VA,
                                 ISO_VB, UNICELL_B, binarize, same_span)
from jordan_gft.gft import gft
from jordan_gft.jordan import JordanForm, decomposition_from_basis, jordan_decompose
from jordan_gft.matcore import induced_l1_norm, jordan_block


def brute_force_isomorphic(a, b):
    n = len(a)
    return any(np.allclose(a, b[np.ix_(p, p)]) for p in itertools.permutations(range(n)))


class TestPermutationMap:
    def test_matrix_and_inverse(self):
        p = PermutationMap((2, 0, 1))
        t = p.matrix()
        assert np.array_equal(np.linalg.inv(t).conj().T, t)
        assert p.inverse().inverse() == p
        assert np.array_equal(p.apply_vector(np.array([10, 20, 30])), t @ [10, 20, 30])

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            PermutationMap((0, 0, 1))

    def test_apply_matches_similarity(self, rng):
        a = rng.normal(size=(5, 5))
        p = PermutationMap(tuple(rng.permutation(5)))
        t = p.matrix()
        assert np.allclose(apply_isomorphism(a, p), t @ a @ np.linalg.inv(t))


class TestIsomorphism:
    def test_self(self):
        a = EXAMPLE_A.to_numpy()
        p = find_isomorphism(a, a)
        assert np.allclose(apply_isomorphism(a, p), a)

    def test_counterexample_pair(self):
        p = find_isomorphism(ISO_A, ISO_B)
        assert p is not None
        assert np.array_equal(apply_isomorphism(ISO_A, p), ISO_B.to_numpy())

    def test_changed_weight(self):
        a = EXAMPLE_A.to_numpy()
        b = a.copy()
        b[0, 3] = -2.5
        assert find_isomorphism(a, b) is None

    def test_round_trip(self, rng):
        a = rng.normal(size=(6, 6))
        p = PermutationMap(tuple(rng.permutation(6)))
        assert np.allclose(apply_isomorphism(apply_isomorphism(a, p), p.inverse()), a)

    def test_identity_permutation(self, rng):
        a = rng.normal(size=(4, 4))
        assert np.array_equal(apply_isomorphism(a, PermutationMap.identity(4)), a)

    def test_against_brute_force(self, rng):
        for _ in range(40):
            n = int(rng.integers(2, 6))
            a = rng.integers(0, 2, size=(n, n)).astype(float)
            b = rng.integers(0, 2, size=(n, n)).astype(float) if rng.random() < 0.5 else \
                apply_isomorphism(a, PermutationMap(tuple(rng.permutation(n)))).real
            assert (find_isomorphism(a, b) is not None) == brute_force_isomorphic(a, b)

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            find_isomorphism(np.eye(13), np.eye(13))


class TestJordanEquivalence:
    def test_counterexample_not_equivalent(self):
        v = is_jordan_equivalent(ISO_A, ISO_B)
        assert v.same_jordan_form and not v.same_subspaces
        assert not v.jordan_equivalent and v.failed_condition == 1

    def test_quoted_eigenvector_matrices(self):
        da = decomposition_from_basis(ISO_VA.to_numpy(), [(1, 1), (2, 1), (2, 1)], ISO_A)
        db = decomposition_from_basis(ISO_VB.to_numpy(), [(1, 1), (2, 1), (2, 1)], ISO_B)
        assert same_span(da.chains[0].vectors, db.chains[0].vectors)
        assert not is_jordan_equivalent(da, db).jordan_equivalent

    def test_chain_graphs(self):
        v = classify(CHAIN_GRAPH, CHAIN_GRAPH_EXTRA)
        assert v.jordan_equivalent and not v.isomorphic
        assert v.relation == "jordan_equivalent"

    def test_different_forms(self):
        v = is_jordan_equivalent(np.diag([1.0, 2.0]), np.diag([1.0, 3.0]))
        assert 2 in v.failed_conditions

    def test_transform_pairs(self, rng):
        for _ in range(10):
            a, _, _ = planted(rng)
            d = jordan_decompose(a)
            b, dx = transform_decomposition(d, BlockDiagonalTransform.random(d, rng))
            assert is_jordan_equivalent(a, b).jordan_equivalent
            assert is_jordan_equivalent(d, dx).method == "span"

    def test_symmetry_and_transitivity(self, rng):
        for _ in range(8):
            a, _, _ = planted(rng, n_max=6)
            d = jordan_decompose(a)
            b = random_jordan_equivalent(d, rng)
            c = random_jordan_equivalent(jordan_decompose(b), rng)
            ab, ba = is_jordan_equivalent(a, b), is_jordan_equivalent(b, a)
            assert ab.jordan_equivalent == ba.jordan_equivalent
            if ab.jordan_equivalent and is_jordan_equivalent(b, c).jordan_equivalent:
                assert is_jordan_equivalent(a, c).jordan_equivalent

    def test_cospectral(self, rng):
        a, _, _ = planted(rng)
        b = random_jordan_equivalent(jordan_decompose(a), rng)
        assert np.allclose(np.sort_complex(np.round(np.poly(a), 6)),
                           np.sort_complex(np.round(np.poly(b), 6)))

    def test_isomorphic_classes(self, rng):
        for _ in range(5):
            a, _, _ = planted(rng, n_max=7, repeat=False)
            t = np.eye(len(a))[rng.permutation(len(a))]
            b = t @ a @ t.T
            a2 = random_jordan_equivalent(jordan_decompose(a), rng)
            assert is_jordan_equivalent(t @ a2 @ t.T, b).jordan_equivalent

    def test_permuted_unicellular(self, rng):
        for _ in range(5):
            n = int(rng.integers(2, 7))
            v = random_basis(rng, n)
            a = v @ jordan_block(0.5, n) @ np.linalg.inv(v)
            t = np.eye(n)[rng.permutation(n)]
            assert is_jordan_equivalent(a, t @ a @ t.T).jordan_equivalent

    def test_gft_identical_over_class(self, rng):
        a, _, _ = planted(rng)
        d = jordan_decompose(a)
        _, dx = transform_decomposition(d, BlockDiagonalTransform.random(d, rng))
        worst = 0.0
        for _ in range(100):
            s = rng.normal(size=d.n) + 1j * rng.normal(size=d.n)
            r, rx = gft(d, s), gft(dx, s)
            worst = max(worst, max(np.abs(x.shat - y.shat).max()
                                   for x, y in zip(r.components, rx.components)))
        assert worst <= 1e-8

    def test_verdict_line(self):
        line = format_verdict(classify(ISO_A, ISO_B))
        assert line.startswith("isomorphic=true perm=")
        assert line.endswith("jordan_equivalent=false failed_condition=1")


class TestGenerators:
    def test_identity_transform(self, rng):
        a, _, _ = planted(rng)
        d = jordan_decompose(a)
        b, _ = transform_decomposition(d, BlockDiagonalTransform.identity(d))
        assert np.array_equal(b, a)

    def test_diagonalizable_unchanged(self, rng):
        a, _, _ = planted(rng, block_max=1, repeat=False)
        assert np.array_equal(random_jordan_equivalent(jordan_decompose(a), rng), a)

    def test_example_single_block_mixing(self, rng):
        d = jordan_decompose(EXAMPLE_A)
        two = next(c for c in d.chains if c.size == 2)
        b, dx = transform_decomposition(d, BlockDiagonalTransform.random(d, rng, {(two.i, two.j)}))
        assert induced_l1_norm(b - EXAMPLE_A.to_numpy()) > 1e-6
        from jordan_gft.gft import projector
        for c in d.chains:
            assert induced_l1_norm(projector(d, c.i, c.j) - projector(dx, c.i, c.j)) <= 1e-8

    def test_condition_cap(self, rng):
        d = jordan_decompose(EXAMPLE_A)
        y = BlockDiagonalTransform.random(d, rng)
        assert all(np.linalg.cond(b) < 1e3 for b in y.blocks)


class TestCanonicalRepresentative:
    def test_upper_triangular_unicellular(self, rng):
        n = 5
        a = np.triu(rng.normal(size=(n, n)), 2) + 0.7 * np.eye(n) + np.diag(1 + rng.random(n - 1), 1)
        j, flag = canonical_representative(jordan_decompose(a))
        assert flag and np.allclose(j, jordan_block(0.7, n))

    def test_unicellular_fixture(self):
        j, flag = canonical_representative(jordan_decompose(UNICELL_B))
        assert flag and np.allclose(j, jordan_block(0, 4))

    def test_binarized_fixture(self):
        d = jordan_decompose(binarize(UNICELL_B))
        assert not d.is_unicellular()
        assert not canonical_representative(d)[1]


class TestStructural:
    def test_jordan_block(self):
        assert structural_membership_check(jordan_block(3, 4)) == JordanForm(((3, 4),))

    def test_two_distinct_blocks(self, rng):
        a1 = np.triu(rng.normal(size=(3, 3)), 1) + 2 * np.eye(3) + np.eye(3, k=1)
        a2 = np.triu(rng.normal(size=(2, 2)), 1) + 5 * np.eye(2) + np.eye(2, k=1)
        a = np.block([[a1, np.zeros((3, 2))], [np.zeros((2, 3)), a2]])
        form = structural_membership_check(a)
        assert form.matches(JordanForm(((2, 3), (5, 2))), 1e-12)
        assert form.matches(jordan_decompose(a).form, 1e-8)

    def test_two_equal_blocks(self):
        b = [0.5, 2.0]
        a1 = toeplitz_extended(b, np.array([[3.0, -1.0], [0.0, 4.0]]))
        a2 = toeplitz_upper(b)
        a = np.block([[a1, np.zeros((4, 2))], [np.zeros((2, 4)), a2]])
        form = structural_membership_check(a)
        assert form.blocks == ((0.5, 4), (0.5, 2))
        d = jordan_decompose(a)
        assert form.matches(d.form, 1e-8)
        assert canonical_representative(d)[1]

    def test_no_pattern(self, rng):
        assert structural_membership_check(rng.normal(size=(4, 4))) is None


class TestDualBasisGraph:
    def test_identity_basis(self):
        a = jordan_block(1, 3)
        assert np.allclose(dual_basis_graph(jordan_decompose(a)), a)

    def test_unicellular(self):
        d = jordan_decompose(UNICELL_B)
        assert is_jordan_equivalent(d, dual_basis_graph(d)).jordan_equivalent

    def test_block_diagonal_basis(self, rng):
        blocks = [(0.0, 3), (2.0, 2)]
        v = np.zeros((5, 5), dtype=complex)
        v[:3, :3] = np.triu(rng.random((3, 3))) + np.eye(3)
        v[3:, 3:] = np.triu(rng.random((2, 2))) + np.eye(2)
        d = decomposition_from_basis(v, blocks)
        with warnings.catch_warnings():
            warnings.simplefilter("error", PreconditionWarning)
            aw = dual_basis_graph(d)
        assert is_jordan_equivalent(d, aw).jordan_equivalent

    def test_warning(self):
        with pytest.warns(PreconditionWarning):
            dual_basis_graph(jordan_decompose(EXAMPLE_A))


class TestInvariantSubspaces:
    def test_self(self):
        assert invariant_subspace_subset_check(UNICELL_B, UNICELL_B)

    def test_unicellular_fixture_vs_block(self):
        assert is_jordan_equivalent(UNICELL_B, jordan_block(0, 4)).jordan_equivalent
        assert not invariant_subspace_subset_check(UNICELL_B, jordan_block(0, 4))

    def test_equal_invariant_spaces_imply_equivalence(self, rng):
        for _ in range(10):
            a, _, _ = planted(rng, n_max=6)
            d = jordan_decompose(a)
            b = random_jordan_equivalent(d, rng)
            if invariant_subspace_subset_check(a, b):
                assert is_jordan_equivalent(a, b).jordan_equivalent

    def test_size_limit(self):
        with pytest.raises(SizeLimitError):
            invariant_subspace_subset_check(np.eye(7), np.eye(7))


def test_is_jordan_subspace():
    j = jordan_block(0, 3)
    assert is_jordan_subspace(j, np.eye(3), 0)
    assert is_jordan_subspace(j, np.eye(3)[:, :1], 0)
    assert not is_jordan_subspace(j, np.eye(3)[:, 1:2], 0)
