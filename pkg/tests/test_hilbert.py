import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from mollowcav.hilbert import (DROP_TOL, DensityOperator, InvalidStateError, LayoutError,
                               Operator, SpaceLayout, annihilation, basis_state, embed,
                               expectation, identity, maximally_mixed, number, transition)

SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])


def atom_mode(n_max=2):
    return SpaceLayout([("atom", 2), ("mode", n_max + 1)])


class TestSpaceLayout:
    def test_total_dim_is_product(self):
        lay = SpaceLayout([("atom", 2), ("red", 4), ("blue", 4)])
        assert lay.total_dim == 32
        assert lay.labels == ("atom", "red", "blue")
        assert lay.dim("red") == 4

    def test_duplicate_labels_rejected(self):
        with pytest.raises(LayoutError):
            SpaceLayout([("a", 2), ("a", 3)])

    def test_nonpositive_dim_rejected(self):
        with pytest.raises((LayoutError, ValueError)):
            SpaceLayout([("a", 0)])

    def test_unknown_label(self):
        with pytest.raises(LayoutError):
            atom_mode().index("cavity")


class TestAnnihilation:
    def test_n_max_1(self):
        a = annihilation(1).toarray()
        np.testing.assert_array_equal(a, [[0, 1], [0, 0]])

    def test_n_max_2(self):
        a = annihilation(2).toarray()
        expected = np.zeros((3, 3))
        expected[0, 1] = 1.0
        expected[1, 2] = np.sqrt(2.0)
        np.testing.assert_array_equal(a, expected)

    def test_number_operator(self):
        np.testing.assert_allclose(number(3).toarray(), np.diag([0, 1, 2, 3]), atol=1e-15)

    def test_zero_truncation_rejected(self):
        with pytest.raises(ValueError):
            annihilation(0)

    @given(st.integers(min_value=1, max_value=12))
    def test_commutator_below_truncation(self, n_max):
        a = annihilation(n_max)
        comm = (a @ a.dag() - a.dag() @ a).toarray()
        # truncation only spoils the top Fock row/column
        np.testing.assert_allclose(comm[:n_max, :n_max], np.eye(n_max), atol=1e-14)


class TestTransition:
    def test_raising_squares_to_zero(self):
        lay = SpaceLayout.single("atom", 2)
        sp_ = transition(lay, "atom", 0, 1)
        assert (sp_ @ sp_).nnz == 0

    def test_pauli_anticommutator(self):
        lay = SpaceLayout.single("atom", 2)
        up, down = transition(lay, "atom", 0, 1), transition(lay, "atom", 1, 0)
        assert (up @ down + down @ up).allclose(identity(lay))

    def test_embedded_dimension(self):
        n_max = 3
        op = transition(atom_mode(n_max), "atom", 0, 1)
        assert op.shape == (2 * (n_max + 1),) * 2

    def test_acts_as_ket_bra(self):
        lay = SpaceLayout.single("atom", 3)
        m = transition(lay, "atom", 2, 0).toarray()
        assert m[0, 2] == 1 and np.count_nonzero(m) == 1

    def test_bad_label_and_index(self):
        lay = atom_mode()
        with pytest.raises(LayoutError):
            transition(lay, "nope", 0, 1)
        with pytest.raises(IndexError):
            transition(lay, "atom", 0, 2)


class TestEmbed:
    def test_identity(self):
        lay = SpaceLayout([("a", 2), ("b", 3), ("c", 2)])
        assert embed(np.eye(3), lay, "b").allclose(identity(lay))

    def test_disjoint_supports_commute(self, rng):
        lay = SpaceLayout([("a", 2), ("b", 3)])
        A = embed(rng.normal(size=(2, 2)), lay, "a")
        B = embed(rng.normal(size=(3, 3)), lay, "b")
        assert (A @ B - B @ A).allclose(Operator(lay, sp.csr_matrix((6, 6))), atol=1e-13)

    def test_matches_dense_kron(self):
        # dense oracle: numpy kron with explicit identities, dims <= 8
        for dims, label in (((2, 4), "mode"), ((2, 2, 2), "b"), ((4, 2), "a")):
            labels = ["a", "b", "c"][:len(dims)] if label != "mode" else ["atom", "mode"]
            lay = SpaceLayout(list(zip(labels, dims)))
            k = lay.index(label)
            a = annihilation(dims[k] - 1).toarray()
            factors_a = [a if i == k else np.eye(d) for i, d in enumerate(dims)]
            factors_ad = [a.conj().T if i == k else np.eye(d) for i, d in enumerate(dims)]
            dense = np.eye(1)
            dense_d = np.eye(1)
            for fa, fd in zip(factors_a, factors_ad):
                dense = np.kron(dense, fa)
                dense_d = np.kron(dense_d, fd)
            got = (embed(a, lay, label) @ embed(a.conj().T, lay, label)).toarray()
            np.testing.assert_array_equal(got, dense @ dense_d)

    def test_dimension_mismatch(self):
        with pytest.raises(LayoutError):
            embed(np.eye(3), atom_mode(), "atom")

    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1))
    def test_respects_products(self, seed):
        rng = np.random.default_rng(seed)
        lay = SpaceLayout([("a", 2), ("b", 3)])
        A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        lhs = embed(A @ B, lay, "b")
        rhs = embed(A, lay, "b") @ embed(B, lay, "b")
        assert lhs.allclose(rhs, atol=1e-12)


class TestOperator:
    @settings(max_examples=30)
    @given(st.integers(0, 2**32 - 1))
    def test_adjoint_involution(self, seed):
        rng = np.random.default_rng(seed)
        lay = SpaceLayout.single("x", 5)
        m = sp.random(5, 5, density=0.4, random_state=rng) * (1 + 2j)
        op = Operator(lay, m)
        assert (op.dag().dag().data != op.data).nnz == 0

    def test_drop_tolerance(self):
        lay = SpaceLayout.single("x", 2)
        op = Operator(lay, np.array([[1.0, 0.5 * DROP_TOL], [0.0, 2.0]]))
        assert op.nnz == 2

    def test_shape_mismatch(self):
        with pytest.raises(LayoutError):
            Operator(SpaceLayout.single("x", 2), np.eye(3))

    def test_layout_mismatch_in_algebra(self):
        a = identity(SpaceLayout.single("x", 2))
        b = identity(SpaceLayout.single("y", 2))
        with pytest.raises(LayoutError):
            a + b

    def test_hermiticity(self):
        lay = SpaceLayout.single("x", 2)
        assert Operator(lay, [[1, 1j], [-1j, 0]]).is_hermitian()
        assert not Operator(lay, SIGMA_MINUS).is_hermitian()


class TestExpectation:
    def test_identity_has_unit_expectation(self, rng):
        lay = atom_mode()
        a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        rho = a @ a.conj().T
        rho = DensityOperator(lay, rho / np.trace(rho)).check()
        assert expectation(rho, identity(lay)) == pytest.approx(1.0, abs=1e-14)

    def test_vacuum_photon_number(self):
        lay = atom_mode()
        n = embed(number(2), lay, "mode")
        assert expectation(basis_state(lay, [1, 0]), n) == 0

    def test_maximally_mixed_excitation(self):
        lay = SpaceLayout.single("atom", 2)
        up = transition(lay, "atom", 0, 1)
        assert expectation(maximally_mixed(lay), up @ up.dag()) == pytest.approx(0.5)

    def test_imaginary_part_kept(self):
        lay = SpaceLayout.single("x", 2)
        rho = DensityOperator(lay, [[0.5, 0.5j], [-0.5j, 0.5]])
        val = expectation(rho, Operator(lay, SIGMA_MINUS))
        assert val.imag == pytest.approx(-0.5)

    def test_layout_mismatch(self):
        with pytest.raises(LayoutError):
            expectation(maximally_mixed(SpaceLayout.single("x", 2)),
                        identity(SpaceLayout.single("y", 2)))


class TestDensityOperator:
    def test_invariant_violations(self):
        lay = SpaceLayout.single("x", 2)
        with pytest.raises(InvalidStateError, match="Hermitian"):
            DensityOperator(lay, [[0.5, 0.1], [0.0, 0.5]]).check()
        with pytest.raises(InvalidStateError, match="trace"):
            DensityOperator(lay, [[0.6, 0.0], [0.0, 0.5]]).check()
        with pytest.raises(InvalidStateError, match="eigenvalue"):
            DensityOperator(lay, [[1.1, 0.0], [0.0, -0.1]]).check()

    def test_immutable(self):
        rho = maximally_mixed(SpaceLayout.single("x", 2))
        with pytest.raises(ValueError):
            rho.matrix[0, 0] = 1.0
