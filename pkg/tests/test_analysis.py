import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entswap import analysis, qmath
from entswap.analysis import AnalysisError, DensityMatrix
from entswap.experiments import random_basis
from entswap.measurement import SpinDirection, bell_basis, measure, spin_basis
from entswap.states import BellKind, StateVector, basis_ket, bell_state, eq1_state
from oracles import PAULI, eq1_amplitudes, expectation, partial_trace, spin_op, wootters_direct

R = 1 / math.sqrt(2)
seeds = st.integers(0, 2**32 - 1)


def random_state(rng, n):
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return StateVector.from_unnormalized(v, tuple(range(1, n + 1)))


class TestReducedDensity:
    def test_bell_traces_to_maximally_mixed(self):
        rho = analysis.reduced_density(bell_state(BellKind.PHI_PLUS), (1,))
        np.testing.assert_allclose(rho.matrix, np.eye(2) / 2, atol=1e-15)

    def test_eq1_on_1_4_against_brute_force(self):
        oracle = partial_trace(eq1_amplitudes(), 4, [0, 3])
        np.testing.assert_allclose(oracle, np.eye(4) / 4, atol=1e-15)
        rho = analysis.reduced_density(eq1_state(), (1, 4))
        np.testing.assert_allclose(rho.matrix, oracle, atol=1e-15)

    def test_product_state(self):
        rho = analysis.reduced_density(basis_ket("+-"), (1,))
        np.testing.assert_array_equal(rho.matrix, [[1, 0], [0, 0]])

    def test_unknown_label(self):
        with pytest.raises(AnalysisError):
            analysis.reduced_density(eq1_state(), (5,))

    @settings(max_examples=100)
    @given(seeds)
    def test_matches_brute_force_random(self, seed):
        rng = np.random.default_rng(seed)
        psi = random_state(rng, 4)
        keep = sorted(int(k) + 1 for k in rng.permutation(4)[: rng.integers(1, 4)])
        oracle = partial_trace(psi.amplitudes, 4, [k - 1 for k in keep])
        np.testing.assert_allclose(analysis.reduced_density(psi, keep).matrix, oracle, atol=1e-12)

    def test_density_matrix_partial_trace(self):
        psi = eq1_state()
        full = DensityMatrix.from_state(psi)
        np.testing.assert_allclose(
            analysis.reduced_density_matrix(full, (1, 4)).matrix,
            analysis.reduced_density(psi, (1, 4)).matrix,
            atol=1e-15,
        )

    def test_invalid_density_matrix(self):
        with pytest.raises(AnalysisError):
            DensityMatrix(np.eye(2), (1,))
        with pytest.raises(AnalysisError):
            DensityMatrix(np.diag([1.5, -0.5]), (1,))


class TestMixedFromRecords:
    @pytest.mark.parametrize("basis", [[spin_basis("z", 2), spin_basis("z", 3)], bell_basis((2, 3))])
    def test_both_experiments_average_to_identity(self, basis):
        rho = analysis.mixed_from_records(measure(eq1_state(), basis), (1, 4))
        np.testing.assert_allclose(rho.matrix, np.eye(4) / 4, atol=1e-15)

    def test_single_certain_record(self):
        psi = basis_ket("+-")
        records = measure(psi, spin_basis("z", 1))
        rho = analysis.mixed_from_records(records, (2,))
        np.testing.assert_array_equal(rho.matrix, analysis.reduced_density(psi, (2,)).matrix)

    def test_empty(self):
        with pytest.raises(AnalysisError):
            analysis.mixed_from_records([], (1,))


class TestSchmidt:
    def test_product_ket(self):
        sd = analysis.schmidt(basis_ket("--", (1, 4)), ((1,), (4,)))
        np.testing.assert_allclose(sd.coefficients, [1, 0])
        assert sd.rank == 1

    def test_bell(self):
        sd = analysis.schmidt(bell_state(BellKind.PSI_PLUS, (1, 4)), ((1,), (4,)))
        np.testing.assert_allclose(sd.coefficients, [R, R], atol=1e-15)

    def test_eq1_across_pairs(self):
        sd = analysis.schmidt(eq1_state(), ((1, 2), (3, 4)))
        np.testing.assert_allclose(sd.coefficients, [1, 0, 0, 0], atol=1e-15)

    def test_eq1_across_1_4_vs_2_3(self):
        sd = analysis.schmidt(eq1_state(), ((1, 4), (2, 3)))
        np.testing.assert_allclose(sd.coefficients, [0.5] * 4, atol=1e-14)

    def test_invalid_bipartition(self):
        with pytest.raises(AnalysisError):
            analysis.schmidt(eq1_state(), ((1,), (4,)))

    def test_reconstructs_state(self):
        psi = eq1_state()
        sd = analysis.schmidt(psi, ((1, 3), (2, 4)))
        m = (sd.left_vectors * sd.coefficients) @ sd.right_vectors.T
        rebuilt = np.transpose(m.reshape(2, 2, 2, 2), (0, 2, 1, 3)).reshape(-1)
        np.testing.assert_allclose(rebuilt, psi.amplitudes, atol=1e-14)


class TestEntropy:
    def test_examples(self):
        def sd(c):
            return analysis.SchmidtDecomposition(np.array(c), None, None, ((1,), (2,)))

        assert analysis.entanglement_entropy(sd([1.0])) == 0
        assert math.isclose(analysis.entanglement_entropy(sd([R, R])), 1.0)
        expected = -(0.9 * math.log2(0.9) + 0.1 * math.log2(0.1))
        assert math.isclose(expected, 0.4689955935892812)
        assert math.isclose(analysis.entanglement_entropy(sd([math.sqrt(0.9), math.sqrt(0.1)])), expected)


class TestConcurrence:
    def test_pure_examples(self):
        for bits in ("++", "+-", "-+", "--"):
            assert analysis.pure_concurrence(basis_ket(bits)) == 0
        for kind in BellKind:
            assert math.isclose(analysis.pure_concurrence(bell_state(kind)), 1.0, abs_tol=1e-15)
        state = StateVector(np.array([math.sqrt(0.9), 0, 0, math.sqrt(0.1)]), (1, 2))
        assert math.isclose(analysis.pure_concurrence(state), 0.6)

    def test_pure_wrong_size(self):
        with pytest.raises(AnalysisError):
            analysis.pure_concurrence(eq1_state())

    def test_mixed_examples(self):
        assert analysis.mixed_concurrence(DensityMatrix(np.eye(4) / 4, (1, 4))) == 0
        for kind in BellKind:
            rho = DensityMatrix.from_state(bell_state(kind))
            assert math.isclose(analysis.mixed_concurrence(rho), 1.0, abs_tol=1e-9)
        assert analysis.mixed_concurrence(DensityMatrix.from_state(basis_ket("+-"))) < 1e-9

    @settings(max_examples=200)
    @given(seeds)
    def test_mixed_equals_pure_on_pure_states(self, seed):
        psi = random_state(np.random.default_rng(seed), 2)
        rho = DensityMatrix.from_state(psi)
        assert abs(analysis.mixed_concurrence(rho) - analysis.pure_concurrence(psi)) < 1e-9

    @settings(max_examples=200)
    @given(seeds)
    def test_mixed_against_direct_wootters(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        rho = x @ x.conj().T
        rho /= np.trace(rho)
        assert abs(analysis.mixed_concurrence(DensityMatrix(rho, (1, 2))) - wootters_direct(rho)) < 1e-7

    @settings(max_examples=200)
    @given(seeds)
    def test_zero_iff_product(self, seed):
        rng = np.random.default_rng(seed)
        if rng.random() < 0.5:
            a, b = random_state(rng, 1), random_state(rng, 1)
            psi = StateVector(np.kron(a.amplitudes, b.amplitudes), (1, 2))
        else:
            psi = random_state(rng, 2)
        is_prod = analysis.is_product(psi, ((1,), (2,)), 1e-9)
        assert is_prod == (analysis.pure_concurrence(psi) < 1e-9)


class TestCorrelator:
    def test_experiment_1_outcome(self):
        psi = basis_ket("--", (1, 4))
        assert analysis.correlator(psi, (1, "z"), (4, "z")) == 1
        assert analysis.correlator(psi, (1, "x"), (4, "x")) == 0
        assert analysis.correlator(psi, (1, "y"), (4, "y")) == 0

    def test_experiment_2_outcome(self):
        psi = bell_state(BellKind.PSI_PLUS, (1, 4))
        oracle = {a: expectation(psi.amplitudes, 2, 0, PAULI[a], 1, PAULI[a]) for a in "xyz"}
        assert oracle == pytest.approx({"x": 1, "y": 1, "z": -1}, abs=1e-12)
        for a, v in oracle.items():
            assert math.isclose(analysis.correlator(psi, (1, a), (4, a)), v, abs_tol=1e-12)

    @settings(max_examples=200)
    @given(seeds)
    def test_singlet_is_minus_dot_product(self, seed):
        rng = np.random.default_rng(seed)
        a, b = rng.standard_normal(3), rng.standard_normal(3)
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        psi = bell_state(BellKind.PSI_MINUS)
        brute = expectation(psi.amplitudes, 2, 0, spin_op(a), 1, spin_op(b))
        assert math.isclose(brute, -float(a @ b), abs_tol=1e-12)
        assert math.isclose(analysis.correlator(psi, (1, a), (2, b)), brute, abs_tol=1e-12)

    @settings(max_examples=100)
    @given(seeds)
    def test_state_and_density_paths_agree(self, seed):
        rng = np.random.default_rng(seed)
        psi = random_state(rng, 3)
        a, b = SpinDirection.normalized(*rng.standard_normal(3)), SpinDirection.normalized(*rng.standard_normal(3))
        direct = analysis.correlator(psi, (3, a), (1, b))
        via_rho = analysis.correlator(DensityMatrix.from_state(psi), (3, a), (1, b))
        brute = expectation(psi.amplitudes, 3, 2, spin_op(a.as_array()), 0, spin_op(b.as_array()))
        assert math.isclose(direct, brute, abs_tol=1e-12)
        assert math.isclose(via_rho, brute, abs_tol=1e-12)

    @settings(max_examples=100)
    @given(seeds)
    def test_bilinear_in_directions(self, seed):
        rng = np.random.default_rng(seed)
        psi = random_state(rng, 2)
        a, b = rng.standard_normal(3), rng.standard_normal(3)
        b /= np.linalg.norm(b)
        pauli_sum = sum(
            a[i] * analysis.correlator(psi, (1, axis), (2, b)) for i, axis in enumerate("xyz")
        )
        norm = np.linalg.norm(a)
        assert math.isclose(norm * analysis.correlator(psi, (1, a / norm), (2, b)), pauli_sum, abs_tol=1e-10)

    def test_same_particle_rejected(self):
        with pytest.raises(AnalysisError):
            analysis.correlator(eq1_state(), (1, "z"), (1, "z"))


class TestIsProduct:
    def test_experiment_states(self):
        for bits in ("--", "-+", "+-", "++"):
            assert analysis.is_product(basis_ket(bits, (1, 4)), ((1,), (4,)), 1e-9)
        for kind in BellKind:
            assert not analysis.is_product(bell_state(kind, (1, 4)), ((1,), (4,)), 1e-9)
        assert analysis.is_product(eq1_state(), ((1, 2), (3, 4)), 1e-9)


@settings(max_examples=1000, deadline=None)
@given(seeds, st.integers(2, 4))
def test_partial_trace_schmidt_consistency(seed, n):
    """Nonzero spectra of both reduced states equal the squared Schmidt coefficients."""
    rng = np.random.default_rng(seed)
    psi = random_state(rng, n)
    perm = [int(p) + 1 for p in rng.permutation(n)]
    cut = int(rng.integers(1, n))
    a, b = tuple(sorted(perm[:cut])), tuple(sorted(perm[cut:]))
    sd = analysis.schmidt(psi, (a, b))
    squares = np.sort(sd.coefficients**2)[::-1]
    for side in (a, b):
        w = np.sort(analysis.reduced_density(psi, side).eigenvalues())[::-1]
        k = len(squares)
        np.testing.assert_allclose(w[:k], squares, atol=1e-9)
        assert np.all(np.abs(w[k:]) < 1e-9)
    ea = analysis.von_neumann_entropy(analysis.reduced_density(psi, a))
    eb = analysis.von_neumann_entropy(analysis.reduced_density(psi, b))
    assert math.isclose(ea, eb, abs_tol=1e-8)
    assert math.isclose(ea, analysis.entanglement_entropy(sd), abs_tol=1e-8)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_no_signaling_any_basis(seed):
    rng = np.random.default_rng(seed)
    records = measure(eq1_state(), random_basis((2, 3), rng))
    rho = analysis.mixed_from_records(records, (1, 4))
    assert rho.distance(analysis.reduced_density(eq1_state(), (1, 4))) < 1e-9


def test_heralded_state_of_entangled_cut_is_none():
    assert analysis.heralded_state(eq1_state(), (1, 3)) is None


def test_purity():
    assert math.isclose(DensityMatrix.from_state(bell_state(BellKind.PHI_PLUS)).purity(), 1.0)
    assert math.isclose(analysis.reduced_density(eq1_state(), (1, 4)).purity(), 0.25)
    np.testing.assert_allclose(qmath.eigh(np.eye(2) / 2)[0], [0.5, 0.5])
