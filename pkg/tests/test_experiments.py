import math

import numpy as np
import pytest

from entswap import analysis, experiments
from entswap.experiments import (
    bell_decompose_eq1,
    correspondence_check,
    monte_carlo,
    no_signaling_report,
    no_signaling_sweep,
    run_experiment_1,
    run_experiment_2,
    swap_rows,
)
from entswap.states import BellKind, bell_state, equal_up_to_global_phase
from oracles import BELL, PAULI, bell_decomposition, expectation

QUARTER = np.eye(4) / 4


def oracle_correlators(name):
    """E(a,a) on 1,4 for the named Bell state, via full Kronecker products."""
    amps = np.zeros(4, dtype=complex)
    for (b1, b4), a in BELL[name].items():
        amps[2 * b1 + b4] = a
    return {a + a: expectation(amps, 2, 0, PAULI[a], 1, PAULI[a]) for a in "zxy"}


class TestExperiment1:
    def test_rows(self):
        rep = run_experiment_1()
        assert [r.outcome for r in rep.rows] == ["+₂+₃", "+₂−₃", "−₂+₃", "−₂−₃"]
        assert [r.heralded_label for r in rep.rows] == ["|−−⟩₁₄", "|−+⟩₁₄", "|+−⟩₁₄", "|++⟩₁₄"]
        for r in rep.rows:
            assert abs(r.probability - 0.25) < 1e-10
            assert abs(r.entropy_bits) < 1e-10 and abs(r.concurrence) < 1e-10
            assert abs(r.correlators["xx"]) < 1e-10 and abs(r.correlators["yy"]) < 1e-10
        assert [round(r.correlators["zz"]) for r in rep.rows] == [1, -1, -1, 1]

    def test_probabilities_sum_to_one(self):
        assert abs(sum(run_experiment_1().probabilities) - 1) < 1e-10

    def test_summary(self):
        s = run_experiment_1().summary
        np.testing.assert_allclose(s.rho_avg.matrix, QUARTER, atol=1e-12)
        assert s.frobenius_to_premeasurement < 1e-10
        assert s.mixed_concurrence < 1e-9

    def test_correspondence(self):
        ok, witness = correspondence_check(run_experiment_1())
        assert ok and len(witness) == 4 and all(w.matches for w in witness)


class TestExperiment2:
    def test_rows(self):
        rep = run_experiment_2()
        assert [r.outcome for r in rep.rows] == ["Ψ+₂₃", "Ψ−₂₃", "Φ+₂₃", "Φ−₂₃"]
        for r, kind in zip(rep.rows, BellKind):
            assert abs(r.probability - 0.25) < 1e-10
            assert r.heralded_label == kind.label + "₁₄"
            assert equal_up_to_global_phase(r.heralded, bell_state(kind, (1, 4)))
            assert abs(r.entropy_bits - 1) < 1e-10 and abs(r.concurrence - 1) < 1e-10

    def test_correlator_signs_match_oracle(self):
        expected = {
            "Ψ+": {"zz": -1, "xx": 1, "yy": 1},
            "Ψ−": {"zz": -1, "xx": -1, "yy": -1},
            "Φ+": {"zz": 1, "xx": 1, "yy": -1},
            "Φ−": {"zz": 1, "xx": -1, "yy": 1},
        }
        for name, values in expected.items():
            assert oracle_correlators(name) == pytest.approx(values, abs=1e-12)
        for r, kind in zip(run_experiment_2().rows, BellKind):
            assert r.correlators == pytest.approx(expected[kind.label], abs=1e-10)

    def test_correspondence(self):
        ok, witness = correspondence_check(run_experiment_2())
        assert ok
        assert [w.expected for w in witness] == ["Ψ+₁₄", "Ψ−₁₄", "Φ+₁₄", "Φ−₁₄"]

    def test_run_experiment_dispatch(self):
        assert [r.outcome for r in experiments.run_experiment(2).rows] == [r.outcome for r in run_experiment_2().rows]
        with pytest.raises(ValueError):
            experiments.run_experiment(3)


@pytest.mark.parametrize("runner", [run_experiment_1, run_experiment_2])
@pytest.mark.parametrize("i, j", [(0, 1), (1, 3), (0, 3)])
def test_swapped_rows_fail_correspondence(runner, i, j):
    ok, witness = correspondence_check(swap_rows(runner(), i, j))
    assert not ok
    assert not witness[i].matches and not witness[j].matches


@pytest.mark.parametrize("experiment", [1, 2])
def test_heralding_consistency(experiment):
    for rec, row in zip(experiments.experiment_records(experiment), experiments.run_experiment(experiment).rows):
        rho = analysis.reduced_density(rec.post_state, (1, 4))
        assert rho.distance(analysis.DensityMatrix.from_state(row.heralded)) < 1e-10


class TestBellDecomposition:
    def test_terms(self):
        terms = bell_decompose_eq1()
        assert len(terms) == 4
        assert all(t.kind_23 is t.kind_14 for t in terms)
        assert all(abs(abs(t.coefficient) - 0.5) < 1e-10 for t in terms)

    def test_signs_against_brute_force(self):
        oracle = bell_decomposition()
        nonzero = {k: v for k, v in oracle.items() if abs(v) > 1e-12}
        assert set(nonzero) == {(n, n) for n in BELL}
        signs = {k[0]: round(v.real * 2) for k, v in nonzero.items()}
        assert signs == {"Ψ+": 1, "Ψ−": -1, "Φ+": -1, "Φ−": 1}
        for t in bell_decompose_eq1():
            key = (t.kind_23.label, t.kind_14.label)
            assert abs(t.coefficient - oracle[key]) < 1e-12

    def test_reconstructs_state(self):
        from entswap.states import eq1_state

        total = np.zeros(16, dtype=complex)
        for t in bell_decompose_eq1():
            comp = bell_state(t.kind_23, (2, 3)).kron(bell_state(t.kind_14, (1, 4))).sorted()
            total += t.coefficient * comp.amplitudes
        np.testing.assert_allclose(total, eq1_state().amplitudes, atol=1e-12)


class TestNoSignaling:
    def test_report(self):
        rep = no_signaling_report()
        for rho in (rep.before, rep.after_1, rep.after_2):
            np.testing.assert_allclose(rho.matrix, QUARTER, atol=1e-12)
        assert set(rep.distances) == {"before_exp1", "before_exp2", "exp1_exp2"}
        assert all(d < 1e-10 for d in rep.distances.values())
        assert all(d < 1e-10 for d in rep.to_maximally_mixed.values())
        assert all(c < 1e-9 for c in rep.mixed_concurrence.values())

    def test_sweep(self):
        rows = no_signaling_sweep(100)
        assert len(rows) == 100
        assert max(r.distance_to_before for r in rows) < 1e-9

    def test_sweep_deterministic(self):
        assert no_signaling_sweep(5, seed=7) == no_signaling_sweep(5, seed=7)

    def test_random_basis_is_unitary(self):
        b = experiments.random_basis((2, 3), np.random.default_rng(1))
        np.testing.assert_allclose(b.vectors.conj() @ b.vectors.T, np.eye(4), atol=1e-12)


def test_contrast():
    assert all(abs(r.entropy_bits) < 1e-10 for r in run_experiment_1().rows)
    assert all(abs(r.entropy_bits - 1) < 1e-10 for r in run_experiment_2().rows)
    assert all(d < 1e-10 for d in no_signaling_report().distances.values())


class TestMonteCarlo:
    def test_single_trial(self):
        rep = monte_carlo(2, 1)
        assert sum(r.count for r in rep.rows) == 1
        assert sorted(r.count for r in rep.rows) == [0, 0, 0, 1]

    def test_counts_sum_to_trials(self):
        rep = monte_carlo(1, 1000, seed=3)
        assert sum(r.count for r in rep.rows) == 1000
        assert math.isclose(sum(r.frequency for r in rep.rows), 1.0)

    def test_deterministic(self):
        assert monte_carlo(2, 500, seed=11) == monte_carlo(2, 500, seed=11)
        assert monte_carlo(2, 500, seed=11) != monte_carlo(2, 500, seed=12)

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            monte_carlo(1, 0)

    def test_golden_first_trials(self):
        rep = monte_carlo(2, 12, seed=0x5EED)
        # trial indices per outcome follow the independent-stream golden sequence
        assert [r.count for r in rep.rows] == [1, 3, 3, 5]
