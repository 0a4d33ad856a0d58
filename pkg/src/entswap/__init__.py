"""Exact state-vector simulation of entanglement swapping on two singlets.

The package builds the four-particle state of two independent singlet
pairs, measures particles 2 and 3 either spin-by-spin or in the Bell basis,
and checks what is left on particles 1 and 4: which state is heralded, how
entangled it is, how its spins correlate, and that the outcome-averaged
state of 1 and 4 never depends on the choice of measurement.
"""
from .analysis import (
    DensityMatrix,
    SchmidtDecomposition,
    correlator,
    entanglement_entropy,
    is_product,
    mixed_concurrence,
    mixed_from_records,
    pure_concurrence,
    reduced_density,
    schmidt,
)
from .experiments import (
    ExperimentReport,
    MonteCarloReport,
    bell_decompose_eq1,
    correspondence_check,
    monte_carlo,
    no_signaling_report,
    no_signaling_sweep,
    run_experiment_1,
    run_experiment_2,
)
from .measurement import (
    MeasurementBasis,
    OutcomeRecord,
    SpinDirection,
    bell_basis,
    measure,
    product_basis,
    sample,
    spin_basis,
)
from .states import (
    BellKind,
    StateVector,
    basis_ket,
    bell_state,
    eq1_state,
    equal_up_to_global_phase,
    singlet,
)

__version__ = "0.1.0"
