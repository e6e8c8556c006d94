"""Single-shot transition probabilities, work and bounds for thermal
operations on finite-dimensional systems."""

from .catalytic import (
    AlphaGrid,
    HermitianEig,
    free_coherence,
    free_energy_alpha,
    heralded_bound_cto,
    heralded_coherence_bound,
    hermitian_eig,
    renyi_divergence,
)
from .curvekit import Curve, build_curve, elbow_sets, l_at, thermo_majorizes, v_at
from .errors import NumericalFailure, ThermofluxError
from .loccent import PureBipartite, entanglement_of_transition, schmidt_spectrum
from .oracle import LpProblem, LpSolution, oracle_feasible, oracle_pstar, simplex_solve
from .statekit import (
    DensityMatrix,
    State,
    System,
    beta_order,
    decohere,
    gibbs_state,
    partition_function,
    sharp_state,
    tensor,
    validate_state,
)
from .transition import Protocol, build_protocol, max_transition_probability, measurement_unitary
from .workkit import (
    WorkValue,
    jarzynski_upper_check,
    nonuniformity_of_formation,
    pstar_bounds,
    pstar_with_work,
    qubit_tradeoff_closed_form,
    work_of_transition,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
