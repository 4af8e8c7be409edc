"""Entanglement bounds from coherence for pure-dephasing open-system dynamics."""

from ._validation import ValidationError
from .bounds import (
    BoundEvaluator,
    BoundReport,
    Tolerances,
    evaluate_instance,
    lower_bound_general,
    lower_bound_qubit,
    neg_cond_entropy_bound,
    upper_bound,
)
from .dynamics import DephasingModel, Instance, conditional_unitaries, env_ensemble, evolve, random_instance, total_hamiltonian
from .info import (
    EnvEnsemble,
    Povm,
    binary_entropy,
    coherence_rel_entropy,
    conditional_entropy,
    dephase,
    fidelity,
    holevo_chi,
    quantum_mutual_info,
    relative_entropy,
    shannon_entropy,
    von_neumann_entropy,
)
from .linalg import DensityMatrix, SpectralDecomposition, herm_eig, mat_func, partial_trace, partial_transpose, tensor
from .povm import PovmOptimizer, PovmSearchConfig, mutual_info_classical, optimize_povm, two_state_info_bound
from .ree import SeparableAnsatz, SeparableBracket, is_ppt, ree_lower_bracket, ree_upper_bracket
from .special import digamma, hurwitz_zeta, polygamma
from .spinboson import (
    DiscreteBath,
    SpinBosonBound,
    SpinBosonParams,
    analytic_fidelity,
    bound_curve,
    detect_peak,
    ln_b_thermal,
    ln_b_vacuum,
    ohmic_density,
    oracle_fidelity,
    sample_bath,
)

__version__ = "0.1.0"
