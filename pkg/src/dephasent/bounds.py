"""Coherence-based lower and upper bounds on generated entanglement, with a chain checker."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import ValidationError, check_density_matrix
from .dynamics import DephasingModel, Instance, env_ensemble, evolve
from .info import (
    EnvEnsemble,
    Povm,
    coherence_rel_entropy,
    conditional_entropy,
    dephase,
    fidelity,
    holevo_chi,
    quantum_mutual_info,
    shannon_entropy,
    von_neumann_entropy,
)
from .linalg import partial_trace
from .povm import PovmOptimizer, eigenbasis_povm
from .ree import SeparableBracket

__all__ = [
    "Tolerances",
    "BoundReport",
    "REPORT_COLUMNS",
    "POVM_STRATEGIES",
    "lower_bound_general",
    "lower_bound_qubit",
    "upper_bound",
    "neg_cond_entropy_bound",
    "evaluate_instance",
    "BoundEvaluator",
]

POVM_STRATEGIES = ("fixed", "eigenbasis", "optimize")


@dataclass(frozen=True)
class Tolerances:
    analytic: float = 1e-9
    optimizer: float = 1e-6
    bracket: float = 1e-3
    separable: float = 1e-4
    purity: float = 1e-9

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not (v >= 0 and math.isfinite(v)):
                raise ValidationError(f"tolerance {k} must be a finite nonnegative number")


def _probs_match(rho_s, e, tol=1e-10):
    diag = np.real(np.diag(rho_s))
    if diag.size != len(e) or np.max(np.abs(diag - e.probs)) > tol:
        raise ValidationError("ensemble probabilities do not match the pointer populations of rho_S")


def lower_bound_general(rho_s, e: EnvEnsemble, m: Povm) -> float:
    """``C_r(rho_S) - H(I|M)``; negative values are returned as they are."""
    rho_s = check_density_matrix(rho_s, "rho_S")
    _probs_match(rho_s, e)
    return coherence_rel_entropy(rho_s) - conditional_entropy(e, m)


def lower_bound_qubit(rho_s, rho0, rho1) -> float:
    """``C_r(rho_S) - 2 sqrt(p(1-p)) B(rho_0, rho_1)`` with ``p = <0|rho_S|0>``."""
    rho_s = check_density_matrix(rho_s, "rho_S")
    if rho_s.shape[0] != 2:
        raise ValidationError(f"the qubit bound needs a two-dimensional system, got {rho_s.shape[0]}")
    p = float(np.clip(np.real(rho_s[0, 0]), 0.0, 1.0))
    return coherence_rel_entropy(rho_s) - 2.0 * math.sqrt(p * (1.0 - p)) * fidelity(rho0, rho1)


def upper_bound(rho_s, sigma_s) -> float:
    """``C_r(rho_S) - C_r(sigma_S) + H(I)`` where ``H(I) = S(Delta(rho_S))``."""
    rho_s = check_density_matrix(rho_s, "rho_S")
    sigma_s = check_density_matrix(sigma_s, "sigma_S")
    if rho_s.shape != sigma_s.shape:
        raise ValidationError(f"dimension mismatch: {rho_s.shape} vs {sigma_s.shape}")
    h_i = von_neumann_entropy(dephase(rho_s))
    return coherence_rel_entropy(rho_s) - coherence_rel_entropy(sigma_s) + h_i


def neg_cond_entropy_bound(sigma, dims=None) -> float:
    """``max{S(sigma_S) - S(sigma), S(sigma_E) - S(sigma)}``; may be negative."""
    dims = getattr(sigma, "dims", None) if dims is None else dims
    if dims is None or len(dims) != 2:
        raise ValidationError("two subsystem dimensions are required")
    s = von_neumann_entropy(sigma)
    return max(von_neumann_entropy(partial_trace(sigma, 0, dims)), von_neumann_entropy(partial_trace(sigma, 1, dims))) - s


REPORT_COLUMNS = (
    "t",
    "d_S",
    "d_E",
    "povm_strategy",
    "C_r_initial",
    "C_r_final",
    "H_I",
    "H_I_given_M",
    "fidelity_B",
    "lower_general",
    "lower_qubit",
    "lower_clamped",
    "neg_cond_entropy",
    "mutual_info",
    "upper",
    "ree_bracket_low",
    "ree_bracket_high",
    "S_S",
    "S_E",
    "S_SE",
    "holevo_chi",
    "chain_1",
    "chain_2",
    "chain_3",
    "chain_4",
    "chain_5",
    "chain_6",
)


@dataclass
class BoundReport:
    """Everything computed for one instance at one time.

    ``fidelity_B`` and ``lower_qubit`` are ``None`` unless ``d_S == 2``; the ree
    brackets are ``None`` when bracketing was skipped. ``chain_ok[k]`` is the
    verdict for chain inequality ``k + 1`` or ``None`` when it does not apply.
    """

    t: float
    d_S: int
    d_E: int
    povm_strategy: str
    C_r_initial: float
    C_r_final: float
    H_I: float
    H_I_given_M: float
    fidelity_B: float | None
    lower_general: float
    lower_qubit: float | None
    lower_clamped: float
    neg_cond_entropy: float
    mutual_info: float
    upper: float
    ree_bracket_low: float | None
    ree_bracket_high: float | None
    S_S: float
    S_E: float
    S_SE: float
    holevo_chi: float
    chain_ok: list = field(default_factory=lambda: [None] * 6)

    @property
    def all_ok(self) -> bool:
        return all(c is not False for c in self.chain_ok)

    def to_dict(self) -> dict:
        return asdict(self)

    def row(self) -> list:
        d = self.to_dict()
        flat = [d[c] for c in REPORT_COLUMNS[:-6]]
        return flat + list(self.chain_ok)


def _chain(rep: BoundReport, pure: bool, diagonal: bool, optimized: bool, tol: Tolerances):
    a = tol.analytic
    ok = [None] * 6
    ok[0] = rep.lower_general <= rep.S_E - rep.S_SE + a
    if rep.lower_qubit is not None and optimized:
        ok[1] = rep.lower_qubit <= rep.lower_general + tol.optimizer
    ok[2] = rep.neg_cond_entropy <= rep.mutual_info + a
    ok[3] = rep.mutual_info <= rep.upper + a
    if pure:
        lows = [rep.lower_general] + ([rep.lower_qubit] if rep.lower_qubit is not None else [])
        ok[4] = all(x <= rep.S_S + a for x in lows) and rep.S_S <= rep.upper + a
    if diagonal:
        ok[5] = rep.lower_clamped <= a and (rep.ree_bracket_high is None or rep.ree_bracket_high <= tol.separable)
    return [None if v is None else bool(v) for v in ok]


def evaluate_instance(
    model: DephasingModel,
    rho_s,
    rho_e,
    t: float,
    povm_strategy: str = "optimize",
    povm: Povm | None = None,
    povm_params: dict | None = None,
    ree: bool = True,
    ree_params: dict | None = None,
    tolerances: Tolerances | None = None,
) -> BoundReport:
    """Evaluate every bound and the chain inequalities for one instance at time ``t``.

    ``povm_strategy`` is ``"fixed"`` (use ``povm``), ``"eigenbasis"`` (project on
    the eigenbasis of ``sigma_E``) or ``"optimize"`` (``PovmOptimizer``).
    """
    if povm_strategy not in POVM_STRATEGIES:
        raise ValidationError(f"povm_strategy must be one of {POVM_STRATEGIES}, got {povm_strategy!r}")
    tol = tolerances or Tolerances()
    rho_s = check_density_matrix(rho_s, "rho_S")
    sigma = evolve(model, rho_s, rho_e, t)
    dims = sigma.dims
    sig = np.asarray(sigma)
    e = env_ensemble(model, rho_s, rho_e, t)
    sigma_s = partial_trace(sig, 0, dims)
    sigma_e = partial_trace(sig, 1, dims)

    if povm_strategy == "fixed":
        if povm is None:
            raise ValidationError("the fixed strategy needs a POVM")
        m = povm
    elif povm_strategy == "eigenbasis":
        m = eigenbasis_povm(e)
    else:
        m = PovmOptimizer(**(povm_params or {})).fit(e).povm_
    if m.dim != model.d_E:
        raise ValidationError(f"POVM dimension {m.dim} does not match d_E={model.d_E}")

    c_init = coherence_rel_entropy(rho_s)
    h_i = shannon_entropy(e.probs)
    h_im = conditional_entropy(e, m)
    lower_general = lower_bound_general(rho_s, e, m)
    b = lower_q = None
    if model.d_S == 2:
        b = fidelity(e.states[0], e.states[1])
        lower_q = lower_bound_qubit(rho_s, e.states[0], e.states[1])
    lows = [lower_general] + ([lower_q] if lower_q is not None else [])

    s_s, s_e, s_se = von_neumann_entropy(sigma_s), von_neumann_entropy(sigma_e), von_neumann_entropy(sig)
    ree_low = ree_high = None
    if ree:
        br = SeparableBracket(**(ree_params or {})).fit(sig, dims=dims)
        ree_low, ree_high = br.lower_, br.upper_

    rep = BoundReport(
        t=float(t),
        d_S=model.d_S,
        d_E=model.d_E,
        povm_strategy=povm_strategy,
        C_r_initial=c_init,
        C_r_final=coherence_rel_entropy(sigma_s),
        H_I=h_i,
        H_I_given_M=h_im,
        fidelity_B=b,
        lower_general=lower_general,
        lower_qubit=lower_q,
        lower_clamped=max(0.0, *lows),
        neg_cond_entropy=max(s_s, s_e) - s_se,
        mutual_info=quantum_mutual_info(sig, dims),
        upper=upper_bound(rho_s, sigma_s),
        ree_bracket_low=ree_low,
        ree_bracket_high=ree_high,
        S_S=s_s,
        S_E=s_e,
        S_SE=s_se,
        holevo_chi=holevo_chi(e),
    )
    pure = abs(1.0 - float(np.real(np.trace(sig @ sig)))) <= tol.purity
    diagonal = bool(np.max(np.abs(rho_s - np.diag(np.diag(rho_s)))) <= 1e-12)
    rep.chain_ok = _chain(rep, pure, diagonal, povm_strategy == "optimize", tol)
    return rep


class BoundEvaluator(BaseEstimator, TransformerMixin):
    """Batch evaluation of ``Instance`` objects into report rows.

    The estimator is stateless: ``fit`` only validates parameters. ``transform``
    takes a sequence of instances and returns an object array whose columns
    follow ``REPORT_COLUMNS`` (one row per instance and time); the matching
    ``BoundReport`` objects are kept in ``reports_``.
    """

    def __init__(self, povm_strategy="optimize", povm_params=None, ree=True, ree_params=None, tolerances=None):
        self.povm_strategy = povm_strategy
        self.povm_params = povm_params
        self.ree = ree
        self.ree_params = ree_params
        self.tolerances = tolerances

    def fit(self, X=None, y=None):
        if self.povm_strategy not in POVM_STRATEGIES:
            raise ValidationError(f"povm_strategy must be one of {POVM_STRATEGIES}")
        self.n_features_out_ = len(REPORT_COLUMNS)
        return self

    def evaluate(self, inst: Instance) -> list:
        strategy = self.povm_strategy
        if strategy == "fixed" and inst.povm is None:
            raise ValidationError("instance carries no POVM for the fixed strategy")
        povm = Povm(tuple(inst.povm)) if inst.povm is not None else None
        return [
            evaluate_instance(
                inst.model, inst.rho_S, inst.rho_E, t, strategy, povm,
                self.povm_params, self.ree, self.ree_params, self.tolerances,
            )
            for t in inst.times
        ]

    def transform(self, X):
        if not hasattr(self, "n_features_out_"):
            self.fit()
        self.reports_ = [r for inst in X for r in self.evaluate(inst)]
        return np.array([r.row() for r in self.reports_], dtype=object).reshape(-1, len(REPORT_COLUMNS))

    def get_feature_names_out(self, input_features=None):
        return np.array(REPORT_COLUMNS, dtype=object)
