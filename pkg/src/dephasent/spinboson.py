"""Qubit pure dephasing in an Ohmic bosonic bath: closed-form fidelity and a discrete-mode oracle.

Times are dimensionless, ``x = Lambda t``, everywhere in the analytic part. The
oracle works with physical frequencies and times (``hbar = k_B = 1``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.signal import find_peaks
from scipy.special import gamma
from scipy.stats import poisson
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array

from ._validation import ValidationError
from .info import coherence_rel_entropy
from .sampling import as_rng, mixed_coherent_state
from .special import hurwitz_zeta, polygamma

__all__ = [
    "SUPPORTED_S",
    "CONVENTIONS",
    "SpinBosonParams",
    "ohmic_density",
    "ln_b_vacuum",
    "ln_b_thermal",
    "analytic_fidelity",
    "BoundCurve",
    "bound_curve",
    "detect_peak",
    "DiscreteBath",
    "TruncationError",
    "sample_bath",
    "oracle_fidelity",
    "mode_fidelity",
    "SpinBosonBound",
]

SUPPORTED_S = (2.0, 3.0)
# "reference" evaluates the thermal closed form exactly as printed; "tanh" flips
# its sign, which is what the microscopic model (tanh(omega/2T) weighting) gives.
CONVENTIONS = ("reference", "tanh")
TAIL_MASS = 1e-8


@dataclass(frozen=True)
class SpinBosonParams:
    s: float
    cutoff: float = 1.0
    temperature: float = 1.0
    alpha: float = 0.0
    times: tuple = tuple(np.round(np.linspace(0.0, 10.0, 201), 12))

    def __post_init__(self):
        if not self.s > 1:
            raise ValidationError(f"Ohmicity must exceed 1, got {self.s}")
        if not self.cutoff > 0:
            raise ValidationError("cutoff must be positive")
        if not self.temperature >= 0:
            raise ValidationError("temperature must be nonnegative")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValidationError("alpha must lie in [0, 1]")
        times = np.asarray(self.times, dtype=float).ravel()
        if times.size and (times.min() < 0 or np.any(np.diff(times) <= 0)):
            raise ValidationError("times must be nonnegative and strictly ascending")
        object.__setattr__(self, "times", tuple(float(x) for x in times))

    @property
    def t_over_lambda(self) -> float:
        return self.temperature / self.cutoff


def _check_s(s, best_effort):
    if float(s) not in SUPPORTED_S and not best_effort:
        raise ValidationError(f"s={s} is outside the supported set {SUPPORTED_S}; enable best_effort to try it")


def ohmic_density(omega, p: SpinBosonParams):
    """``J(omega) = omega^s Lambda^(1-s) exp(-omega/Lambda)``."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValidationError("frequencies must be nonnegative")
    return omega ** p.s * p.cutoff ** (1.0 - p.s) * np.exp(-omega / p.cutoff)


def ln_b_vacuum(x, p: SpinBosonParams):
    """Temperature-independent part of ``ln B`` at ``x = Lambda t``."""
    x = np.asarray(x, dtype=float)
    k = p.s - 1.0
    return -2.0 * gamma(k) * (1.0 - np.cos(k * np.arctan(x)) / (1.0 + x * x) ** (k / 2))


def _thermal_bracket(s, a, b):
    """Static-minus-dynamic polygamma combination multiplying the prefactor."""
    m = s - 2.0
    if m == round(m):
        f = lambda z: polygamma(int(round(m)), z)  # noqa: E731
        sign = 1.0
    else:
        # (-a)^(s-1) (-1)^(m+1) Gamma(m+1) collapses to a^(s-1) Gamma(s-1) for
        # integer m; the same collapsed form is used off the integers.
        f = lambda z: float(gamma(s - 1.0)) * hurwitz_zeta(s - 1.0, z)  # noqa: E731
        sign = None
    dyn = 0.5 * f(0.5 + a + 1j * b) - 0.5 * f(1.0 + a + 1j * b)
    val = f(1.0 + a) - f(0.5 + a) + dyn + dyn.conjugate()
    return val, sign


def ln_b_thermal(x, p: SpinBosonParams, convention: str = "reference", best_effort: bool = False):
    """Thermal part of ``ln B`` at ``x = Lambda t`` (``4 x`` the printed quarter form)."""
    if convention not in CONVENTIONS:
        raise ValidationError(f"convention must be one of {CONVENTIONS}")
    _check_s(p.s, best_effort)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    r = p.t_over_lambda
    out = np.zeros_like(xs)
    if r > 0:
        a = r / 2.0
        for i, xi in enumerate(xs):
            val, sign = _thermal_bracket(p.s, a, r * xi / 2.0)
            if abs(val.imag) > 1e-10 * max(1.0, abs(val.real)):
                raise ArithmeticError(f"thermal term has imaginary residue {val.imag:.3g}")
            pref = (-a) ** (p.s - 1.0) if sign is not None else a ** (p.s - 1.0)
            out[i] = 4.0 * float(np.real(pref)) * val.real
    if convention == "tanh":
        out = -out
    return out if np.ndim(x) else float(out[0])


def analytic_fidelity(x, p: SpinBosonParams, convention: str = "reference", best_effort: bool = False):
    """``B = exp(ln B_vac + ln B_th)``; raises if the result leaves ``(0, 1]``."""
    ln_b = ln_b_vacuum(x, p) + ln_b_thermal(x, p, convention, best_effort)
    b = np.exp(ln_b)
    if np.any(b > 1.0 + 1e-12) or np.any(~np.isfinite(b)):
        raise ArithmeticError("closed-form fidelity left the interval (0, 1]")
    return np.minimum(b, 1.0)


class BoundCurve(NamedTuple):
    lambda_t: np.ndarray
    b_vac: np.ndarray
    b_th: np.ndarray
    b: np.ndarray
    raw: np.ndarray
    clamped: np.ndarray

    def rows(self):
        """``(Lambda t, raw bound, clamped bound)`` triples."""
        return list(zip(self.lambda_t.tolist(), self.raw.tolist(), self.clamped.tolist()))


def bound_curve(p: SpinBosonParams, convention: str = "reference", best_effort: bool = False) -> BoundCurve:
    """Qubit lower bound for the mixed coherent initial state along ``p.times``.

    Equal populations give ``2 sqrt(p(1-p)) = 1``, so the raw bound is
    ``C_r - B`` and the clamped one ``max(0, C_r - B)``.
    """
    x = np.asarray(p.times, dtype=float)
    lv = ln_b_vacuum(x, p)
    lt = ln_b_thermal(x, p, convention, best_effort)
    b = analytic_fidelity(x, p, convention, best_effort)
    c_r = coherence_rel_entropy(mixed_coherent_state(2, p.alpha))
    raw = c_r - b
    return BoundCurve(x, np.exp(lv), np.exp(lt), b, raw, np.maximum(0.0, raw))


def detect_peak(lambda_t, values, tol: float = 1e-9):
    """Interior maximum of largest prominence as ``(Lambda t*, prominence)``, or ``None``.

    ``None`` is returned when the curve is monotone up to ``tol``.
    """
    x = np.asarray(lambda_t, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("grid and values must be one-dimensional and equally long")
    d = np.diff(y)
    if np.all(d >= -tol) or np.all(d <= tol):
        return None
    idx, props = find_peaks(y, prominence=tol)
    if idx.size == 0:
        return None
    k = int(np.argmax(props["prominences"]))
    return float(x[idx[k]]), float(props["prominences"][k])


# -- discrete-mode oracle ---------------------------------------------------------


class TruncationError(RuntimeError):
    """A mode needs more Fock levels than the bath allows."""


@dataclass(frozen=True, eq=False)
class DiscreteBath:
    """Independent modes ``omega_k`` coupled with strengths ``g_k`` to ``sigma_z``.

    ``fock_cutoff`` is the largest number of Fock levels any single mode may use.
    """

    frequencies: np.ndarray
    couplings: np.ndarray
    fock_cutoff: int = 4096

    def __post_init__(self):
        w = np.asarray(self.frequencies, dtype=float).ravel()
        g = np.asarray(self.couplings, dtype=float).ravel()
        if w.size != g.size or w.size == 0:
            raise ValidationError("frequencies and couplings must be nonempty and equally long")
        if np.any(w <= 0):
            raise ValidationError("frequencies must be positive")
        if int(self.fock_cutoff) < 2:
            raise ValidationError("fock_cutoff must be at least 2")
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "couplings", g)

    def __len__(self):
        return self.frequencies.size

    def reorganization_energy(self) -> float:
        return float(np.sum(self.couplings ** 2 / self.frequencies))


def sample_bath(p: SpinBosonParams, n_modes: int, omega_max: float, seed=None, fock_cutoff: int = 4096) -> DiscreteBath:
    """Midpoint discretization of ``J`` on ``(0, omega_max]``.

    ``g_k = sqrt(J(omega_k) d_omega / 2)``, the normalization under which the
    discrete vacuum decoherence converges to ``ln_b_vacuum``. With a ``seed``
    each frequency is jittered uniformly within its cell.
    """
    if n_modes < 1:
        raise ValidationError("n_modes must be at least 1")
    if not omega_max > 0:
        raise ValidationError("omega_max must be positive")
    dw = omega_max / n_modes
    offs = 0.5 if seed is None else as_rng(seed).uniform(1e-6, 1.0, n_modes)
    w = (np.arange(n_modes) + offs) * dw
    g = np.sqrt(ohmic_density(w, p) * dw / 2.0)
    return DiscreteBath(w, g, fock_cutoff)


def _levels(omega, g, temperature):
    n_th = math.ceil(math.log(1.0 / TAIL_MASS) * temperature / omega) if temperature > 0 else 1
    d = abs(2.0 * g / omega)
    # the 4|d| margin alone leaves a d^4/2 tail per mode for weak displacements
    margin = max(math.ceil(4.0 * d), int(poisson.isf(TAIL_MASS, d * d)) + 1)
    return max(2, n_th + margin)


def mode_fidelity(omega: float, g: float, t, temperature: float, n_levels: int):
    """Fidelity of ``rho`` evolved under ``omega a^H a +/- g (a + a^H)`` in ``n_levels`` Fock levels.

    The two Hamiltonians are exchanged by the parity operator ``P``, so with
    ``H_+ = V E V^T`` the fidelity is the trace norm of the Hermitian matrix
    ``C (V^T P V) C^H`` with ``C = sqrt(rho) V exp(iEt)``. ``t`` may be an
    array; the spectral data are shared across times.
    """
    n = np.arange(n_levels)
    if temperature > 0:
        pops = np.exp(-n * omega / temperature)
    else:
        pops = (n == 0).astype(float)
    pops /= pops.sum()
    keep = pops > 1e-300
    e, v = eigh_tridiagonal(omega * n.astype(float), g * np.sqrt(n[1:].astype(float)))
    parity = np.where(n % 2 == 0, 1.0, -1.0)
    q = (v.T * parity) @ v
    sv = np.sqrt(pops[keep])[:, None] * v[keep]
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(ts.size)
    for i, ti in enumerate(ts):
        c = sv * np.exp(1j * e * ti)
        k = c @ q @ c.conj().T
        out[i] = min(1.0, np.sum(np.abs(np.linalg.eigvalsh(0.5 * (k + k.conj().T)))))
    return out if np.ndim(t) else float(out[0])


def oracle_fidelity(bath: DiscreteBath, t, temperature: float):
    """Product over modes of the truncated-Fock fidelity between the two conditional states.

    Modes are multiplied in index order so the result is reproducible bit for bit.
    """
    levels = [_levels(w, g, temperature) for w, g in zip(bath.frequencies, bath.couplings)]
    worst = int(np.argmax(levels))
    if levels[worst] > bath.fock_cutoff:
        raise TruncationError(
            f"mode {worst} (omega={bath.frequencies[worst]:.4g}) needs {levels[worst]} levels, "
            f"above the cutoff {bath.fock_cutoff}"
        )
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.ones(ts.size)
    moving = ts != 0.0
    if np.any(moving):
        for w, g, n in zip(bath.frequencies, bath.couplings, levels):
            if g != 0.0:
                out[moving] *= mode_fidelity(w, g, ts[moving], temperature, n)
    return out if np.ndim(t) else float(out[0])


class SpinBosonBound(BaseEstimator, TransformerMixin):
    """Map a column of ``Lambda t`` values to ``[B_vac, B_th, B, raw bound, clamped bound]``."""

    def __init__(self, s=3.0, cutoff=1.0, temperature=1.0, alpha=0.0, convention="reference", best_effort=False):
        self.s = s
        self.cutoff = cutoff
        self.temperature = temperature
        self.alpha = alpha
        self.convention = convention
        self.best_effort = best_effort

    def fit(self, X=None, y=None):
        _check_s(self.s, self.best_effort)
        if self.convention not in CONVENTIONS:
            raise ValidationError(f"convention must be one of {CONVENTIONS}")
        SpinBosonParams(self.s, self.cutoff, self.temperature, self.alpha, ())
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        if not hasattr(self, "n_features_in_"):
            self.fit()
        x = check_array(X, ensure_2d=False).ravel()
        p = SpinBosonParams(self.s, self.cutoff, self.temperature, self.alpha, ())
        lv = ln_b_vacuum(x, p)
        lt = ln_b_thermal(x, p, self.convention, self.best_effort)
        b = analytic_fidelity(x, p, self.convention, self.best_effort)
        raw = coherence_rel_entropy(mixed_coherent_state(2, self.alpha)) - b
        return np.column_stack([np.exp(lv), np.exp(lt), b, raw, np.maximum(0.0, raw)])

    def get_feature_names_out(self, input_features=None):
        return np.array(["B_vac", "B_th", "B", "raw_bound", "clamped_bound"], dtype=object)

