"""Scattering functions: the closed form for SL(2,Z) and Blaschke-type toy families.

Both kinds satisfy ``phi(s) phi(1 - s) = 1`` and ``phi(conj s) = conj phi(s)``.
The toy family tracks a single resonance ``rho(eps)`` together with its
mirror images::

    phi(s, eps) = (s - (1 - rho)) / (s - rho) * (s - (1 - conj rho)) / (s - conj rho),

so the poles sit at ``rho`` and ``conj rho`` and the zeros at ``1 - rho`` and
``1 - conj rho``.  When ``rho`` lies on the critical line the two factors
cancel and ``phi`` is identically one.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import PoleError, ScatteringError
from .forms import SpectralPoint
from .special import log_gamma, rgamma, zeta

__all__ = [
    "TrajectorySpec",
    "ScatteringModel",
    "phi_modular",
    "phi_modular_dirichlet",
    "blaschke_phi",
    "phi_derivative",
    "phi_log_derivative",
    "load_model",
    "model_to_json",
    "identity_residuals",
]

POLE_DISTANCE = 1e-8
_SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# full modular group
# ---------------------------------------------------------------------------

def phi_modular(s) -> complex:
    """``sqrt(pi) Gamma(s - 1/2) zeta(2s - 1) / (Gamma(s) zeta(2s))``.

    Raises:
        ScatteringError: ``s`` within ``1e-8`` of ``1/2`` or ``1``, or on a
            zero of ``zeta(2s)`` (code ``scatter.pole``).
    """
    s = complex(s)
    for p in (0.5, 1.0):
        if abs(s - p) < POLE_DISTANCE:
            raise ScatteringError(f"phi is singular or indeterminate at s = {p}", code="scatter.pole")
    try:
        z_num = zeta(2.0 * s - 1.0)
        z_den = zeta(2.0 * s)
        lg = log_gamma(s - 0.5)
    except PoleError as exc:
        raise ScatteringError(f"phi has a pole at s = {s}", code="scatter.pole") from exc
    if z_den == 0 or abs(z_den) < 1e-14 * max(1.0, abs(z_num)):
        raise ScatteringError(f"zeta(2s) vanishes at s = {s}", code="scatter.pole")
    return _SQRT_PI * cmath.exp(lg) * rgamma(s) * z_num / z_den


def _euler_phi_table(n: int) -> np.ndarray:
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:  # p is prime
            phi[p::p] -= phi[p::p] // p
    return phi


def phi_modular_dirichlet(s, terms: int = 100_000) -> tuple[complex, complex]:
    """``sqrt(pi) Gamma(s - 1/2)/Gamma(s) sum_c phi_E(c) c^{-2s}`` for ``Re s > 1``.

    The tail beyond ``terms`` is estimated by partial summation with the exact
    totient sum ``Phi(N)`` and ``Phi(x) ~ 3 x^2 / pi^2``::

        sum_{c > N} phi_E(c) c^{-2s} ~ -Phi(N) N^{-2s} + (6 s / pi^2) N^{2 - 2s} / (2s - 2).

    Returns ``(value, tail_correction)`` where the tail is already included.
    """
    s = complex(s)
    if not s.real > 1.0:
        raise ScatteringError("the Dirichlet series needs Re(s) > 1", code="scatter.non_convergent")
    tot = _euler_phi_table(terms)
    c = np.arange(1, terms + 1, dtype=float)
    body = complex(np.sum(tot[1:] * np.exp(-2.0 * s * np.log(c))))
    big_phi = float(tot[1:].sum())
    n = float(terms)
    tail = -big_phi * n ** (-2.0 * s) + (6.0 * s / math.pi**2) * n ** (2.0 - 2.0 * s) / (2.0 * s - 2.0)
    pref = _SQRT_PI * cmath.exp(log_gamma(s - 0.5)) * rgamma(s)
    return pref * (body + tail), pref * tail


# ---------------------------------------------------------------------------
# Blaschke toy family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectorySpec:
    """Resonance path ``rho(eps) = s_j + sum_{k>=1} rho_k eps^k`` for ``|eps| <= eps_max``.

    The path must not enter ``Re s > 1/2`` anywhere on a 201-point sample of
    ``[-eps_max, eps_max]``.
    """

    s_j: SpectralPoint
    coeffs: tuple
    eps_max: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in self.coeffs))
        if not self.eps_max > 0:
            raise ScatteringError("eps_max must be positive", code="scatter.trajectory")
        for e in np.linspace(-self.eps_max, self.eps_max, 201):
            if self.rho(float(e)).real > 0.5 + 1e-15:
                raise ScatteringError(
                    f"trajectory enters Re s > 1/2 at eps = {e:.4g}", code="scatter.trajectory"
                )

    def rho(self, eps: float) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = (acc + c) * eps
        return self.s_j.s + acc

    def real_coefficient(self, k: int) -> float:
        return self.coeffs[k - 1].real if 1 <= k <= len(self.coeffs) else 0.0


@dataclass(frozen=True)
class ScatteringModel:
    """A scattering function, either ``closed_form_modular`` or ``blaschke_family``.

    Construction evaluates both functional identities on a fixed sample grid
    and refuses models that miss them by more than ``1e-12``.
    """

    kind: str
    trajectory: TrajectorySpec | None = None
    identity_residual: float = field(default=0.0, compare=False)

    def __post_init__(self):
        if self.kind not in ("closed_form_modular", "blaschke_family"):
            raise ScatteringError(f"unknown model kind {self.kind!r}", code="scatter.kind")
        if self.kind == "blaschke_family" and self.trajectory is None:
            raise ScatteringError("a Blaschke family needs a trajectory", code="scatter.kind")
        worst = 0.0
        rng = np.random.default_rng(20240101)
        pts = 0.5 + rng.uniform(-1.0, 1.0, 12) + 1j * rng.uniform(-12.0, 12.0, 12)
        for s in pts:
            for eps in (0.0, 0.5 * self.eps_max) if self.trajectory else (0.0,):
                try:
                    worst = max(worst, *identity_residuals(self, complex(s), float(eps)))
                except (ScatteringError, PoleError):
                    continue
        if worst > 1e-12:
            raise ScatteringError(
                f"functional identities fail on the sample grid (residual {worst:.2e})", code="scatter.identity"
            )
        object.__setattr__(self, "identity_residual", worst)

    @classmethod
    def modular(cls) -> "ScatteringModel":
        return cls("closed_form_modular")

    @classmethod
    def blaschke(cls, s_j: SpectralPoint | complex, coeffs, eps_max: float = 0.1) -> "ScatteringModel":
        sp = s_j if isinstance(s_j, SpectralPoint) else SpectralPoint.from_s(s_j)
        return cls("blaschke_family", TrajectorySpec(sp, tuple(coeffs), eps_max))

    @property
    def eps_max(self) -> float:
        return self.trajectory.eps_max if self.trajectory else 0.0

    def rho(self, eps: float) -> complex:
        if self.trajectory is None:
            raise ScatteringError("the modular model has no trajectory", code="scatter.kind")
        return self.trajectory.rho(eps)

    def singular_points(self, eps: float) -> tuple[list[complex], list[complex]] | None:
        """``(poles, zeros)`` of ``phi(., eps)`` for toy models, ``None`` otherwise."""
        if self.trajectory is None:
            return None
        rho = self.rho(eps)
        if abs(rho.real - 0.5) == 0.0:
            return [], []
        return [rho, rho.conjugate()], [1.0 - rho, 1.0 - rho.conjugate()]

    def __call__(self, s, eps: float = 0.0) -> complex:
        if self.kind == "closed_form_modular":
            return phi_modular(s)
        return blaschke_phi(self, s, eps)


def blaschke_phi(model: ScatteringModel, s, eps: float) -> complex:
    """Evaluate the toy family at ``s``.

    Raises:
        ScatteringError: ``s`` sits on ``rho(eps)`` or its conjugate.
    """
    s = complex(s)
    rho = model.rho(eps)
    rb = rho.conjugate()
    d1, d2 = s - rho, s - rb
    if rho.real != 0.5 and (abs(d1) < POLE_DISTANCE or abs(d2) < POLE_DISTANCE):
        raise ScatteringError(f"s = {s} is a pole of the model", code="scatter.pole")
    if rho.real == 0.5:
        return 1.0 + 0j
    return (s - (1.0 - rho)) / d1 * ((s - (1.0 - rb)) / d2)


def _log_derivative_blaschke(model: ScatteringModel, s: complex, eps: float) -> complex:
    rho = model.rho(eps)
    rb = rho.conjugate()
    if rho.real == 0.5:
        return 0j
    return (1.0 / (s - (1.0 - rho)) - 1.0 / (s - rho)) + (1.0 / (s - (1.0 - rb)) - 1.0 / (s - rb))


def _richardson_central(f, s: complex, h: float = 1e-5) -> complex:
    d1 = (f(s + h) - f(s - h)) / (2.0 * h)
    d2 = (f(s + h / 2) - f(s - h / 2)) / h
    return d2 + (d2 - d1) / 3.0


def phi_log_derivative(model: ScatteringModel, s, eps: float = 0.0) -> complex:
    """``phi'(s) / phi(s)`` in the ``s`` variable."""
    s = complex(s)
    if model.kind == "blaschke_family":
        blaschke_phi(model, s, eps)  # pole check
        return _log_derivative_blaschke(model, s, eps)
    return phi_derivative(model, s, eps) / phi_modular(s)


def phi_derivative(model: ScatteringModel, s, eps: float = 0.0) -> complex:
    """``d phi / ds``: closed form for toy models, Richardson-extrapolated central difference otherwise."""
    s = complex(s)
    if model.kind == "blaschke_family":
        return blaschke_phi(model, s, eps) * _log_derivative_blaschke(model, s, eps)
    return _richardson_central(phi_modular, s)


def identity_residuals(model: ScatteringModel, s, eps: float = 0.0) -> tuple[float, float]:
    """``(|phi(s) phi(1-s) - 1|, |phi(conj s) - conj phi(s)| / |phi(s)|)``."""
    s = complex(s)
    a = model(s, eps)
    b = model(1.0 - s, eps)
    c = model(s.conjugate(), eps)
    return abs(a * b - 1.0), abs(c - a.conjugate()) / max(abs(a), 1e-300)


# ---------------------------------------------------------------------------
# JSON model files
# ---------------------------------------------------------------------------

def load_model(path_or_dict) -> ScatteringModel:
    """Read ``{kind, s_j: [re, im], trajectory: [[re, im], ...], eps_max}``."""
    if isinstance(path_or_dict, dict):
        data = path_or_dict
    else:
        try:
            data = json.loads(Path(path_or_dict).read_text())
        except json.JSONDecodeError as exc:
            raise ScatteringError(f"model file is not valid JSON: {exc}", code="scatter.model_file") from exc
    kind = data.get("kind")
    if kind == "closed_form_modular":
        return ScatteringModel.modular()
    if kind != "blaschke_family":
        raise ScatteringError(f"unknown model kind {kind!r}", code="scatter.kind")
    try:
        sj = complex(*data["s_j"])
        coeffs = [complex(*c) for c in data["trajectory"]]
        eps_max = float(data.get("eps_max", 0.1))
    except (KeyError, TypeError, ValueError) as exc:
        raise ScatteringError(f"malformed model file: {exc}", code="scatter.model_file") from exc
    return ScatteringModel.blaschke(sj, coeffs, eps_max)


def model_to_json(model: ScatteringModel) -> dict:
    if model.trajectory is None:
        return {"kind": model.kind}
    t = model.trajectory
    return {
        "kind": model.kind,
        "s_j": [t.s_j.s.real, t.s_j.s.imag],
        "trajectory": [[c.real, c.imag] for c in t.coeffs],
        "eps_max": t.eps_max,
    }
