"""Convolution Dirichlet series of a Maass form against powers of an Eichler integral.

For a weight-2 form with coefficients ``a_k`` and a power ``l >= 1`` the
series has coefficients

    c_n = sum over k_1 + ... + k_l = n of prod_i a_{k_i} / k_i,
    d_n = c_n * b_{-n},

and ``L(s) = sum_n d_n n^{-(s - 1/2)}``.  Pairing a Maass form with ``F^l``
over a strip of width one and integrating ``y^s dx dy / y^2`` unfolds into

    (2 pi i)^{-l} (2 pi)^{1/2 - s} I(s, nu) L(s),   nu = s_j - 1/2,

where ``I(s, nu) = int_0^inf e^{-t} t^{s - 1/2} K_nu(t) dt / t``.  The
closed form of ``I`` gives the constant ``(2 pi i)^{-l} 2^{1-2s} pi^{1-s}``
in front of ``Gamma(s + s_j - 1) Gamma(s - s_j) / Gamma(s) L(s)``; for
``l = 2`` this is ``-2^{-(2s+1)} pi^{-(s+1)}``.
"""

from __future__ import annotations

import cmath
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .errors import ConvergenceRegionError, GrowthWarning, LSeriesError
from .forms import EichlerIntegral, HolomorphicCuspForm, MaassFormData, SpectralPoint
from .special import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    bessel_k_array,
    log_gamma,
    rgamma,
    trapezoid_line,
)

__all__ = [
    "ConvolutionSeries",
    "LSeriesValue",
    "Envelope",
    "MellinCheck",
    "UnfoldingReport",
    "SIGMA_ABS",
    "convolution_coefficients",
    "convolution_coefficients_enumerated",
    "evaluate",
    "complete",
    "gamma_prefactor",
    "mellin_bessel_closed",
    "mellin_bessel_quadrature",
    "mellin_bessel_check",
    "unfolding_prefactor",
    "unfolding_check",
]

SIGMA_ABS = 2.5
POLE_DISTANCE = 1e-6


# ---------------------------------------------------------------------------
# coefficients
# ---------------------------------------------------------------------------

def _weights(source) -> list:
    if isinstance(source, EichlerIntegral):
        return list(source.weights())
    if isinstance(source, HolomorphicCuspForm):
        return list(EichlerIntegral(source).weights())
    return list(source)


def _all_exact(ws) -> bool:
    return all(isinstance(w, (int, Fraction)) and not isinstance(w, bool) for w in ws)


@dataclass(frozen=True)
class ConvolutionSeries:
    """Coefficients ``c_1..c_N`` of ``F^l`` (``c_n = 0`` for ``n < l``).

    ``c`` holds Fractions when the weights were exact, floats otherwise.
    """

    l: int
    c: tuple
    exact: bool

    def __post_init__(self):
        if self.l < 1:
            raise LSeriesError("power l must be >= 1", code="lseries.power")
        if any(v != 0 for v in self.c[: self.l - 1]):
            raise LSeriesError("c_n must vanish for n < l", code="lseries.invariant")

    @property
    def n_max(self) -> int:
        return len(self.c)

    def c_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.c])

    def d_array(self, u: MaassFormData, upto: int | None = None) -> np.ndarray:
        """``d_n = c_n b_{-n}`` for ``n = 1..upto``."""
        upto = min(self.n_max, u.n_max) if upto is None else upto
        if upto > self.n_max or upto > u.n_max:
            raise LSeriesError(
                f"upto={upto} exceeds stored coefficients (series {self.n_max}, Maass {u.n_max})",
                code="lseries.range",
            )
        return self.c_array()[:upto] * u.b_minus_array()[:upto]


def convolution_coefficients(weights, l: int, upto: int) -> ConvolutionSeries:
    """``c_n`` for ``n = 1..upto`` by ``l - 1`` truncated Cauchy products.

    ``weights`` is an :class:`EichlerIntegral`, a :class:`HolomorphicCuspForm`
    or a plain sequence ``w_1, w_2, ...`` (the values ``a_k / k``).  Integer or
    Fraction weights are multiplied exactly.

    Raises:
        LSeriesError: ``l < 1``, ``upto < l`` or fewer than ``upto - l + 1``
            weights.
    """
    if l < 1:
        raise LSeriesError("power l must be >= 1", code="lseries.power")
    if upto < l:
        raise LSeriesError(f"upto={upto} must be at least l={l}", code="lseries.range")
    ws = _weights(weights)
    need = upto - l + 1
    if len(ws) < need:
        raise LSeriesError(
            f"need base weights up to index {need}, have {len(ws)}", code="lseries.insufficient_coefficients"
        )
    ws = ws[:need]
    exact = _all_exact(ws)
    if exact:
        base = [Fraction(0)] + [Fraction(w) for w in ws] + [Fraction(0)] * (upto - need)
        power = list(base)
        for _ in range(l - 1):
            nxt = [Fraction(0)] * (upto + 1)
            for i, pi in enumerate(power):
                if pi == 0:
                    continue
                for j in range(1, upto + 1 - i):
                    if base[j]:
                        nxt[i + j] += pi * base[j]
            power = nxt
        return ConvolutionSeries(l, tuple(power[1:]), True)
    base = np.zeros(upto + 1)
    base[1 : need + 1] = [float(w) for w in ws]
    power = base.copy()
    for _ in range(l - 1):
        power = np.convolve(power, base)[: upto + 1]
    return ConvolutionSeries(l, tuple(float(v) for v in power[1:]), False)


def convolution_coefficients_enumerated(weights, l: int, upto: int) -> ConvolutionSeries:
    """Reference ``c_n`` by listing every composition of ``n`` into ``l`` positive parts.

    Compositions are generated by choosing ``l - 1`` cut points among the
    ``n - 1`` gaps.  Exact weights are accumulated as integers over the common
    denominator of the products and reduced once per ``n``.
    """
    ws = _weights(weights)
    if upto - l + 1 > len(ws):
        raise LSeriesError("not enough base weights", code="lseries.insufficient_coefficients")
    exact = _all_exact(ws)
    out = []
    if exact:
        fr = [Fraction(w) for w in ws]
        den = math.lcm(*(f.denominator for f in fr[: max(upto - l + 1, 1)]))
        nums = [f.numerator * (den // f.denominator) for f in fr]
    for n in range(1, upto + 1):
        if n < l:
            out.append(Fraction(0) if exact else 0.0)
            continue
        acc = 0 if exact else 0.0
        for cuts in combinations(range(1, n), l - 1):
            bounds = (0,) + cuts + (n,)
            parts = [bounds[i + 1] - bounds[i] for i in range(l)]
            term = 1 if exact else 1.0
            for k in parts:
                term *= nums[k - 1] if exact else ws[k - 1]
            acc += term
        out.append(Fraction(acc, den**l) if exact else float(acc))
    return ConvolutionSeries(l, tuple(out), exact)


# ---------------------------------------------------------------------------
# evaluation and completion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Envelope:
    """Growth envelope ``|d_n| <= C n^{1/2 + delta}`` used for tail bounds."""

    C: float
    delta: float

    @classmethod
    def fit(cls, d: np.ndarray, safety: float = 2.0) -> "Envelope":
        """Fit the exponent by least squares on ``log|d_n|`` and inflate both constants.

        The fitted growth exponent (floored at 0) is multiplied by ``safety``
        and ``C`` is ``safety`` times the smallest constant covering the data.
        """
        n = np.arange(1, d.size + 1, dtype=float)
        nz = np.abs(d) > 0
        if nz.sum() >= 2:
            slope = float(np.polyfit(np.log(n[nz]), np.log(np.abs(d[nz])), 1)[0])
        else:
            slope = 0.0
        expo = safety * max(slope, 0.0)
        c_cover = float(np.max(np.abs(d) / n**expo)) if d.size else 0.0
        return cls(safety * c_cover, expo - 0.5)

    def violated_by(self, d: np.ndarray) -> bool:
        n = np.arange(1, d.size + 1, dtype=float)
        return bool(np.any(np.abs(d) > self.C * n ** (0.5 + self.delta) * (1 + 1e-12)))

    def tail(self, n_last: int, sigma: float) -> float:
        """Bound on ``sum_{n > n_last} |d_n| n^{-(sigma - 1/2)}`` by the integral test."""
        if self.C == 0.0:
            return 0.0
        expo = 1.0 + self.delta - sigma
        if expo >= -1.0:
            return math.inf
        return self.C * n_last ** (expo + 1.0) / (-(expo + 1.0))


@dataclass(frozen=True)
class LSeriesValue:
    """Raw and completed series value with its truncation bound."""

    s: complex
    raw: complex
    completed: complex | None
    truncation_bound: float
    terms: int
    envelope: Envelope | None = None

    def __post_init__(self):
        if not self.truncation_bound >= 0.0:
            raise LSeriesError("truncation bound must be non-negative", code="lseries.invariant")


def _partial_sum(d: np.ndarray, s: complex) -> complex:
    n = np.arange(1, d.size + 1, dtype=float)
    terms = d * np.exp(-(s - 0.5) * np.log(n))
    return complex(np.sum(terms))


def evaluate(
    series: ConvolutionSeries | np.ndarray,
    u: MaassFormData | None,
    s,
    upto: int,
    *,
    sigma_abs: float = SIGMA_ABS,
    envelope: Envelope | None = None,
    spectral_point: SpectralPoint | None = None,
) -> LSeriesValue:
    """Partial sum ``sum_{n <= upto} d_n n^{-(s - 1/2)}`` with a tail bound.

    ``series`` is either a :class:`ConvolutionSeries` (paired with ``u``) or
    a ready array of ``d_n``.  The tail bound follows from ``envelope``, fitted
    to the stored ``d_n`` when not supplied.  When a spectral point is
    available (from ``u`` or ``spectral_point``) the completed value is
    attached as well.

    Raises:
        ConvergenceRegionError: ``Re s <= sigma_abs``; no continuation of the
            series to the left of the absolute-convergence region is provided.
        LSeriesError: ``upto`` exceeds the stored data.
    """
    s = complex(s)
    if not s.real > sigma_abs:
        raise ConvergenceRegionError(
            f"Re(s) = {s.real} is not in the absolute-convergence region Re(s) > {sigma_abs}; "
            "values further left need an analytic continuation, which this package does not provide"
        )
    if isinstance(series, ConvolutionSeries):
        if u is None:
            raise LSeriesError("a Maass form is needed to build d_n", code="lseries.missing_maass")
        d_all = series.d_array(u)
    else:
        d_all = np.asarray(series, dtype=float)
    if upto < 1 or upto > d_all.size:
        raise LSeriesError(f"upto must be in 1..{d_all.size}", code="lseries.range")
    if envelope is None:
        envelope = Envelope.fit(d_all)
    elif envelope.violated_by(d_all):
        warnings.warn("stored d_n violate the supplied growth envelope", GrowthWarning, stacklevel=2)
    d = d_all[:upto]
    raw = _partial_sum(d, s)
    bound = envelope.tail(upto, s.real)
    sp = spectral_point if spectral_point is not None else (u.spectral_point if u is not None else None)
    completed = None
    if sp is not None:
        completed = raw * gamma_prefactor(s, sp)
    return LSeriesValue(s, raw, completed, bound, upto, envelope)


def _check_prefactor_poles(s: complex, s_j: complex):
    for base, label in ((s + s_j - 1.0, "Gamma(s + s_j - 1)"), (s - s_j, "Gamma(s - s_j)")):
        k = round(-base.real)
        if k >= 0 and abs(base + k) < POLE_DISTANCE:
            raise LSeriesError(
                f"s = {s} is within {POLE_DISTANCE} of a pole of {label}", code="lseries.prefactor_pole"
            )


def gamma_prefactor(s, s_j: SpectralPoint | complex) -> complex:
    """``(4 pi)^{-s} Gamma(s + s_j - 1) Gamma(s - s_j) / Gamma(s)``.

    Raises:
        LSeriesError: ``lseries.prefactor_pole`` within ``1e-6`` of a pole.
    """
    s = complex(s)
    sj = s_j.s if isinstance(s_j, SpectralPoint) else complex(s_j)
    _check_prefactor_poles(s, sj)
    logs = -s * math.log(4.0 * math.pi) + log_gamma(s + sj - 1.0) + log_gamma(s - sj)
    return cmath.exp(logs) * rgamma(s)


def complete(raw, s, s_j: SpectralPoint | complex) -> LSeriesValue:
    """Attach the Gamma completion to a raw value (no tail information: bound 0)."""
    s = complex(s)
    raw = complex(raw)
    pref = gamma_prefactor(s, s_j)
    return LSeriesValue(s, raw, raw * pref, 0.0, 0)


# ---------------------------------------------------------------------------
# Mellin transform of K
# ---------------------------------------------------------------------------

def mellin_bessel_closed(s, nu) -> complex:
    """``sqrt(pi) 2^{1/2 - s} Gamma(s + nu - 1/2) Gamma(s - nu - 1/2) / Gamma(s)``."""
    s, nu = complex(s), complex(nu)
    logs = (
        0.5 * math.log(math.pi)
        + (0.5 - s) * math.log(2.0)
        + log_gamma(s + nu - 0.5)
        + log_gamma(s - nu - 0.5)
    )
    return cmath.exp(logs) * rgamma(s)


def _mellin_line(s: complex, nu: complex, cfg: QuadratureConfig) -> tuple[complex, float]:
    """Quadrature through the integral representation of K.

    Inserting ``K_nu(t) = 1/2 int_R exp(-t cosh w + nu w) dw`` and doing the
    t-integral first leaves

        I = Gamma(s - 1/2) 2^{1/2 - s} / 2 * int_R e^{nu w} cosh(w/2)^{1 - 2s} dw,

    analytic in ``|Im w| < pi``.  The integration line is moved to
    ``Im w = sign(Im nu) (pi - delta)`` where ``|e^{nu w}|`` carries the
    ``exp(-pi |Im nu|)`` size of the result, so the sum has no cancellation;
    ``delta`` balances that gain against the growth of ``cosh(w/2)^{1-2s}``
    near the singularity at ``w = i pi``.
    """
    a, r = nu.real, nu.imag
    sigma = s.real
    p = 2.0 * sigma - 1.0  # |cosh(w/2)|^{1-2s} ~ dist^{-p} near i*pi
    if r == 0.0:
        theta = 0.0
        delta = math.pi
    else:
        delta = min(math.pi / 2, max(p / abs(r), 1e-3))
        theta = math.copysign(math.pi - delta, r)
    # real-direction decay: |e^{nu w}| |cosh(w/2)|^{1-2 sigma} ~ exp((|a| - p/2)|x|)
    rate = p / 2.0 - abs(a)
    if rate <= 0:
        raise LSeriesError("Mellin integral diverges: need Re(s) - 1/2 > |Re nu|", code="lseries.mellin_domain")
    budget = -math.log(cfg.rel_tol) + 10.0
    # scale: value at the point nearest the singularity
    w0 = complex(0.0, theta)
    log_scale = (nu * w0 + (1.0 - 2.0 * s) * cmath.log(cmath.cosh(w0 / 2.0))).real
    span = (budget + abs(log_scale) + 5.0) / rate + abs(s.imag) / rate
    h0 = min(delta, 1.0) / 4.0
    n0 = math.ceil(2.0 * span / h0)

    def integrand(x):
        w = x + 1j * theta
        return np.exp(nu * w + (1.0 - 2.0 * s) * np.log(np.cosh(w / 2.0)) - log_scale)

    val, err, _ = trapezoid_line(integrand, -span, span, n0, cfg)
    pref = cmath.exp(log_gamma(s - 0.5) + (0.5 - s) * math.log(2.0) + log_scale) * 0.5
    return complex(val) * pref, abs(err * pref)


def _mellin_direct(s: complex, nu: complex, cfg: QuadratureConfig) -> tuple[complex, float]:
    """Trapezoid in ``v = log t`` of ``e^{v(s - 1/2)} e^{-e^v} K_nu(e^v)``.

    Accurate while ``exp(pi |Im nu| / 2)`` cancellation is harmless.
    """
    p = s.real - 0.5 - abs(nu.real)
    if p <= 0:
        raise LSeriesError("Mellin integral diverges: need Re(s) - 1/2 > |Re nu|", code="lseries.mellin_domain")
    budget = -math.log(cfg.rel_tol) + 10.0
    lo = -budget / p
    hi = math.log(budget + 10.0)

    def integrand(v):
        t = np.exp(v)
        mant, logs = bessel_k_array(nu, t, cfg, log_scale=True)
        return mant * np.exp(logs + (s - 0.5) * v - t)

    val, err, _ = trapezoid_line(integrand, lo, hi, 256, cfg)
    return complex(val), float(err)


def mellin_bessel_quadrature(s, nu, cfg: QuadratureConfig = DEFAULT_QUADRATURE, *, method: str = "line"):
    """Numerical ``int_0^inf e^{-t} t^{s - 3/2} K_nu(t) dt``; returns ``(value, error_estimate)``.

    ``method="line"`` integrates the Fubini-swapped form on a shifted line
    (robust for large ``|Im nu|``); ``method="direct"`` integrates in ``t``
    with K-Bessel values.
    """
    s, nu = complex(s), complex(nu)
    if not (s + nu).real > 0.5 or not (s - nu).real > 0.5:
        raise LSeriesError("need Re(s +- nu) > 1/2 for convergence", code="lseries.mellin_domain")
    if method == "line":
        return _mellin_line(s, nu, cfg)
    if method == "direct":
        return _mellin_direct(s, nu, cfg)
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class MellinCheck:
    quadrature: complex
    closed_form: complex
    residual: float
    quadrature_error: float


def mellin_bessel_check(s, nu, cfg: QuadratureConfig = DEFAULT_QUADRATURE, *, method: str = "line") -> MellinCheck:
    """Compare the quadrature and closed form of the K-Bessel Mellin integral."""
    quad, err = mellin_bessel_quadrature(s, nu, cfg, method=method)
    closed = mellin_bessel_closed(s, nu)
    return MellinCheck(quad, closed, abs(quad - closed) / abs(closed), err)


# ---------------------------------------------------------------------------
# unfolding identity
# ---------------------------------------------------------------------------

def unfolding_prefactor(l: int, s) -> complex:
    """``(2 pi i)^{-l} 2^{1 - 2s} pi^{1 - s}``; equals ``-2^{-(2s+1)} pi^{-(s+1)}`` at ``l = 2``.

    ``(2 pi i)^{-l}`` comes from the Eichler-integral coefficients, and
    ``(2 pi)^{1/2 - s}`` from rescaling ``y`` to ``t = 2 pi n y``; together
    with ``sqrt(pi) 2^{1/2 - s}`` of the Mellin closed form they give
    ``2^{1 - 2s} pi^{1 - s}``.
    """
    s = complex(s)
    return (2j * math.pi) ** (-l) * cmath.exp((1.0 - 2.0 * s) * math.log(2.0) + (1.0 - s) * math.log(math.pi))


@dataclass(frozen=True)
class UnfoldingReport:
    l: int
    s: complex
    upto: int
    quadrature_side: complex
    closed_side: complex
    residual: float
    quadrature_error: float


def _y_integrals(n: np.ndarray, s: complex, nu: complex, cfg: QuadratureConfig) -> tuple[np.ndarray, np.ndarray]:
    """``J_n = int_0^inf y^{s - 3/2} K_nu(2 pi n y) e^{-2 pi n y} dy`` for each ``n``.

    One trapezoid rule in ``v = log y`` on a grid shared by all ``n``, halved
    until every entry changes by less than ``1e-12`` times its mass.  Each
    ``n`` only evaluates the nodes inside its own support window.
    """
    p = s.real - 0.5 - abs(nu.real)
    if p <= 0:
        raise LSeriesError("y-integral diverges", code="lseries.mellin_domain")
    budget = -math.log(cfg.rel_tol) + 10.0
    two_pi_n = 2.0 * math.pi * n.astype(float)
    lo_n = -budget / p - np.log(two_pi_n)
    hi_n = np.log((budget + 10.0) / two_pi_n)
    lo, hi = float(lo_n.min()), float(hi_n.max())

    def values(v):
        y = np.exp(v)
        x = np.outer(two_pi_n, y)
        inside = (v[None, :] >= lo_n[:, None]) & (v[None, :] <= hi_n[:, None])
        out = np.zeros(x.shape, dtype=complex)
        mant, logs = bessel_k_array(nu, x[inside], cfg, log_scale=True)
        vv = np.broadcast_to(v[None, :], x.shape)[inside]
        out[inside] = mant * np.exp(logs + (s - 0.5) * vv - x[inside])
        return out

    # oscillation y^{+-i Im nu} y^{i Im s} sets the starting step
    h_start = min(0.25, 1.0 / (abs(nu.imag) + abs(s.imag) + 1.0))
    count = max(64, math.ceil((hi - lo) / h_start))
    h = (hi - lo) / count
    vals = values(lo + h * np.arange(count + 1))
    acc = vals.sum(axis=1) - 0.5 * (vals[:, 0] + vals[:, -1])
    mass = np.abs(vals).sum(axis=1)
    prev = h * acc
    while True:
        if 2 * count > cfg.max_nodes:
            raise LSeriesError("y-quadrature did not converge", code="lseries.quadrature")
        mv = values(lo + h * (np.arange(count) + 0.5))
        acc = acc + mv.sum(axis=1)
        mass = mass + np.abs(mv).sum(axis=1)
        count *= 2
        h *= 0.5
        cur = h * acc
        err = np.abs(cur - prev)
        if np.all(err <= 1e-12 * h * mass):
            return cur, err
        prev = cur


def unfolding_check(
    f: HolomorphicCuspForm,
    u: MaassFormData,
    l: int,
    s,
    upto: int,
    *,
    sigma_abs: float = SIGMA_ABS,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    workers: int = 1,
) -> UnfoldingReport:
    """Compare the unfolded integral, computed term by term, with its closed form.

    Quadrature side: ``(2 pi i)^{-l} sum_n d_n J_n`` with each ``J_n`` a
    numerical y-integral of the Bessel kernel (the x-integral having reduced
    to the convolution coefficient).  Closed side: the completed partial sum
    ``unfolding_prefactor(l, s) Gamma(s+s_j-1) Gamma(s-s_j)/Gamma(s) L(s)``
    over the same ``n <= upto``.  Both vanish identically when all ``d_n``
    do, in which case the residual is reported as 0.
    """
    s = complex(s)
    if l < 1:
        raise LSeriesError("power l must be >= 1", code="lseries.power")
    if not s.real > sigma_abs:
        raise ConvergenceRegionError(f"Re(s) = {s.real} must exceed {sigma_abs}")
    series = convolution_coefficients(f, l, upto)
    d = series.d_array(u, upto)
    nu = complex(0.0, u.r)

    idx = np.flatnonzero(d) + 1
    if idx.size == 0:
        return UnfoldingReport(l, s, upto, 0j, 0j, 0.0, 0.0)
    chunks = np.array_split(idx, max(1, min(workers, idx.size)))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda c: _y_integrals(c, s, nu, cfg), chunks))
    else:
        parts = [_y_integrals(c, s, nu, cfg) for c in chunks]
    j_vals = np.concatenate([p[0] for p in parts])
    j_err = np.concatenate([p[1] for p in parts])
    weights = d[idx - 1]
    quad = (2j * math.pi) ** (-l) * complex(np.sum(weights * j_vals))
    quad_err = float((2 * math.pi) ** (-l) * np.sum(np.abs(weights) * j_err))

    lval = evaluate(d, None, s, upto, sigma_abs=sigma_abs)
    sj = u.spectral_point.s
    _check_prefactor_poles(s, sj)
    ratio = cmath.exp(log_gamma(s + sj - 1.0) + log_gamma(s - sj)) * rgamma(s)
    closed = unfolding_prefactor(l, s) * ratio * lval.raw
    resid = abs(quad - closed) / abs(closed)
    return UnfoldingReport(l, s, upto, quad, closed, resid, quad_err)
