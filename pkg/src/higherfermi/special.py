"""Complex special functions: log-gamma, K-Bessel of complex order, zeta and xi.

All routines work in IEEE double precision.  Complex arguments are plain
Python ``complex`` numbers; anything accepted by ``complex()`` may be passed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import OverflowError_, PoleError, QuadratureError, UnderflowError

__all__ = [
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "log_gamma",
    "gamma",
    "rgamma",
    "bessel_k",
    "bessel_k_scaled",
    "bessel_k_array",
    "zeta",
    "xi",
    "sinpi",
    "trapezoid_line",
]


@dataclass(frozen=True)
class QuadratureConfig:
    """Budget and tolerances shared by the quadrature routines.

    ``rel_tol`` is measured against the L1 mass of the integrand, which is the
    scale a double-precision sum can actually resolve.
    """

    max_nodes: int = 1 << 17
    abs_tol: float = 1e-300
    rel_tol: float = 1e-14

    def __post_init__(self):
        if self.max_nodes < 16:
            raise ValueError("max_nodes must be at least 16")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("abs_tol and rel_tol must be positive")


DEFAULT_QUADRATURE = QuadratureConfig()


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

# Lanczos approximation, g = 671/128, 14 terms.
_LANCZOS_G = 671.0 / 128.0
_LANCZOS_C0 = 0.999999999999997092
_LANCZOS_COEF = (
    57.1562356658629235,
    -59.5979603554754912,
    14.1360979747417471,
    -0.491913816097620199,
    0.339946499848118887e-4,
    0.465236289270485756e-4,
    -0.983744753048795646e-4,
    0.158088703224912494e-3,
    -0.210264441724104883e-3,
    0.217439618115212643e-3,
    -0.164318106536763890e-3,
    0.844182239838527433e-4,
    -0.261908384015814087e-4,
    0.368991826595316234e-5,
)
_SQRT_2PI = 2.5066282746310005


def _log_gamma_lanczos(z: complex) -> complex:
    # valid for Re z >= 1/2
    t = z + _LANCZOS_G
    head = (z + 0.5) * cmath.log(t) - t
    ser = _LANCZOS_C0
    y = z
    for c in _LANCZOS_COEF:
        y += 1.0
        ser += c / y
    return head + cmath.log(_SQRT_2PI * ser / z)


def _is_nonpositive_integer(z: complex) -> bool:
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def log_gamma(z) -> complex:
    """Log-gamma on the standard branch (continuous off the negative real axis).

    For ``Re z < 1/2`` the argument is shifted up with the recurrence
    ``Gamma(z) = Gamma(z + k) / (z (z+1) ... (z+k-1))``.  The product is formed
    first and a single logarithm taken, with the branch fixed by the summed
    arguments; this keeps ``exp(log_gamma(z))`` within ~1e-13 of Gamma(z) for
    ``|z| <= 50``.

    Raises:
        PoleError: ``z`` is a non-positive integer.
    """
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"non-finite argument {z!r}")
    if _is_nonpositive_integer(z):
        raise PoleError(f"Gamma has a pole at {z.real:g}", code="special.gamma_pole")
    if z.real >= 0.5:
        return _log_gamma_lanczos(z)
    k = math.ceil(0.5 - z.real)
    prod = 1.0 + 0.0j
    arg_sum = 0.0
    for j in range(k):
        w = z + j
        prod *= w
        arg_sum += cmath.phase(w)
    lp = cmath.log(prod)
    wraps = round((arg_sum - lp.imag) / (2.0 * math.pi))
    lp = complex(lp.real, lp.imag + 2.0 * math.pi * wraps)
    return _log_gamma_lanczos(z + k) - lp


def gamma(z) -> complex:
    lg = log_gamma(z)
    if lg.real > 709.0:
        raise OverflowError_(f"Gamma({z}) overflows double precision")
    return cmath.exp(lg)


def rgamma(z) -> complex:
    """1/Gamma(z); entire, so returns 0 at the poles of Gamma."""
    z = complex(z)
    if _is_nonpositive_integer(z):
        return 0.0j
    return cmath.exp(-log_gamma(z))


# ---------------------------------------------------------------------------
# Trapezoid rule on a (shifted) line
# ---------------------------------------------------------------------------

def trapezoid_line(f, lo: float, hi: float, n0: int, cfg: QuadratureConfig = DEFAULT_QUADRATURE):
    """Trapezoid rule on ``[lo, hi]`` with step halving until convergence.

    ``f`` maps a real numpy array of nodes to complex values and must be
    negligible at both ends (the end-point weights are kept for safety).
    Returns ``(integral, error_estimate, nodes_used)``.

    Raises:
        QuadratureError: ``cfg.max_nodes`` exhausted before the estimate
            met ``max(abs_tol, rel_tol * mass)``.
    """
    n = max(16, int(n0))
    if n > cfg.max_nodes:
        n = cfg.max_nodes // 2
    t = np.linspace(lo, hi, n + 1)
    vals = f(t)
    h = (hi - lo) / n
    acc = vals.sum() - 0.5 * (vals[0] + vals[-1])
    mass = np.abs(vals).sum()
    prev = h * acc
    while True:
        if 2 * n > cfg.max_nodes:
            raise QuadratureError(
                f"trapezoid did not converge within {cfg.max_nodes} nodes "
                f"(last change {abs(prev):.3e})"
            )
        mid = lo + (np.arange(n) + 0.5) * h
        mv = f(mid)
        acc += mv.sum()
        mass += np.abs(mv).sum()
        n *= 2
        h *= 0.5
        cur = h * acc
        err = abs(cur - prev)
        if err <= max(cfg.abs_tol, cfg.rel_tol * h * mass):
            return cur, err, n
        prev = cur


# ---------------------------------------------------------------------------
# K-Bessel
# ---------------------------------------------------------------------------

_LOG_LOSS = 2.3  # accepted cancellation, log(10)


def _shift_depth(r: float, x: float) -> float:
    """Distance delta of the integration line below Im t = pi/2.

    The line Im t = pi/2 - delta carries |integrand| <= exp(f(delta)) with
    f(delta) = -x sin(delta) + r delta (times exp(-r pi/2)).  f is minimal at
    delta0 = arccos(min(r/x, 1)); we take the largest delta >= delta0 whose
    cancellation loss f(delta) - f(delta0) stays below _LOG_LOSS, since a
    deeper line decays faster.
    """
    if r == 0.0:
        return math.pi / 2
    d0 = math.acos(min(r / x, 1.0))

    def f(d):
        return -x * math.sin(d) + r * d

    f0 = f(d0)
    if f(math.pi / 2) - f0 <= _LOG_LOSS:
        return math.pi / 2
    lo, hi = d0, math.pi / 2
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if f(mid) - f0 <= _LOG_LOSS:
            lo = mid
        else:
            hi = mid
    return lo


def _bessel_k_log_scaled(nu: complex, x: float, cfg: QuadratureConfig):
    """Return (value, log_scale) with K_nu(x) = value * exp(log_scale)."""
    a, r = nu.real, nu.imag
    # K_nu(x) = 1/2 int_R exp(-x cosh w + nu w) dw, with w = t + i*theta.
    delta = _shift_depth(abs(r), x)
    theta = math.copysign(math.pi / 2 - delta, r) if r != 0.0 else 0.0
    c = math.cos(theta)
    xc = x * c
    # |integrand| = exp(-xc cosh t + a t - r theta); peak where xc sinh t = a
    t_peak = math.asinh(a / xc)
    log_peak = -xc * math.cosh(t_peak) + a * t_peak - r * theta
    budget = -math.log(cfg.rel_tol) + 8.0

    def log_mag(t):
        return -xc * math.cosh(t) + a * t - r * theta

    def edge(sign):
        step = 0.25
        t = t_peak
        while log_mag(t) > log_peak - budget:
            t += sign * step
            step *= 1.25
        return t

    lo, hi = edge(-1.0), edge(1.0)
    # strip of analyticity above the line is delta wide (decay stops at pi/2)
    d = min(max(delta, 1e-3), 1.0)
    h0 = 2.0 * math.pi * d / (budget + (abs(r) + abs(a) + x) * d)
    n0 = math.ceil((hi - lo) / h0)

    def integrand(t):
        w = t + 1j * theta
        return np.exp(-x * np.cosh(w) + nu * w - log_peak)

    val, _, _ = trapezoid_line(integrand, lo, hi, n0, cfg)
    return 0.5 * complex(val), log_peak


def _check_order_argument(nu, x):
    nu = complex(nu)
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise ValueError(f"bessel_k needs x > 0, got {x!r}")
    if abs(nu.imag) > 50.0:
        raise ValueError("bessel_k working range is |Im nu| <= 50")
    return nu, x


def bessel_k_scaled(nu, x: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """exp(x) * K_nu(x); never underflows for x in the working range."""
    nu, x = _check_order_argument(nu, x)
    val, log_scale = _bessel_k_log_scaled(nu, x, cfg)
    out = val * math.exp(log_scale + x)
    return complex(out.real, 0.0) if nu.real == 0.0 or nu.imag == 0.0 else out


def bessel_k(nu, x: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """Modified Bessel function K_nu(x) for complex order and real x > 0.

    Evaluates ``int_0^inf exp(-x cosh t) cosh(nu t) dt`` as a full-line
    integral whose path is moved up to Im t = +-(pi/2 - delta), close to the
    saddle point; on that line the integrand carries no exponential
    cancellation even for imaginary order, where ``|K|`` ~ exp(-pi |Im nu|/2).
    The integrand decays double-exponentially, so the trapezoid rule is used
    directly, halving the step until the change is below
    ``cfg.rel_tol`` times the integrand mass.

    For purely imaginary or real order the (mathematically real) result is
    returned with zero imaginary part.

    Raises:
        QuadratureError: node budget exhausted.
        UnderflowError: ``|K_nu(x)|`` is below the smallest double.
    """
    nu, x = _check_order_argument(nu, x)
    val, log_scale = _bessel_k_log_scaled(nu, x, cfg)
    if val == 0:
        return 0j
    if log_scale + math.log(abs(val)) < -708.0:
        raise UnderflowError(f"K_{nu}({x}) underflows double precision")
    out = val * math.exp(log_scale)
    return complex(out.real, 0.0) if nu.real == 0.0 or nu.imag == 0.0 else out


def _shift_depth_array(r: float, x: np.ndarray) -> np.ndarray:
    """Vectorized :func:`_shift_depth` (same bisection, run on whole arrays)."""
    if r == 0.0:
        return np.full_like(x, math.pi / 2)
    d0 = np.arccos(np.minimum(r / x, 1.0))
    f0 = -x * np.sin(d0) + r * d0
    lo = d0.copy()
    hi = np.full_like(x, math.pi / 2)
    full = (-x + r * math.pi / 2) - f0 <= _LOG_LOSS
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        ok = (-x * np.sin(mid) + r * mid) - f0 <= _LOG_LOSS
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return np.where(full, math.pi / 2, lo)


def _edges_array(a, xc, t_peak, log_peak, rtheta, budget, sign):
    """Point beyond the peak where the integrand has dropped by ``budget``."""

    def log_mag(t):
        return -xc * np.cosh(t) + a * t - rtheta

    thresh = log_peak - budget
    span = np.full_like(xc, 0.25)
    while True:
        high = log_mag(t_peak + sign * span) > thresh
        if not high.any():
            break
        span = np.where(high, 2.0 * span, span)
    lo = np.zeros_like(xc)
    hi = span
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        high = log_mag(t_peak + sign * mid) > thresh
        lo = np.where(high, mid, lo)
        hi = np.where(high, hi, mid)
    return t_peak + sign * hi


def _bessel_k_log_array(nu: complex, x: np.ndarray, cfg: QuadratureConfig):
    a, r = nu.real, nu.imag
    delta = _shift_depth_array(abs(r), x)
    theta = np.copysign(math.pi / 2 - delta, r) if r != 0.0 else np.zeros_like(x)
    xc = x * np.cos(theta)
    t_peak = np.arcsinh(a / xc)
    log_peak = -xc * np.cosh(t_peak) + a * t_peak - r * theta
    budget = -math.log(cfg.rel_tol) + 8.0
    lo = _edges_array(a, xc, t_peak, log_peak, r * theta, budget, -1.0)
    hi = _edges_array(a, xc, t_peak, log_peak, r * theta, budget, 1.0)
    d = np.clip(delta, 1e-3, 1.0)
    h0 = 2.0 * math.pi * d / (budget + (abs(r) + abs(a) + x) * d)
    n = max(16, int(np.ceil(((hi - lo) / h0).max())))
    width = (hi - lo)[:, None]

    def block(k):
        t = lo[:, None] + width * (k[None, :] / n_cur)
        w = t + 1j * theta[:, None]
        return np.exp(-x[:, None] * np.cosh(w) + nu * w - log_peak[:, None])

    # the exponent -x cosh(w) carries rounding ~ eps * x, a floor no node count removes
    tol = np.maximum(cfg.rel_tol, 16.0 * np.finfo(float).eps * (1.0 + x + abs(nu)))
    n_cur = n
    vals = block(np.arange(n_cur + 1, dtype=float))
    acc = vals.sum(axis=1) - 0.5 * (vals[:, 0] + vals[:, -1])
    mass = np.abs(vals).sum(axis=1)
    prev = acc / n_cur
    while True:
        if 2 * n_cur > cfg.max_nodes:
            raise QuadratureError(f"K-Bessel array quadrature did not converge within {cfg.max_nodes} nodes")
        mv = block(np.arange(n_cur, dtype=float) + 0.5)
        acc = acc + mv.sum(axis=1)
        mass = mass + np.abs(mv).sum(axis=1)
        n_cur *= 2
        cur = acc / n_cur
        if np.all(np.abs(cur - prev) <= tol * mass / n_cur):
            return 0.5 * cur * width[:, 0], log_peak
        prev = cur


def bessel_k_array(nu, x, cfg: QuadratureConfig = DEFAULT_QUADRATURE, *, log_scale: bool = False):
    """K_nu at many arguments for one order; the vectorized twin of :func:`bessel_k`.

    Every argument gets its own shifted integration line and interval, and a
    shared node count that is doubled until all entries have converged.  With
    ``log_scale=True`` the pair ``(mantissa, log_scale)`` is returned so that
    values below the double range stay usable; otherwise an underflowing
    entry raises :class:`UnderflowError`.
    """
    nu = complex(nu)
    if abs(nu.imag) > 50.0:
        raise ValueError("bessel_k working range is |Im nu| <= 50")
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if xs.size == 0:
        empty = np.zeros(0, dtype=complex)
        return (empty, np.zeros(0)) if log_scale else empty
    if not np.all(np.isfinite(xs)) or np.any(xs <= 0.0):
        raise ValueError("bessel_k needs x > 0")
    flat = xs.ravel()
    mant = np.empty(flat.size, dtype=complex)
    logs = np.empty(flat.size)
    chunk = 1024
    for i in range(0, flat.size, chunk):
        mant[i:i + chunk], logs[i:i + chunk] = _bessel_k_log_array(nu, flat[i:i + chunk], cfg)
    if nu.real == 0.0 or nu.imag == 0.0:
        mant = mant.real + 0j
    mant = mant.reshape(xs.shape)
    logs = logs.reshape(xs.shape)
    if log_scale:
        return mant, logs
    with np.errstate(divide="ignore"):
        total = logs + np.log(np.abs(mant))
    if np.any((total < -708.0) & (mant != 0)):
        raise UnderflowError(f"K_{nu} underflows double precision for some arguments")
    return mant * np.exp(logs)


def sinpi(z) -> complex:
    """sin(pi z) with exact reduction of the real part to [-1/2, 1/2]."""
    z = complex(z)
    k = round(z.real)
    val = cmath.sin(math.pi * complex(z.real - k, z.imag))
    return -val if k % 2 else val


# ---------------------------------------------------------------------------
# Zeta and xi
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _bernoulli_even(count: int) -> tuple:
    """B_2, B_4, ..., B_{2*count} as floats (Akiyama-Tanigawa, exact)."""
    nmax = 2 * count
    a = [Fraction(0)] * (nmax + 1)
    out = []
    for m in range(nmax + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        if m >= 2 and m % 2 == 0:
            out.append(a[0])
    return tuple(float(b) for b in out)


@lru_cache(maxsize=None)
def _em_coefficients(count: int) -> tuple:
    b = _bernoulli_even(count)
    return tuple(b[k - 1] / math.factorial(2 * k) for k in range(1, count + 1))


_EM_TERMS = 40


def _zeta_times_sm1(s: complex):
    """Return ((s-1)*zeta(s), remainder bound) by Euler-Maclaurin."""
    coef = _em_coefficients(_EM_TERMS)
    sigma = s.real
    n_cut = max(16, int(abs(s) / math.pi) + 12)
    while True:
        n = np.arange(1, n_cut, dtype=float)
        head = complex(np.sum(np.exp(-s * np.log(n))))
        log_n = math.log(n_cut)
        np_s = cmath.exp(-s * log_n)  # N^{-s}
        sm1 = s - 1.0
        total = sm1 * (head + 0.5 * np_s) + n_cut * np_s
        # sum_k B_2k/(2k)! s(s+1)...(s+2k-2) N^{-s-2k+1}
        rising = s
        power = np_s / n_cut
        corr = 0.0j
        bound = math.inf
        for k in range(1, _EM_TERMS + 1):
            term = coef[k - 1] * rising * power
            corr += term
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            power /= n_cut * n_cut
            if k < _EM_TERMS and sigma + 2 * k + 1 > 0:
                nxt = abs(coef[k] * rising * power)
                bound = nxt * abs(s + 2 * k + 1) / (sigma + 2 * k + 1)
                if bound < 1e-17 * max(abs(head), 1e-300):
                    break
        value = total + sm1 * corr
        if bound < 1e-16 * max(abs(head), 1e-300) or n_cut > 1 << 16:
            return value, abs(sm1) * bound
        n_cut *= 2


def zeta(s) -> complex:
    """Riemann zeta by Euler-Maclaurin summation.

    The cut-off grows with ``|s|`` and the Bernoulli tail is summed until the
    standard remainder bound is below 1e-16 relative to the head sum.
    Intended range is ``|Im s| <= 50``; real parts down to about -30 are fine.

    Raises:
        PoleError: ``s == 1``.
    """
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1", code="special.zeta_pole")
    if s.real < -0.5:
        # head sum cancels badly for Re s < 0; reflect instead
        w = 1.0 - s
        return (
            cmath.exp(s * math.log(2.0) + (s - 1.0) * math.log(math.pi) + log_gamma(w))
            * sinpi(s / 2.0)
            * zeta(w)
        )
    value, _ = _zeta_times_sm1(s)
    return value / (s - 1.0)


def xi(s) -> complex:
    """Entire completed zeta, xi(s) = s(s-1)/2 * pi^(-s/2) Gamma(s/2) zeta(s).

    Written as ``(s-1) zeta(s) * pi^(-s/2) Gamma(s/2 + 1)`` so that neither
    s = 0 nor s = 1 is special.  At the trivial zeros s = -2, -4, ... the
    Gamma factor has poles; there the value is taken from xi(1 - s).
    """
    s = complex(s)
    half = s / 2.0 + 1.0
    if _is_nonpositive_integer(half):
        return xi(1.0 - s)
    if s.real < -0.5:
        sm1_zeta = (s - 1.0) * zeta(s)  # reflected zeta, the direct sum cancels here
    else:
        sm1_zeta, _ = _zeta_times_sm1(s)
    return sm1_zeta * cmath.exp(log_gamma(half) - (s / 2.0) * math.log(math.pi))
