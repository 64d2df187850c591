"""Fourier-coefficient models for holomorphic cusp forms, Eichler integrals and Maass forms.

Coefficient files are plain text::

    # type=maass level=1 r=9.5336952613535575543 parity=odd
    1 1
    2 -1.0683335512235690
    ...

with consecutive indices starting at 1.  Holomorphic files omit ``r`` and
``parity``; their values may be integers, fractions ``p/q`` or floats.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from pathlib import Path

import numpy as np

from .errors import CoefficientParseError, FormDataError, GrowthWarning, TruncationWarning, UnderflowError
from .special import DEFAULT_QUADRATURE, QuadratureConfig, bessel_k, bessel_k_array

__all__ = [
    "HolomorphicCuspForm",
    "EichlerIntegral",
    "MaassFormData",
    "SpectralPoint",
    "HeckeAudit",
    "gamma37_form",
    "hecke_extend",
    "hecke_audit",
    "deligne_violations",
    "maass_evaluate",
    "maass_evaluate_naive",
    "maass_tail_bound",
    "ingest_coefficients",
    "write_coefficients",
    "write_coefficients_csv",
    "primes_upto",
    "factorize",
]


# ---------------------------------------------------------------------------
# small number theory helpers
# ---------------------------------------------------------------------------

def primes_upto(n: int) -> list[int]:
    """Primes ``p <= n`` by the sieve of Eratosthenes."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(math.isqrt(n)) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return [int(p) for p in np.flatnonzero(sieve)]


def factorize(n: int) -> list[tuple[int, int]]:
    """Prime factorization of ``n >= 1`` as ``[(p, k), ...]`` in increasing ``p``."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def _is_exact(v) -> bool:
    return isinstance(v, (int, Rational)) and not isinstance(v, bool)


def _same(a, b, rel: float = 1e-9) -> bool:
    if _is_exact(a) and _is_exact(b):
        return a == b
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpectralPoint:
    """Point ``s_j = 1/2 + i r_j`` on the critical line with multiplicity ``m``."""

    r: float
    m: int = 1

    def __post_init__(self):
        if not math.isfinite(self.r):
            raise FormDataError("spectral parameter must be finite", code="forms.spectral")
        if int(self.m) != self.m or self.m < 1:
            raise FormDataError("multiplicity must be a positive integer", code="forms.spectral")

    @property
    def s(self) -> complex:
        return complex(0.5, self.r)

    @classmethod
    def from_s(cls, s, m: int = 1) -> "SpectralPoint":
        s = complex(s)
        if s.real != 0.5:
            raise FormDataError(f"spectral point must have real part 1/2, got {s}", code="forms.spectral")
        return cls(s.imag, m)


@dataclass(frozen=True)
class HolomorphicCuspForm:
    """Weight-2 newform data: level ``N`` and coefficients ``a_1..a_{N_max}``.

    Exact inputs (ints, Fractions) stay exact.  Multiplicativity on coprime
    pairs is checked for every pair whose product is stored.
    """

    level: int
    coeffs: tuple

    def __post_init__(self):
        if int(self.level) != self.level or self.level < 1:
            raise FormDataError("level must be a positive integer", code="forms.level")
        coeffs = tuple(self.coeffs)
        if not coeffs:
            raise FormDataError("at least a_1 is required", code="forms.empty")
        if coeffs[0] != 1:
            raise FormDataError(f"a_1 must be 1 (newform normalization), got {coeffs[0]}", code="forms.normalization")
        object.__setattr__(self, "coeffs", coeffs)
        bad = _multiplicativity_violations(coeffs)
        if bad:
            m, n = bad[0]
            raise FormDataError(
                f"a_{m * n} != a_{m} * a_{n} for coprime {m}, {n}", code="forms.not_multiplicative"
            )

    @property
    def n_max(self) -> int:
        return len(self.coeffs)

    def a(self, n: int):
        if not 1 <= n <= self.n_max:
            raise FormDataError(f"a_{n} not stored (have 1..{self.n_max})", code="forms.missing_coefficient")
        return self.coeffs[n - 1]

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.coeffs])


@dataclass(frozen=True)
class EichlerIntegral:
    """Antiderivative ``F = sum a_n/(2 pi i n) q^n`` of a weight-2 form."""

    base: HolomorphicCuspForm

    @property
    def coeffs(self) -> np.ndarray:
        n = np.arange(1, self.base.n_max + 1)
        return self.base.as_array() / (2j * np.pi * n)

    def weights(self) -> tuple:
        """The real weights ``a_k / k`` that enter convolution sums (exact when possible)."""
        return tuple(
            Fraction(a) / k if _is_exact(a) else a / k for k, a in enumerate(self.base.coeffs, start=1)
        )


@dataclass(frozen=True)
class MaassFormData:
    """Coefficients ``b_1..b_{N_max}`` of a Maass form with spectral parameter ``r``.

    ``b_{-n}`` follows the parity: ``b_n`` for even forms, ``-b_n`` for odd.
    Coefficients larger than ``growth_constant * sqrt(n) * (1 + log n)`` emit a
    :class:`GrowthWarning`.
    """

    r: float
    parity: str
    coeffs: tuple
    source: str = "synthetic"
    growth_constant: float = 10.0
    _b: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise FormDataError("spectral parameter r must be positive", code="forms.spectral")
        if self.parity not in ("even", "odd"):
            raise FormDataError(f"parity must be 'even' or 'odd', got {self.parity!r}", code="forms.parity")
        if self.source not in ("synthetic", "ingested"):
            raise FormDataError("source must be 'synthetic' or 'ingested'", code="forms.source")
        b = np.array([float(v) for v in self.coeffs], dtype=float)
        if b.size == 0:
            raise FormDataError("at least b_1 is required", code="forms.empty")
        if not np.all(np.isfinite(b)):
            raise FormDataError("coefficients must be finite", code="forms.non_finite")
        if b[0] != 1.0:
            raise FormDataError(f"b_1 must be 1 (Hecke normalization), got {b[0]}", code="forms.normalization")
        object.__setattr__(self, "coeffs", tuple(float(v) for v in b))
        object.__setattr__(self, "_b", b)
        n = np.arange(1, b.size + 1)
        envelope = self.growth_constant * np.sqrt(n) * (1.0 + np.log(n))
        over = np.flatnonzero(np.abs(b) > envelope)
        if over.size:
            warnings.warn(
                f"|b_n| exceeds {self.growth_constant} sqrt(n)(1 + log n) at n = {int(over[0]) + 1}",
                GrowthWarning,
                stacklevel=2,
            )

    @property
    def n_max(self) -> int:
        return self._b.size

    @property
    def spectral_point(self) -> SpectralPoint:
        return SpectralPoint(self.r)

    @property
    def sign(self) -> int:
        """``b_{-n} = sign * b_n``."""
        return 1 if self.parity == "even" else -1

    def b(self, n: int) -> float:
        k = abs(n)
        if not 1 <= k <= self.n_max:
            raise FormDataError(f"b_{n} not stored (have 1..{self.n_max})", code="forms.missing_coefficient")
        v = self._b[k - 1]
        return float(v if n > 0 else self.sign * v)

    def b_array(self) -> np.ndarray:
        return self._b.copy()

    def b_minus_array(self) -> np.ndarray:
        """``b_{-n}`` for ``n = 1..N_max``."""
        return self.sign * self._b


# ---------------------------------------------------------------------------
# Hecke relations
# ---------------------------------------------------------------------------

def _multiplicativity_violations(coeffs, limit: int | None = None) -> list[tuple[int, int]]:
    n_max = len(coeffs)
    bad = []
    for m in range(2, n_max + 1):
        if m * (m + 1) > n_max:
            break
        for n in range(m + 1, n_max // m + 1):
            if math.gcd(m, n) == 1 and not _same(coeffs[m * n - 1], coeffs[m - 1] * coeffs[n - 1]):
                bad.append((m, n))
                if limit is not None and len(bad) >= limit:
                    return bad
    return bad


def _prime_power(ap, p: int, k: int, level: int, cache: dict):
    """a_{p^k} from a_p by the weight-2 recurrence (or a_p^k when p | level)."""
    if (p, k) in cache:
        return cache[p, k]
    if k == 0:
        val = 1
    elif k == 1:
        val = ap
    elif level % p == 0:
        val = ap * _prime_power(ap, p, k - 1, level, cache)
    else:
        val = ap * _prime_power(ap, p, k - 1, level, cache) - p * _prime_power(ap, p, k - 2, level, cache)
    cache[p, k] = val
    return val


def hecke_extend(form: HolomorphicCuspForm, primes_upto: int, upto: int) -> HolomorphicCuspForm:
    """Rebuild ``a_1..a_upto`` from the prime coefficients ``a_p``, ``p <= primes_upto``.

    Prime powers use ``a_{p^{k+1}} = a_p a_{p^k} - p a_{p^{k-1}}`` for
    ``p`` not dividing the level and ``a_{p^k} = a_p^k`` otherwise; composite
    indices are products over coprime prime powers.  Every stored value with
    index ``<= upto`` must agree with the rebuilt one.

    Raises:
        FormDataError: ``forms.missing_prime`` when some ``a_p`` is needed but
            not stored or beyond ``primes_upto``; ``forms.hecke_inconsistent``
            (with the offending index in the message and ``.index``) when a
            stored value disagrees.
    """
    if upto < 1:
        raise FormDataError("upto must be positive", code="forms.range")
    cache: dict = {}
    out = [1]
    for n in range(2, upto + 1):
        val = 1
        for p, k in factorize(n):
            if p > primes_upto or p > form.n_max:
                raise FormDataError(
                    f"a_{p} is needed for a_{n} but not available (primes_upto={primes_upto}, stored up to {form.n_max})",
                    code="forms.missing_prime",
                )
            val = val * _prime_power(form.coeffs[p - 1], p, k, form.level, cache)
        if n <= form.n_max and not _same(val, form.coeffs[n - 1]):
            err = FormDataError(
                f"stored a_{n} = {form.coeffs[n - 1]} disagrees with the Hecke value {val}",
                code="forms.hecke_inconsistent",
            )
            err.index = n
            raise err
        out.append(val)
    return HolomorphicCuspForm(form.level, tuple(out))


@dataclass(frozen=True)
class HeckeAudit:
    """Outcome of :func:`hecke_audit`: how many relations were tested and which failed."""

    n_max: int
    coprime_pairs: int
    prime_power_checks: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def hecke_audit(form: HolomorphicCuspForm) -> HeckeAudit:
    """Check every coprime product and prime-power recurrence inside the stored range."""
    c = form.coeffs
    n_max = form.n_max
    violations = []
    pairs = 0
    for m in range(2, n_max + 1):
        if m * (m + 1) > n_max:
            break
        for n in range(m + 1, n_max // m + 1):
            if math.gcd(m, n) == 1:
                pairs += 1
                if not _same(c[m * n - 1], c[m - 1] * c[n - 1]):
                    violations.append(("coprime", m, n))
    powers = 0
    for p in primes_upto(n_max):
        q = p * p
        k = 2
        while q <= n_max:
            powers += 1
            if form.level % p == 0:
                expected = c[p - 1] * c[q // p - 1]
            else:
                expected = c[p - 1] * c[q // p - 1] - p * c[q // (p * p) - 1]
            if not _same(c[q - 1], expected):
                violations.append(("prime_power", p, k))
            q *= p
            k += 1
    return HeckeAudit(n_max, pairs, powers, tuple(violations))


def deligne_violations(form: HolomorphicCuspForm, p_max: int) -> list[int]:
    """Primes ``p <= p_max`` (not dividing the level) with ``|a_p| > 2 sqrt(p)``."""
    return [
        p
        for p in primes_upto(min(p_max, form.n_max))
        if form.level % p and abs(float(form.coeffs[p - 1])) > 2.0 * math.sqrt(p)
    ]


def gamma37_form(upto: int) -> HolomorphicCuspForm:
    """The level-37 newform from the difference of the two theta series."""
    from .qform import phi37_coefficients

    return HolomorphicCuspForm(37, tuple(phi37_coefficients(upto)))


# ---------------------------------------------------------------------------
# Maass evaluation
# ---------------------------------------------------------------------------

def maass_tail_bound(u: MaassFormData, y: float, trunc: int, extra: int = 400) -> float:
    """Upper estimate of the discarded terms ``n > trunc``.

    Uses ``|b_n| <= C sqrt(n)(1 + log n)`` with ``C`` fitted to the stored
    coefficients and ``|K_{ir}(x)| <= K_0(x) <= sqrt(pi/(2x)) e^{-x}``, summing
    ``extra`` terms explicitly and bounding the rest geometrically.
    """
    n = np.arange(1, u.n_max + 1)
    c_fit = float(np.max(np.abs(u._b) / (np.sqrt(n) * (1.0 + np.log(n)))))
    k = np.arange(trunc + 1, trunc + extra + 1, dtype=float)
    x = 2.0 * np.pi * k * y
    terms = 2.0 * c_fit * np.sqrt(k) * (1.0 + np.log(k)) * math.sqrt(y) * np.sqrt(np.pi / (2.0 * x)) * np.exp(-x)
    q = math.exp(-2.0 * math.pi * y)
    # beyond the explicit block the ratio of consecutive terms is below ~q * (1 + 1/k)
    ratio = q * (1.0 + 2.0 / k[-1])
    rest = terms[-1] * ratio / (1.0 - ratio) if ratio < 1.0 else math.inf
    return float(terms.sum() + rest)


def _check_point(z):
    z = complex(z)
    if not z.imag > 0.0:
        raise FormDataError(f"point must lie in the upper half-plane, got {z}", code="forms.domain")
    return z


def maass_evaluate(
    u: MaassFormData,
    z,
    trunc: int,
    *,
    tail_tol: float = 1e-10,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> float:
    """Truncated expansion ``sum_{n<=trunc} b_n sqrt(y) K_{ir}(2 pi n y) trig(2 pi n x)``.

    ``trig`` is ``2 cos`` for even and ``2 sin`` for odd parity.  All Bessel
    values come from one vectorized call and terms are summed in index order.
    A :class:`TruncationWarning` is issued when :func:`maass_tail_bound`
    exceeds ``tail_tol``.
    """
    z = _check_point(z)
    if not 1 <= trunc <= u.n_max:
        raise FormDataError(f"trunc must be in 1..{u.n_max}", code="forms.range")
    x, y = z.real, z.imag
    n = np.arange(1, trunc + 1, dtype=float)
    mant, logs = bessel_k_array(1j * u.r, 2.0 * np.pi * n * y, cfg, log_scale=True)
    kvals = mant.real * np.exp(logs)
    trig = 2.0 * (np.cos(2.0 * np.pi * n * x) if u.parity == "even" else np.sin(2.0 * np.pi * n * x))
    value = float(np.sum(u._b[:trunc] * math.sqrt(y) * kvals * trig))
    tail = maass_tail_bound(u, y, trunc)
    if tail > tail_tol:
        warnings.warn(
            f"estimated truncation tail {tail:.2e} exceeds {tail_tol:.1e} at y = {y}",
            TruncationWarning,
            stacklevel=2,
        )
    return value


def maass_evaluate_naive(u: MaassFormData, z, trunc: int) -> float:
    """Term-by-term reference implementation of :func:`maass_evaluate`."""
    z = _check_point(z)
    total = 0.0
    for k in range(1, trunc + 1):
        try:
            kv = bessel_k(1j * u.r, 2.0 * math.pi * k * z.imag).real
        except UnderflowError:
            kv = 0.0
        angle = 2.0 * math.pi * k * z.real
        trig = 2.0 * math.cos(angle) if u.parity == "even" else 2.0 * math.sin(angle)
        total += u.b(k) * math.sqrt(z.imag) * kv * trig
    return total


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------

_HEADER_KEYS = {"type", "level", "r", "parity"}


def _parse_header(line: str) -> dict:
    if not line.startswith("#"):
        raise CoefficientParseError("missing '# type=...' header", 1, code="forms.header")
    fields = {}
    for tok in line[1:].split():
        key, sep, val = tok.partition("=")
        if not sep or key not in _HEADER_KEYS:
            raise CoefficientParseError(f"bad header token {tok!r}", 1, code="forms.header")
        if key in fields:
            raise CoefficientParseError(f"header key {key!r} repeated", 1, code="forms.header")
        fields[key] = val
    kind = fields.get("type")
    if kind not in ("maass", "holomorphic"):
        raise CoefficientParseError("header needs type=maass or type=holomorphic", 1, code="forms.header")
    try:
        fields["level"] = int(fields["level"])
    except (KeyError, ValueError):
        raise CoefficientParseError("header needs an integer level=", 1, code="forms.header") from None
    if kind == "maass":
        try:
            fields["r"] = float(fields["r"])
        except (KeyError, ValueError):
            raise CoefficientParseError("maass header needs a numeric r=", 1, code="forms.header") from None
        if fields.get("parity") not in ("even", "odd"):
            raise CoefficientParseError("maass header needs parity=even or parity=odd", 1, code="forms.header")
    elif "r" in fields or "parity" in fields:
        raise CoefficientParseError("r= and parity= apply to maass files only", 1, code="forms.header")
    return fields


def _parse_value(text: str, exact: bool, lineno: int):
    try:
        if exact:
            if "/" in text:
                return Fraction(text)
            try:
                return int(text)
            except ValueError:
                pass
        val = float(text)
    except (ValueError, ZeroDivisionError):
        raise CoefficientParseError(f"non-numeric value {text!r}", lineno, code="forms.non_numeric") from None
    if not math.isfinite(val):
        raise CoefficientParseError(f"non-finite value {text!r}", lineno, code="forms.non_numeric")
    return val


def ingest_coefficients(path) -> MaassFormData | HolomorphicCuspForm:
    """Read a coefficient file (format in the module docstring).

    Raises:
        CoefficientParseError: malformed header, non-numeric entries, or
            indices that are not ``1, 2, 3, ...`` (message names the line).
        FormDataError: the parsed data violates a type invariant, for example
            ``b_1 != 1``.
    """
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise CoefficientParseError("empty file", 1, code="forms.header")
    header = _parse_header(lines[0].strip())
    exact = header["type"] == "holomorphic"
    values = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise CoefficientParseError(f"expected 'n value', got {line!r}", lineno, code="forms.syntax")
        try:
            n = int(parts[0])
        except ValueError:
            raise CoefficientParseError(f"non-numeric index {parts[0]!r}", lineno, code="forms.non_numeric") from None
        expected = len(values) + 1
        if n != expected:
            if n < expected:
                what = "duplicate" if n == expected - 1 else "decreasing"
                raise CoefficientParseError(f"{what} index {n}", lineno, code="forms.index_order")
            raise CoefficientParseError(f"index {n} skips {expected}", lineno, code="forms.index_order")
        values.append(_parse_value(parts[1], exact, lineno))
    if not values:
        raise CoefficientParseError("no coefficients after the header", len(lines), code="forms.empty")
    if exact:
        return HolomorphicCuspForm(header["level"], tuple(values))
    return MaassFormData(header["r"], header["parity"], tuple(values), source="ingested")


def _header_for(obj) -> str:
    if isinstance(obj, MaassFormData):
        return f"# type=maass level=1 r={obj.r!r} parity={obj.parity}"
    return f"# type=holomorphic level={obj.level}"


def write_coefficients(obj: MaassFormData | HolomorphicCuspForm, path) -> None:
    """Write ``obj`` in the text format read by :func:`ingest_coefficients`.

    Maass data carries no level of its own and is written with ``level=1``.
    """
    rows = [_header_for(obj)]
    rows += [f"{n} {v!r}" if isinstance(v, float) else f"{n} {v}" for n, v in enumerate(obj.coeffs, start=1)]
    Path(path).write_text("\n".join(rows) + "\n")


def write_coefficients_csv(obj: MaassFormData | HolomorphicCuspForm, path) -> None:
    """CSV twin of :func:`write_coefficients`: header comment, ``n,value`` rows."""
    rows = [_header_for(obj), "n,value"]
    rows += [f"{n},{v!r}" if isinstance(v, float) else f"{n},{v}" for n, v in enumerate(obj.coeffs, start=1)]
    Path(path).write_text("\n".join(rows) + "\n")
