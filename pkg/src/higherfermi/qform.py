"""Integral quadratic forms, lattice-point counts and theta-series coefficients.

A form is given by an even Gram matrix ``G`` (symmetric, integer, even
diagonal) and ``Q(x) = x^T G x / 2`` takes integer values on Z^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import QuadraticFormError

__all__ = [
    "QuadraticForm",
    "ThetaCoefficients",
    "theta_coefficients",
    "theta_coefficients_naive",
    "phi37_coefficients",
    "GRAM_B",
    "GRAM_C",
    "MAX_UPTO",
]

MAX_UPTO = 10_000

# Level-37 quaternary forms; 1/2 (theta_B - theta_C) spans S_2 of the Fricke group.
GRAM_B = ((2, 1, 0, 1), (1, 8, 1, -3), (0, 1, 10, 2), (1, -3, 2, 12))
GRAM_C = ((4, 1, 2, 1), (1, 4, 1, 0), (2, 1, 6, -2), (1, 0, -2, 20))


def _leading_minors(g: np.ndarray) -> list[int]:
    """Exact leading principal minors via fraction-free elimination."""
    k = g.shape[0]
    m = [[Fraction(int(v)) for v in row] for row in g]
    minors = []
    det = Fraction(1)
    for i in range(k):
        pivot = m[i][i]
        det *= pivot
        minors.append(int(det))
        if pivot == 0:
            minors.extend([0] * (k - i - 1))
            break
        for j in range(i + 1, k):
            f = m[j][i] / pivot
            for l in range(i, k):
                m[j][l] -= f * m[i][l]
    return minors


@dataclass(frozen=True)
class QuadraticForm:
    """Positive-definite even integral quadratic form ``Q(x) = x^T G x / 2``."""

    gram: tuple
    _g: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        g = np.array(self.gram, dtype=np.int64)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise QuadraticFormError("Gram matrix must be square", code="qform.shape")
        if not np.array_equal(g, g.T):
            raise QuadraticFormError("Gram matrix must be symmetric", code="qform.not_symmetric")
        if np.any(np.diag(g) % 2):
            raise QuadraticFormError("Gram matrix must have even diagonal", code="qform.odd_diagonal")
        minors = _leading_minors(g)
        if any(m <= 0 for m in minors):
            raise QuadraticFormError(
                f"Gram matrix is not positive definite (leading minors {minors})",
                code="qform.not_positive_definite",
            )
        object.__setattr__(self, "gram", tuple(tuple(int(v) for v in row) for row in g))
        object.__setattr__(self, "_g", g)

    @property
    def rank(self) -> int:
        return self._g.shape[0]

    @property
    def determinant(self) -> int:
        return _leading_minors(self._g)[-1]

    def value(self, x) -> int:
        x = np.asarray(x, dtype=np.int64)
        return int(x @ self._g @ x) // 2


@dataclass(frozen=True)
class ThetaCoefficients:
    """Representation numbers r(n) = #{x : Q(x) = n} for n = 0..upto."""

    upto: int
    r: tuple

    def __post_init__(self):
        if len(self.r) != self.upto + 1:
            raise ValueError("need r(0..upto)")
        if self.r[0] != 1 or any(v < 0 for v in self.r):
            raise ValueError("r(0) must be 1 and all counts non-negative")

    def __getitem__(self, n):
        return self.r[n]


def _cholesky_terms(g: np.ndarray):
    """Coefficients q_ii, q_ij with Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2."""
    a = g.astype(float) / 2.0
    k = a.shape[0]
    q = a.copy()
    for i in range(k):
        for j in range(i + 1, k):
            q[j, i] = q[i, j]
            q[i, j] = q[i, j] / q[i, i]
        for j in range(i + 1, k):
            for l in range(j, k):
                q[j, l] -= q[j, i] * q[i, l]
    return q


def theta_coefficients(form: QuadraticForm, upto: int, *, max_points: int = 50_000_000) -> ThetaCoefficients:
    """Count lattice vectors of each norm ``0..upto`` by Fincke-Pohst enumeration.

    The nested coordinate bounds come from a floating-point Cholesky split of
    the form, widened by one on each side so rounding cannot drop a vector;
    every candidate is then checked with exact integer arithmetic.  The last
    coordinate is enumerated in a vectorized block.

    Raises:
        QuadraticFormError: ``upto`` outside ``[0, MAX_UPTO]`` or more than
            ``max_points`` candidates would be visited.
    """
    if not 0 <= upto <= MAX_UPTO:
        raise QuadraticFormError(f"upto must be in [0, {MAX_UPTO}]", code="qform.range")
    g = form._g
    k = form.rank
    q = _cholesky_terms(g)
    counts = np.zeros(upto + 1, dtype=np.int64)
    x = [0] * k
    visited = 0
    bound = float(upto)

    # recurse from the last coordinate down to coordinate 1; coordinate 0 is vectorized
    def recurse(i: int, remaining: float):
        nonlocal visited
        centre = -sum(q[i, j] * x[j] for j in range(i + 1, k))
        span = math.sqrt(max(remaining, 0.0) / q[i, i])
        lo = math.floor(centre - span) - 1
        hi = math.ceil(centre + span) + 1
        if i == 0:
            xs = np.arange(lo, hi + 1, dtype=np.int64)
            visited += xs.size
            if visited > max_points:
                raise QuadraticFormError("enumeration budget exceeded", code="qform.budget")
            pts = np.empty((xs.size, k), dtype=np.int64)
            pts[:, 0] = xs
            for j in range(1, k):
                pts[:, j] = x[j]
            vals = np.einsum("ij,jk,ik->i", pts, g, pts) // 2
            vals = vals[vals <= upto]
            np.add.at(counts, vals, 1)
            return
        for xi in range(lo, hi + 1):
            x[i] = xi
            t = xi - centre
            rem = remaining - q[i, i] * t * t
            if rem < -1.0:
                continue
            recurse(i - 1, rem)
        x[i] = 0

    recurse(k - 1, bound + 1.0)
    return ThetaCoefficients(upto=upto, r=tuple(int(v) for v in counts))


def theta_coefficients_naive(form: QuadraticForm, upto: int) -> ThetaCoefficients:
    """Box scan over ``|x_i| <= m``; slow, used as an independent check.

    ``m`` comes from the smallest eigenvalue of the Gram matrix:
    Q(x) >= lambda_min |x|^2 / 2 >= lambda_min |x|_inf^2 / 2.
    """
    g = form._g
    lam = float(np.linalg.eigvalsh(g.astype(float)).min())
    m = int(math.floor(math.sqrt(2.0 * upto / lam))) + 1
    rng = np.arange(-m, m + 1, dtype=np.int64)
    grids = np.meshgrid(*([rng] * form.rank), indexing="ij")
    pts = np.stack([v.ravel() for v in grids], axis=1)
    vals = np.einsum("ij,jk,ik->i", pts, g, pts) // 2
    vals = vals[vals <= upto]
    counts = np.bincount(vals, minlength=upto + 1)
    return ThetaCoefficients(upto=upto, r=tuple(int(v) for v in counts))


def phi37_coefficients(upto: int) -> list[int]:
    """Fourier coefficients a_1..a_upto of 1/2 (theta_B - theta_C).

    Raises:
        QuadraticFormError: a difference r_B(n) - r_C(n) is odd (cannot happen
            for the genuine forms; guards against a broken enumerator).
    """
    if upto < 1:
        raise QuadraticFormError("upto must be positive", code="qform.range")
    rb = theta_coefficients(QuadraticForm(GRAM_B), upto).r
    rc = theta_coefficients(QuadraticForm(GRAM_C), upto).r
    out = []
    for n in range(1, upto + 1):
        diff = rb[n] - rc[n]
        if diff % 2:
            raise QuadraticFormError(f"r_B({n}) - r_C({n}) = {diff} is odd", code="qform.parity")
        out.append(diff // 2)
    return out
