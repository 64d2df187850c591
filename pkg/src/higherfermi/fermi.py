"""Contour-integral tracking of resonances and the quadratic dissolving tests.

The weighted mean of the singular points inside a circle around ``s_j`` is
read off from

    2 m Re(s_hat - s_j) = -(1 / 2 pi i) * contour integral of (s - s_j) phi'/phi ds,

which for a pole ``rho`` paired with the zero ``1 - conj rho`` gives exactly
``2 (Re rho - 1/2)``.  Derivatives in the perturbation parameter come from
central finite differences with one Richardson step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ContourError, FermiError
from .forms import SpectralPoint
from .scatter import ScatteringModel, TrajectorySpec, phi_log_derivative

__all__ = [
    "ContourSpec",
    "ResidueVector",
    "HessianMatrix",
    "TaylorCone",
    "EpsDerivatives",
    "GoldenRuleReport",
    "ConeReport",
    "contour_integral",
    "count_singular",
    "weighted_mean_re",
    "fd_weights",
    "fd_derivatives",
    "eps_derivatives",
    "golden_rule_check",
    "hessian",
    "parity_of_D",
    "parity_sparsity",
    "cone_check",
]

WINDING_TOLERANCE = 0.05
MAX_ORDER = 8


# ---------------------------------------------------------------------------
# contours
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContourSpec:
    """Circle ``|s - center| = radius`` sampled at ``nodes`` equispaced points."""

    center: complex
    radius: float
    nodes: int = 256

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise ContourError("radius must be positive", code="fermi.contour_spec")
        if self.nodes < 64:
            raise ContourError("a contour needs at least 64 nodes", code="fermi.contour_spec")

    def points(self) -> np.ndarray:
        theta = 2.0 * np.pi * np.arange(self.nodes) / self.nodes
        return self.center + self.radius * np.exp(1j * theta)

    def doubled(self) -> "ContourSpec":
        return ContourSpec(self.center, self.radius, 2 * self.nodes)

    def contains(self, z: complex) -> bool:
        return abs(z - self.center) < self.radius


def contour_integral(g, contour: ContourSpec) -> complex:
    """``(1 / 2 pi i) * contour integral of g(s) ds`` by the periodic trapezoid rule."""
    pts = contour.points()
    vals = np.array([g(complex(p)) for p in pts])
    # ds = i (s - c) dtheta, so (1/2 pi i) ds = (s - c) dtheta / (2 pi)
    return complex(np.sum(vals * (pts - contour.center)) / contour.nodes)


def _check_proximity(model: ScatteringModel, contour: ContourSpec, eps: float):
    sing = model.singular_points(eps)
    if sing is None:
        return
    gap = contour.radius / contour.nodes
    for z in sing[0] + sing[1]:
        if abs(abs(z - contour.center) - contour.radius) <= gap:
            raise ContourError(
                f"singular point {z:.6g} lies within {gap:.2e} of the contour", code="fermi.contour_proximity"
            )


@dataclass(frozen=True)
class WindingResult:
    count: int
    value: complex
    residual: float


def count_singular(model: ScatteringModel, contour: ContourSpec, eps: float = 0.0) -> WindingResult:
    """Zeros minus poles inside the contour, ``(1 / 2 pi i) * integral of phi'/phi``.

    Raises:
        ContourError: a known singular point is too close to the circle, or
            the integral is further than 0.05 from an integer.
    """
    _check_proximity(model, contour, eps)
    val = contour_integral(lambda s: phi_log_derivative(model, s, eps), contour)
    k = round(val.real)
    resid = abs(val - k)
    if resid >= WINDING_TOLERANCE:
        raise ContourError(
            f"winding integral {val:.6g} is not close to an integer (residual {resid:.3g})",
            code="fermi.non_integer_winding",
        )
    return WindingResult(int(k), val, float(resid))


def weighted_mean_re(model: ScatteringModel, s_j: SpectralPoint, contour: ContourSpec, eps: float) -> float:
    """``Re s_hat(eps)`` from the first moment of ``phi'/phi`` around ``s_j``.

    For toy models the prescribed poles are located first: exactly ``m`` of
    them (``rho(eps)`` counted with the multiplicity of ``s_j``) must be inside.

    Raises:
        ContourError: a tracked pole has left the contour or sits on it.
    """
    _check_proximity(model, contour, eps)
    sing = model.singular_points(eps)
    if sing is not None and sing[0]:
        inside = sum(contour.contains(p) for p in sing[0])
        if inside != 1:
            raise ContourError(
                f"{inside} poles inside the contour at eps = {eps}, expected 1", code="fermi.escaped"
            )
    sj = s_j.s
    moment = contour_integral(lambda s: (s - sj) * phi_log_derivative(model, s, eps), contour)
    return sj.real + (-moment.real) / (2.0 * s_j.m)


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

def fd_weights(offsets, order: int) -> np.ndarray:
    """Exact finite-difference weights for derivatives ``0..order`` on integer ``offsets``.

    Solves the Vandermonde system ``sum_j w_j x_j^p / p! = delta_{pk}`` in
    rational arithmetic; row ``k`` holds the weights of the ``k``-th derivative
    (step 1).
    """
    xs = [Fraction(x) for x in offsets]
    npts = len(xs)
    if order >= npts:
        raise FermiError("stencil too small for the requested order", code="fermi.stencil")
    mat = [[x**p / math.factorial(p) for x in xs] for p in range(npts)]
    out = np.zeros((order + 1, npts))
    for k in range(order + 1):
        rhs = [Fraction(int(p == k)) for p in range(npts)]
        a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
        for col in range(npts):
            piv = next(r for r in range(col, npts) if a[r][col] != 0)
            a[col], a[piv] = a[piv], a[col]
            for r in range(npts):
                if r != col and a[r][col] != 0:
                    f = a[r][col] / a[col][col]
                    a[r] = [x - f * y for x, y in zip(a[r], a[col])]
        out[k] = [float(a[i][npts] / a[i][i]) for i in range(npts)]
    return out


@dataclass(frozen=True)
class EpsDerivatives:
    """Derivative estimates ``values[k] ~ d^k f / d eps^k (0)`` with error estimates."""

    values: tuple
    errors: tuple
    h: float
    half_width: int


def fd_derivatives(func, order: int, h: float, *, tol: float = 1e-6) -> EpsDerivatives:
    """Central differences at steps ``h`` and ``h/2`` and one Richardson step.

    The stencil ``-M..M`` with ``M = order // 2 + 2`` is exact for polynomials
    of degree ``2M``.  ``func`` may return real or complex values.

    Raises:
        FermiError: order above 8, or a Richardson error estimate above
            ``10 * tol * max(1, |value|)``.
    """
    if not 0 <= order <= MAX_ORDER:
        raise FermiError(f"order must be in 0..{MAX_ORDER}", code="fermi.order")
    half = order // 2 + 2
    offsets = list(range(-half, half + 1))
    w = fd_weights(offsets, order)
    samples = {}

    def sample(x: float):
        if x not in samples:
            samples[x] = func(x)
        return samples[x]

    def estimate(step):
        vals = np.array([sample(o * step) for o in offsets])
        return [complex(np.dot(w[k], vals)) / step**k for k in range(order + 1)]

    coarse = estimate(h)
    fine = estimate(h / 2.0)
    values, errors = [], []
    for k in range(order + 1):
        # symmetric stencil: error expansion in even powers, leading order 2M + 2 - 2 ceil(k/2)
        q = 2 * half + 2 - 2 * ((k + 1) // 2)
        rich = fine[k] + (fine[k] - coarse[k]) / (2.0**q - 1.0)
        err = abs(fine[k] - coarse[k]) / (2.0**q - 1.0)
        if err > 10.0 * tol * max(1.0, abs(rich)):
            raise FermiError(
                f"order-{k} Richardson estimates disagree (error {err:.2e})", code="fermi.extrapolation"
            )
        values.append(rich.real if all(np.isrealobj(v) for v in samples.values()) else rich)
        errors.append(err)
    return EpsDerivatives(tuple(values), tuple(errors), h, half)


def _default_step(model: ScatteringModel, contour: ContourSpec, half: int, h: float | None) -> float:
    if h is not None:
        return h
    h = model.eps_max / half
    while h > 1e-6:
        far = [abs(model.rho(x) - contour.center) for x in (half * h, -half * h)]
        if max(far) <= contour.radius / 2.0:
            return h
        h /= 2.0
    raise ContourError("no step keeps the trajectory inside half the contour radius", code="fermi.step")


def eps_derivatives(
    model: ScatteringModel,
    s_j: SpectralPoint,
    contour: ContourSpec,
    order: int,
    h: float | None = None,
    *,
    tol: float = 1e-6,
) -> EpsDerivatives:
    """Derivatives of ``Re s_hat(eps)`` at 0 up to ``order`` (``<= 8``).

    When ``h`` is omitted it is the largest ``eps_max / M / 2^k`` keeping every
    stencil point's pole within half the contour radius of the center.
    """
    half = order // 2 + 2
    step = _default_step(model, contour, half, h)
    return fd_derivatives(lambda e: weighted_mean_re(model, s_j, contour, e), order, step, tol=tol)


# ---------------------------------------------------------------------------
# golden rule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GoldenRuleReport:
    n: int
    re_derivative: float
    re_derivative_error: float
    prescribed_derivative: float
    residue_norm: float
    prescribed_residue_norm: float
    phi_at_sj: complex
    residue_phi_derivative: complex
    residue_phi_derivative_error: float
    odd_derivatives: tuple
    mismatch_real_part: float
    mismatch_residue: float
    h: float


def golden_rule_check(
    traj: TrajectorySpec | ScatteringModel,
    n: int,
    *,
    radius: float = 0.25,
    nodes: int = 256,
    h: float | None = None,
    tol: float = 1e-6,
) -> GoldenRuleReport:
    """Test both order-``2n`` relations on a toy trajectory with ``m = 1``.

    (i) ``Re s_hat^{(2n)}(0)`` from :func:`eps_derivatives` gives the implied
    residue norm ``r = -2 m Re s_hat^{(2n)}(0) / C(2n, n)``.  (ii) The residue
    at ``s_j`` of ``d^{2n} phi / d eps^{2n}`` is the ``2n``-th derivative of
    ``(1/2 pi i) * contour integral of phi(s, eps) ds``, again by finite
    differences.  (iii) It is compared with ``-phi(s_j) C(2n, n) r``, where
    ``phi(s_j)`` at ``eps = 0`` comes from Cauchy's formula.  The
    trajectory's own ``(2n)! Re rho_{2n}`` is reported as the prescribed value.

    Raises:
        FermiError: ``n`` outside 1..4, multiplicity other than 1, a
            trajectory whose real part moves before order ``2n``, or a
            negative implied residue norm.
    """
    model = traj if isinstance(traj, ScatteringModel) else ScatteringModel("blaschke_family", traj)
    t = model.trajectory
    if t is None:
        raise FermiError("golden-rule checks need a toy trajectory", code="fermi.model")
    if not 1 <= n <= MAX_ORDER // 2:
        raise FermiError("n must be in 1..4", code="fermi.order")
    if t.s_j.m != 1:
        raise FermiError("golden-rule checks are implemented for multiplicity 1", code="fermi.multiplicity")
    for k in range(1, 2 * n):
        if t.real_coefficient(k) != 0.0:
            raise FermiError(f"Re rho_{k} must vanish below order {2 * n}", code="fermi.trajectory")
    sj = t.s_j
    contour = ContourSpec(sj.s, radius, nodes)
    order = 2 * n
    d = eps_derivatives(model, sj, contour, order, h, tol=tol)
    binom = math.comb(2 * n, n)
    re_der = float(np.real(d.values[order]))
    r = -2.0 * sj.m * re_der / binom
    if r < -max(tol, 10.0 * d.errors[order]):
        raise FermiError(f"implied residue norm {r:.3e} is negative", code="fermi.negative_norm")
    prescribed = math.factorial(order) * t.real_coefficient(order)
    r_prescribed = -2.0 * sj.m * prescribed / binom

    res = fd_derivatives(lambda e: contour_integral(lambda s: model(s, e), contour), order, d.h, tol=tol)
    res_val = complex(res.values[order])
    phi_sj = contour_integral(lambda s: model(s, 0.0) / (s - sj.s), contour)
    rhs = -phi_sj * binom * r
    scale = max(abs(res_val), abs(rhs))
    mismatch = abs(res_val - rhs) / scale if scale > 0 else 0.0
    scale_re = max(abs(re_der), abs(prescribed))
    mismatch_re = abs(re_der - prescribed) / scale_re if scale_re > 0 else 0.0
    odd = tuple(float(np.real(d.values[k])) for k in range(1, order, 2))
    return GoldenRuleReport(
        n=n,
        re_derivative=re_der,
        re_derivative_error=float(d.errors[order]),
        prescribed_derivative=prescribed,
        residue_norm=r,
        prescribed_residue_norm=r_prescribed,
        phi_at_sj=phi_sj,
        residue_phi_derivative=res_val,
        residue_phi_derivative_error=float(res.errors[order]),
        odd_derivatives=odd,
        mismatch_real_part=mismatch_re,
        mismatch_residue=mismatch,
        h=d.h,
    )


# ---------------------------------------------------------------------------
# Hessian and parity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ResidueVector:
    """Eigenbasis coordinates of one residue; length equals the multiplicity."""

    v: tuple

    def __post_init__(self):
        object.__setattr__(self, "v", tuple(complex(x) for x in self.v))
        if not self.v:
            raise FermiError("residue vector must be non-empty", code="fermi.residue")

    @property
    def norm2(self) -> float:
        return float(sum(abs(x) ** 2 for x in self.v))


@dataclass(frozen=True)
class HessianMatrix:
    """Real symmetric negative semidefinite matrix (eigenvalue slack ``1e-10`` relative)."""

    h: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise FermiError("Hessian must be square", code="fermi.hessian")
        if not np.array_equal(h, h.T):
            raise FermiError("Hessian must be symmetric", code="fermi.hessian")
        if h.size and self.max_eigenvalue_of(h) > 1e-10 * max(1.0, float(np.abs(h).max())):
            raise FermiError("Hessian is not negative semidefinite", code="fermi.hessian")
        object.__setattr__(self, "h", h)

    @staticmethod
    def max_eigenvalue_of(h: np.ndarray) -> float:
        return float(np.linalg.eigvalsh(h).max())

    @property
    def max_eigenvalue(self) -> float:
        return self.max_eigenvalue_of(self.h)


def hessian(residues, m: int) -> HessianMatrix:
    """``h_kl = -(1/m) Re sum_i v_{k,i} conj(v_{l,i})`` over the deformation directions."""
    vecs = [r if isinstance(r, ResidueVector) else ResidueVector(tuple(r)) for r in residues]
    if any(len(r.v) != m for r in vecs):
        raise FermiError(f"every residue vector must have length m = {m}", code="fermi.length")
    v = np.array([r.v for r in vecs], dtype=complex).reshape(len(vecs), m)
    h = -(v @ v.conj().T).real / m
    h = 0.5 * (h + h.T)
    return HessianMatrix(h)


def parity_of_D(parities, powers) -> int:
    """Parity ``prod_l eta_l^{n_l}`` of a mixed derivative of the Eisenstein series."""
    parities, powers = list(parities), list(powers)
    if len(parities) != len(powers):
        raise FermiError("parities and powers must have equal length", code="fermi.length")
    sign = 1
    for eta, k in zip(parities, powers):
        if eta not in (1, -1):
            raise FermiError("parities must be +1 or -1", code="fermi.parity")
        if eta == -1 and k % 2:
            sign = -sign
    return sign


def parity_sparsity(g: int, u_parity, basis_parities=None) -> np.ndarray:
    """Boolean ``2g x 2g`` mask of Hessian entries allowed to be nonzero.

    The default basis has ``g`` odd directions followed by ``g`` even ones.
    A residue in direction ``alpha_k`` vanishes unless its parity matches that
    of ``u_j``, so ``(k, l)`` survives only when both directions do.
    """
    if g < 1:
        raise FermiError("genus must be positive", code="fermi.genus")
    up = {"even": 1, "odd": -1}.get(u_parity, u_parity)
    if up not in (1, -1):
        raise FermiError("u parity must be even/odd or +-1", code="fermi.parity")
    eta = list(basis_parities) if basis_parities is not None else [-1] * g + [1] * g
    if len(eta) != 2 * g:
        raise FermiError("basis parities need 2g entries", code="fermi.length")
    ok = np.array([parity_of_D([e], [1]) == up for e in eta])
    return np.outer(ok, ok)


# ---------------------------------------------------------------------------
# Taylor cone
# ---------------------------------------------------------------------------

def _ipow(x: np.ndarray, n: int) -> np.ndarray:
    """``x**n`` by repeated multiplication, so even powers are bitwise sign-symmetric."""
    out = np.ones_like(x)
    for _ in range(n):
        out = out * x
    return out


@dataclass(frozen=True)
class TaylorCone:
    """Truncated Taylor polynomial ``sum c_{n1,n2} eps1^n1 eps2^n2`` of ``Re s_j - 1/2``."""

    coeffs: dict
    m0: int

    def __post_init__(self):
        clean = {}
        for key, val in dict(self.coeffs).items():
            n1, n2 = (int(k) for k in key)
            if n1 < 0 or n2 < 0:
                raise FermiError("exponents must be non-negative", code="fermi.cone")
            if val != 0:
                clean[(n1, n2)] = float(val)
        object.__setattr__(self, "coeffs", clean)
        if self.m0 < 1:
            raise FermiError("m0 must be positive", code="fermi.cone")
        for (n1, n2), val in clean.items():
            if (n1 + n2) % 2 or n1 % 2:
                raise FermiError(
                    f"c_{{{n1},{n2}}} = {val} breaks the parity pattern (must vanish when n1+n2 or n1 is odd)",
                    code="fermi.parity_pattern",
                )

    def c(self, n1: int, n2: int) -> float:
        return self.coeffs.get((n1, n2), 0.0)

    def __call__(self, e1, e2):
        e1 = np.asarray(e1, dtype=float)
        e2 = np.asarray(e2, dtype=float)
        out = np.zeros(np.broadcast(e1, e2).shape)
        for (n1, n2), val in sorted(self.coeffs.items()):
            out = out + val * _ipow(e1, n1) * _ipow(e2, n2)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "TaylorCone":
        try:
            coeffs = {(int(a), int(b)): float(v) for a, b, v in data["coeffs"]}
            return cls(coeffs, int(data["m0"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FermiError(f"malformed cone description: {exc}", code="fermi.cone") from exc


@dataclass(frozen=True)
class ConeReport:
    radius: float
    b1: float
    b2: float
    all_negative: bool
    max_sampled: float
    region_max: dict
    analytic_bounds: dict
    symmetric: bool
    samples: int


def _analytic_bounds(cone: TaylorCone, b1: float, b2: float, radius: float) -> dict:
    """Term-domination margins per region (positive margin = domination proven)."""
    m0 = cone.m0
    lead1 = abs(cone.c(2 * m0, 0))
    lead2 = abs(cone.c(0, 2))
    others = {k: v for k, v in cone.coeffs.items() if k not in ((0, 2), (2 * m0, 0))}
    # A1: the two axes
    ax1 = sum(abs(v) * radius ** (n1 - 2 * m0) for (n1, n2), v in others.items() if n2 == 0)
    ax2 = sum(abs(v) * radius ** (n2 - 2) for (n1, n2), v in others.items() if n1 == 0)
    # A2: b1 |e1|^m0 < |e2| < min(b2, R); every other term is O(|e2|^e) with e > 2
    top = min(b2, radius)
    a2 = lead1 / b1**2
    for (n1, n2), v in others.items():
        if n1 == 0 and n2 == 0:
            continue
        e = n1 / m0 + n2
        a2 += abs(v) * b1 ** (-n1 / m0) * top ** (e - 2.0)
    # A3: |e2| <= b1 |e1|^m0 inside the ball; everything is O(|e1|^{2 m0 + positive})
    a3 = sum(abs(v) * b1**n2 * radius ** (n1 + m0 * n2 - 2 * m0) for (n1, n2), v in others.items())
    return {
        "A1": {"eps1_axis": ax1, "eps2_axis": ax2, "thresholds": [lead1, lead2],
               "ok": ax1 < lead1 and ax2 < lead2},
        "A2": {"bound": a2, "threshold": lead2, "ok": a2 < lead2},
        "A3": {"bound": a3, "threshold": lead1, "ok": a3 < lead1},
    }


def _cone_samples(cone: TaylorCone, radius: float, b1: float, b2: float, count: int, rng) -> dict:
    m0 = cone.m0
    k = max(count // 4, 8)
    t = np.exp(rng.uniform(np.log(1e-6), 0.0, k)) * radius
    sgn = rng.choice([-1.0, 1.0], k)
    axes = (np.concatenate([t * sgn, np.zeros(k)]), np.concatenate([np.zeros(k), t * sgn]))
    # wedge: e2 = +-b1 |e1|^m0 times a factor in (1, b2 / (b1 |e1|^m0))
    e1 = np.exp(rng.uniform(np.log(1e-6), 0.0, k)) * radius * rng.choice([-1.0, 1.0], k)
    lo = b1 * np.abs(e1) ** m0
    hi = np.minimum(b2, np.sqrt(np.maximum(radius**2 - e1**2, 0.0)))
    keep = hi > lo
    fac = rng.uniform(0.0, 1.0, k)
    e2 = (lo + (hi - lo) * fac) * rng.choice([-1.0, 1.0], k)
    wedge = (e1[keep], e2[keep])
    # the rest of the punctured ball, log-uniform in the radius
    rr = np.exp(rng.uniform(np.log(1e-6), 0.0, 2 * k)) * radius
    ang = rng.uniform(0.0, 2.0 * np.pi, 2 * k)
    f1, f2 = rr * np.cos(ang), rr * np.sin(ang)
    in_wedge = (np.abs(f2) > b1 * np.abs(f1) ** m0) & (np.abs(f2) < b2) & (f1 != 0) & (f2 != 0)
    rest = (f1[~in_wedge], f2[~in_wedge])
    return {"A1": axes, "A2": wedge, "A3": rest}


def cone_check(
    cone: TaylorCone,
    b1: float = 10.0,
    b2: float = 0.1,
    samples: int = 4000,
    *,
    seed: int = 0,
    max_halvings: int = 60,
) -> ConeReport:
    """Find a punctured ball on which the truncated polynomial is negative.

    Starting from ``radius = b2`` the radius is halved until the analytic
    domination bound holds in all three regions; ``b1`` is doubled (up to
    20 times) while the wedge bound cannot hold at any radius.  The
    polynomial is then sampled in every region, and at the sign-flipped
    points to confirm evenness.

    Raises:
        FermiError: ``c_{0,2} >= 0``, ``c_{2 m0, 0} >= 0`` or a nonzero pure
            ``eps1`` coefficient below order ``2 m0`` (``fermi.hypothesis``).
    """
    m0 = cone.m0
    if not cone.c(0, 2) < 0:
        raise FermiError("c_{0,2} must be strictly negative", code="fermi.hypothesis")
    if not cone.c(2 * m0, 0) < 0:
        raise FermiError(f"c_{{{2 * m0},0}} must be strictly negative", code="fermi.hypothesis")
    for k in range(2 * m0):
        if cone.c(k, 0) != 0:
            raise FermiError(f"c_{{{k},0}} must vanish below order {2 * m0}", code="fermi.hypothesis")
    lead1, lead2 = abs(cone.c(2 * m0, 0)), abs(cone.c(0, 2))
    for _ in range(20):
        if lead1 / b1**2 < 0.5 * lead2:
            break
        b1 *= 2.0
    radius = b2
    bounds = _analytic_bounds(cone, b1, b2, radius)
    for _ in range(max_halvings):
        if all(bounds[r]["ok"] for r in ("A1", "A2", "A3")):
            break
        radius /= 2.0
        bounds = _analytic_bounds(cone, b1, b2, radius)
    rng = np.random.default_rng(seed)
    pts = _cone_samples(cone, radius, b1, b2, samples, rng)
    region_max = {}
    symmetric = True
    total = 0
    for name, (e1, e2) in pts.items():
        vals = cone(e1, e2)
        total += vals.size
        region_max[name] = float(vals.max()) if vals.size else None
        for s1, s2 in ((-1, 1), (1, -1), (-1, -1)):
            if not np.array_equal(cone(s1 * e1, s2 * e2), vals):
                symmetric = False
    finite = [v for v in region_max.values() if v is not None]
    max_sampled = max(finite)
    return ConeReport(
        radius=radius,
        b1=b1,
        b2=b2,
        all_negative=bool(max_sampled < 0.0),
        max_sampled=max_sampled,
        region_max=region_max,
        analytic_bounds=bounds,
        symmetric=symmetric,
        samples=total,
    )
