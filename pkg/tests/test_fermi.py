from __future__ import annotations

import math
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higherfermi.errors import ContourError, FermiError
from higherfermi.fermi import (
    ContourSpec,
    ResidueVector,
    TaylorCone,
    cone_check,
    contour_integral,
    count_singular,
    eps_derivatives,
    fd_derivatives,
    fd_weights,
    golden_rule_check,
    hessian,
    parity_of_D,
    parity_sparsity,
    weighted_mean_re,
)
from higherfermi.forms import SpectralPoint
from higherfermi.scatter import ScatteringModel, load_model

FIXTURES = Path(__file__).parent / "fixtures"
SJ = SpectralPoint(10.0)


def toy(coeffs, eps_max=0.2):
    return ScatteringModel.blaschke(SJ, coeffs, eps_max)


# --- contours -------------------------------------------------------------

def test_contour_integral_of_polynomials():
    c = ContourSpec(1 + 2j, 0.3, 64)
    assert abs(contour_integral(lambda s: 1 / (s - c.center), c) - 1) < 1e-15
    assert abs(contour_integral(lambda s: (s - c.center) ** 3, c)) < 1e-15


def test_contour_spec_validation():
    with pytest.raises(ContourError):
        ContourSpec(0, 0.1, 32)
    with pytest.raises(ContourError):
        ContourSpec(0, -1.0)


def test_winding_counts():
    m = toy([0.3j, -0.5])
    rho = m.rho(0.1)
    assert count_singular(m, ContourSpec(rho, 0.004), 0.1).count == -1
    assert count_singular(m, ContourSpec(1 - rho.conjugate(), 0.004), 0.1).count == 1
    assert count_singular(m, ContourSpec(SJ.s, 0.25), 0.1).count == 0


def test_winding_doubling_nodes():
    m = toy([0.3j, -0.5])
    c = ContourSpec(SJ.s, 0.1, 256)
    a = count_singular(m, c, 0.05).value
    b = count_singular(m, c.doubled(), 0.05).value
    assert abs(a - b) < 1e-10


def test_contour_proximity():
    m = toy([0.3j, -0.5])
    rho = m.rho(0.1)
    with pytest.raises(ContourError) as info:
        count_singular(m, ContourSpec(rho + 0.05, 0.05), 0.1)
    assert info.value.code == "fermi.contour_proximity"


@given(st.floats(-0.1, 0.1))
@settings(max_examples=40, deadline=None)
def test_weighted_mean_reproduces_trajectory(eps):
    m = toy([0.3j, -0.5, 0.2j, -0.75])
    got = weighted_mean_re(m, SJ, ContourSpec(SJ.s, 0.25), eps)
    assert abs(got - m.rho(eps).real) < 1e-9


def test_weighted_mean_multiplicity_two():
    # the moment counts both branches, so m = 2 halves the shift of a single pole
    m = toy([0.0, -1.0])
    sj2 = SpectralPoint(10.0, m=2)
    got = weighted_mean_re(m, sj2, ContourSpec(SJ.s, 0.25), 0.1)
    assert abs(got - (0.5 + 0.5 * (m.rho(0.1).real - 0.5))) < 1e-12


def test_escaped_pole():
    m = toy([0.3j, -0.5])
    with pytest.raises(ContourError) as info:
        weighted_mean_re(m, SJ, ContourSpec(SJ.s, 0.01), 0.1)
    assert info.value.code == "fermi.escaped"


# --- finite differences ---------------------------------------------------

def test_fd_weights_exact_on_monomials():
    w = fd_weights(range(-3, 4), 4)
    x = np.arange(-3, 4, dtype=float)
    for k in range(5):
        for p in range(7):
            want = math.factorial(p) if p == k else 0.0
            assert abs(np.dot(w[k], x**p) - want) < 1e-10


def test_fd_derivatives_of_analytic_function():
    d = fd_derivatives(lambda e: math.exp(2 * e) * math.cos(e), 4, 0.05)
    mpmath.mp.dps = 30
    for k in range(5):
        want = float(mpmath.diff(lambda e: mpmath.exp(2 * e) * mpmath.cos(e), 0, k))
        assert abs(d.values[k] - want) < 1e-6 * max(1, abs(want))


def test_fd_order_limit():
    with pytest.raises(FermiError):
        fd_derivatives(lambda e: e, 9, 0.1)


def test_eps_derivatives_recover_taylor_coefficients():
    m = toy([0.3j, -0.5, 0.2j, -0.75])
    d = eps_derivatives(m, SJ, ContourSpec(SJ.s, 0.25), 4)
    assert abs(d.values[0] - 0.5) < 1e-12
    assert abs(d.values[2] - 2 * (-0.5)) < 1e-6
    assert abs(d.values[4] - 24 * (-0.75)) < 1e-3 * 18


# --- golden rule ----------------------------------------------------------

def residue_oracle(coeffs, order):
    """d^order/deps^order of the residue of phi at rho(eps), through mpmath."""
    mpmath.mp.dps = 40

    def rho(e):
        return mpmath.mpc(0.5, 10) + sum(mpmath.mpc(c) * e ** (k + 1) for k, c in enumerate(coeffs))

    def res(e):
        r = rho(e)
        return (2 * r - 1) * (2 * r.real - 1) / (2j * r.imag)

    return complex(mpmath.diff(res, 0, order))


@pytest.mark.parametrize("fixture,n", [("n1.json", 1), ("n2.json", 2)])
def test_golden_rule_fixtures(fixture, n):
    model = load_model(FIXTURES / fixture)
    rep = golden_rule_check(model, n)
    assert rep.mismatch_real_part < 0.01
    assert rep.mismatch_residue < 0.01
    assert all(abs(v) < 1e-6 for v in rep.odd_derivatives)
    assert abs(rep.phi_at_sj - 1) < 1e-12
    oracle = residue_oracle(model.trajectory.coeffs, 2 * n)
    assert abs(rep.residue_phi_derivative - oracle) < 1e-4 * abs(oracle)


@given(
    st.floats(-2.0, -0.02),  # Re rho_{2n} spans two orders of magnitude
    st.floats(-1.0, 1.0),
    st.floats(-1.0, 1.0),
    st.sampled_from([1, 2]),
)
@settings(max_examples=12, deadline=None)
def test_golden_rule_property(re_lead, im1, im_lead, n):
    coeffs = [1j * im1] + [0j] * (2 * n - 2) + [complex(re_lead, im_lead)]
    rep = golden_rule_check(toy(coeffs), n)
    assert rep.mismatch_real_part < 0.01
    assert rep.mismatch_residue < 0.01
    assert all(abs(v) < 1e-6 for v in rep.odd_derivatives)


def test_golden_rule_preconditions():
    with pytest.raises(FermiError):
        golden_rule_check(toy([0.0, -0.5, 0.0, -1.0]), 2)  # second-order real motion at n = 2
    with pytest.raises(FermiError):
        golden_rule_check(ScatteringModel.modular(), 1)
    with pytest.raises(FermiError):
        golden_rule_check(toy([0.0, -0.5]), 5)


def test_vertical_motion_has_no_real_derivatives():
    rep = golden_rule_check(toy([1j]), 1)
    assert abs(rep.re_derivative) < 1e-9 and abs(rep.residue_norm) < 1e-9


# --- Hessian --------------------------------------------------------------

def test_hessian_small_example():
    h = hessian([(0,), (2 + 1j,)], 1).h
    assert h.tolist() == [[0.0, 0.0], [0.0, -5.0]]


@given(st.integers(1, 3), st.integers(1, 3), st.integers(0, 2**32 - 1), st.floats(0.1, 10))
@settings(max_examples=60, deadline=None)
def test_hessian_nsd_and_scaling(g, m, seed, t):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(2 * g, m)) + 1j * rng.normal(size=(2 * g, m))
    h = hessian([tuple(r) for r in v], m)
    assert h.max_eigenvalue <= 1e-10
    scaled = hessian([tuple(t * r) for r in v], m).h
    np.testing.assert_allclose(scaled, t * t * h.h, rtol=1e-12, atol=1e-14)


def test_hessian_rejects_bad_lengths():
    with pytest.raises(FermiError):
        hessian([(1, 2), (3,)], 2)
    with pytest.raises(FermiError):
        ResidueVector(())


def test_parity_of_D():
    assert parity_of_D([-1, 1], [1, 3]) == -1
    assert parity_of_D([-1, -1], [1, 1]) == 1
    with pytest.raises(FermiError):
        parity_of_D([2], [1])


@pytest.mark.parametrize("g", [1, 2, 3])
def test_parity_mask_corners(g):
    even = parity_sparsity(g, "even")
    odd = parity_sparsity(g, "odd")
    assert even[g:, g:].all() and not even[:g, :].any() and not even[:, :g].any()
    assert odd[:g, :g].all() and not odd[g:, :].any() and not odd[:, g:].any()


def test_mask_matches_parity_driven_hessian():
    # residues vanish in directions whose parity differs from u
    rng = np.random.default_rng(3)
    g, m = 2, 2
    v = rng.normal(size=(2 * g, m)) + 0j
    v[:g] = 0  # odd directions, u even
    h = hessian([tuple(r) for r in v], m).h
    mask = parity_sparsity(g, "even")
    assert not h[~mask].any()


# --- Taylor cone ----------------------------------------------------------

def test_cone_parity_pattern():
    with pytest.raises(FermiError) as info:
        TaylorCone({(0, 2): -1, (1, 1): 1}, 2)
    assert info.value.code == "fermi.parity_pattern"
    with pytest.raises(FermiError):
        TaylorCone({(0, 2): -1, (3, 1): 1}, 2)


def test_cone_hypothesis_errors():
    with pytest.raises(FermiError):
        cone_check(TaylorCone({(0, 2): 0.0, (4, 0): -1}, 2))
    with pytest.raises(FermiError):
        cone_check(TaylorCone({(0, 2): -1, (4, 0): 1}, 2))
    with pytest.raises(FermiError):
        cone_check(TaylorCone({(0, 2): -1, (2, 0): 1, (4, 0): -1}, 2))


@given(
    st.floats(-3, -0.1), st.floats(-3, -0.1),
    st.lists(st.tuples(st.sampled_from([(2, 2), (0, 4), (6, 0), (4, 2), (2, 4), (8, 0)]), st.floats(-5, 5)),
             max_size=4),
    st.integers(0, 1000),
)
@settings(max_examples=30, deadline=None)
def test_cone_property(c02, c40, extra, seed):
    coeffs = {(0, 2): c02, (4, 0): c40}
    for key, val in extra:
        coeffs[key] = val
    rep = cone_check(TaylorCone(coeffs, 2), seed=seed)
    assert rep.all_negative and rep.symmetric and rep.radius > 0


def test_cone_fixture_from_json():
    import json

    cone = TaylorCone.from_json(json.loads((FIXTURES / "cone_mixed.json").read_text()))
    rep = cone_check(cone)
    assert rep.all_negative and rep.symmetric
    assert all(rep.analytic_bounds[k]["ok"] for k in ("A1", "A2", "A3"))
    with pytest.raises(FermiError):
        TaylorCone.from_json({"m0": 2})
