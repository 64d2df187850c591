from __future__ import annotations

import json
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higherfermi.errors import ScatteringError
from higherfermi.forms import SpectralPoint
from higherfermi.scatter import (
    ScatteringModel,
    TrajectorySpec,
    identity_residuals,
    load_model,
    model_to_json,
    phi_derivative,
    phi_log_derivative,
    phi_modular,
    phi_modular_dirichlet,
)

FIXTURES = Path(__file__).parent / "fixtures"
mpmath.mp.dps = 30


def mp_phi(s):
    s = mpmath.mpc(s)
    return mpmath.sqrt(mpmath.pi) * mpmath.gamma(s - 0.5) * mpmath.zeta(2 * s - 1) / (mpmath.gamma(s) * mpmath.zeta(2 * s))


@pytest.mark.parametrize("s", [2.0, 0.7 + 3j, 0.2 - 11j, 1.5 + 40j, -0.4 + 2j])
def test_phi_modular_against_mpmath(s):
    want = complex(mp_phi(s))
    assert abs(phi_modular(s) - want) < 1e-11 * abs(want)


def test_phi_modular_value_at_two():
    # pi^{1/2} Gamma(3/2) zeta(3) / (Gamma(2) zeta(4))
    assert phi_modular(2.0) == pytest.approx(complex(mp_phi(2)).real, rel=1e-14)


@given(st.floats(-20, 20))
@settings(max_examples=50, deadline=None)
def test_unitarity_on_critical_line(t):
    if abs(t) < 1e-6:
        return
    assert abs(abs(phi_modular(complex(0.5, t))) - 1.0) < 1e-12


def test_modular_poles():
    first_zero = complex(mpmath.zetazero(1)) / 2
    for s in (0.5, 1.0, 0.5 + 1e-10, first_zero):
        with pytest.raises(ScatteringError):
            phi_modular(s)


@pytest.mark.parametrize("s", [1.5, 2.0, 3.0 + 2j, 4.0 - 5j])
def test_dirichlet_series_matches_closed_form(s):
    val, tail = phi_modular_dirichlet(s, 20_000)
    assert abs(val - phi_modular(s)) < 1e-6 * abs(phi_modular(s))


def test_dirichlet_region():
    with pytest.raises(ScatteringError):
        phi_modular_dirichlet(0.9)


@st.composite
def toy_models(draw):
    r = draw(st.floats(1.0, 30.0))
    c1 = 1j * draw(st.floats(-1, 1))
    c2 = complex(draw(st.floats(-2, 0)), draw(st.floats(-1, 1)))
    return ScatteringModel.blaschke(SpectralPoint(r), [c1, c2], 0.2)


@given(toy_models(), st.floats(-1, 2), st.floats(-30, 30), st.floats(-0.2, 0.2))
@settings(max_examples=80, deadline=None)
def test_toy_identities(model, x, y, eps):
    s = complex(x, y)
    poles, zeros = model.singular_points(eps) or ([], [])
    if any(abs(s - p) < 1e-3 for p in poles + zeros):
        return
    r1, r2 = identity_residuals(model, s, eps)
    assert r1 < 1e-11 and r2 < 1e-11


def test_toy_on_line_is_one():
    m = ScatteringModel.blaschke(0.5 + 4j, [1j], 0.1)
    assert m(0.3 + 1j, 0.05) == 1
    assert m.singular_points(0.05) == ([], [])


def test_trajectory_must_stay_left():
    with pytest.raises(ScatteringError):
        TrajectorySpec(SpectralPoint(5.0), (0.1,), 0.1)
    with pytest.raises(ScatteringError):
        ScatteringModel.blaschke(0.5 + 5j, [0, 0.5], 0.1)


def test_log_derivative_against_mpmath():
    m = ScatteringModel.blaschke(0.5 + 10j, [0.3j, -0.5], 0.2)
    s, eps = 0.6 + 9.7j, 0.1
    rho = m.rho(eps)

    def f(z):
        return (z - (1 - rho)) / (z - rho) * (z - (1 - rho.conjugate())) / (z - rho.conjugate())

    want = complex(mpmath.diff(f, s) / f(s))
    assert abs(phi_log_derivative(m, s, eps) - want) < 1e-12 * abs(want)
    mod = ScatteringModel.modular()
    s = 0.8 + 5j
    want = complex(mpmath.diff(mp_phi, s))
    assert abs(phi_derivative(mod, s) - want) < 1e-8 * abs(want)


def test_json_roundtrip(tmp_path):
    m = load_model(FIXTURES / "n2.json")
    p = tmp_path / "m.json"
    p.write_text(json.dumps(model_to_json(m)))
    back = load_model(p)
    assert back.trajectory == m.trajectory
    assert load_model({"kind": "closed_form_modular"}).kind == "closed_form_modular"


def test_json_errors(tmp_path):
    with pytest.raises(ScatteringError):
        load_model({"kind": "mystery"})
    with pytest.raises(ScatteringError):
        load_model({"kind": "blaschke_family", "s_j": [0.5]})
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(ScatteringError):
        load_model(p)


def test_construction_rejects_unknown_kind():
    with pytest.raises(ScatteringError):
        ScatteringModel("tilted")
    assert np.isfinite(ScatteringModel.modular().identity_residual)
