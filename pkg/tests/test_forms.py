from __future__ import annotations

import math
import warnings
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higherfermi.errors import CoefficientParseError, FormDataError, GrowthWarning, TruncationWarning
from higherfermi.forms import (
    EichlerIntegral,
    HolomorphicCuspForm,
    MaassFormData,
    SpectralPoint,
    deligne_violations,
    factorize,
    gamma37_form,
    hecke_audit,
    hecke_extend,
    ingest_coefficients,
    maass_evaluate,
    maass_evaluate_naive,
    primes_upto,
    write_coefficients,
    write_coefficients_csv,
)

FIXTURE = Path(__file__).parent / "fixtures" / "maass_sl2z_odd.txt"


@pytest.fixture(scope="module")
def odd_form():
    return ingest_coefficients(FIXTURE)


def test_primes_and_factorization():
    assert primes_upto(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert factorize(360) == [(2, 3), (3, 2), (5, 1)]
    assert factorize(1) == []


def test_spectral_point():
    sp = SpectralPoint(9.5)
    assert sp.s == 0.5 + 9.5j
    assert SpectralPoint.from_s(0.5 + 2j).r == 2
    with pytest.raises(FormDataError):
        SpectralPoint.from_s(0.6 + 2j)
    with pytest.raises(FormDataError):
        SpectralPoint(1.0, m=0)


def test_holomorphic_invariants():
    with pytest.raises(FormDataError) as info:
        HolomorphicCuspForm(37, (2, 1))
    assert info.value.code == "forms.normalization"
    with pytest.raises(FormDataError) as info:
        HolomorphicCuspForm(37, (1, -2, -3, 2, -2, 5))
    assert info.value.code == "forms.not_multiplicative"


def test_eichler_weights_exact():
    f = gamma37_form(6)
    w = EichlerIntegral(f).weights()
    assert w[:4] == (Fraction(1), Fraction(-1), Fraction(-1), Fraction(1, 2))
    assert EichlerIntegral(f).coeffs[1] == pytest.approx(-2 / (2j * math.pi * 2))


def test_hecke_extend_reproduces_theta_coefficients():
    full = gamma37_form(300)
    primes = [full.a(p) for p in range(1, 300 + 1)]
    seed = HolomorphicCuspForm(37, tuple(primes[:50]))
    ext = hecke_extend(seed, 50, 50)
    assert ext.coeffs == full.coeffs[:50]


def test_hecke_extend_missing_prime():
    with pytest.raises(FormDataError) as info:
        hecke_extend(gamma37_form(8), 3, 8)
    assert info.value.code == "forms.missing_prime"


def test_hecke_extend_inconsistent_data():
    coeffs = list(gamma37_form(10).coeffs)
    coeffs[3] = 3  # a_4 must be a_2^2 - 2 = 2
    seed = HolomorphicCuspForm(37, tuple(coeffs))
    with pytest.raises(FormDataError) as info:
        hecke_extend(seed, 7, 10)
    assert info.value.code == "forms.hecke_inconsistent"
    assert info.value.index == 4


def test_hecke_audit_and_deligne():
    f = gamma37_form(400)
    audit = hecke_audit(f)
    assert audit.ok and audit.coprime_pairs > 0 and audit.prime_power_checks > 0
    assert deligne_violations(f, 400) == []


def test_maass_invariants():
    with pytest.raises(FormDataError):
        MaassFormData(5.0, "even", (0.5, 1.0))
    with pytest.raises(FormDataError):
        MaassFormData(-1.0, "even", (1.0,))
    with pytest.raises(FormDataError):
        MaassFormData(5.0, "sideways", (1.0,))
    with pytest.warns(GrowthWarning):
        MaassFormData(5.0, "even", (1.0, 1e4))


def test_parity_convention(odd_form):
    assert odd_form.b(-3) == -odd_form.b(3)
    even = MaassFormData(5.0, "even", (1.0, 0.5))
    assert even.b(-2) == 0.5


def test_fixture_hecke_relations(odd_form):
    b = odd_form.b
    assert abs(b(4) - (b(2) ** 2 - 1)) < 1e-12
    assert abs(b(6) - b(2) * b(3)) < 1e-12
    assert abs(b(9) - (b(3) ** 2 - 1)) < 1e-12
    assert abs(b(8) - (b(2) * b(4) - b(2))) < 1e-12
    assert abs(b(35) - b(5) * b(7)) < 1e-11


def test_fixture_modular_invariance(odd_form):
    # an odd form for SL(2, Z) is invariant under z -> -1/z
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for z in (0.1 + 0.9j, -0.3 + 0.8j, 0.25 + 1.2j):
            w = -1 / z
            a = maass_evaluate(odd_form, z, 50)
            b = maass_evaluate(odd_form, w, 50)
            assert abs(a - b) < 1e-8 * max(1.0, abs(a))


def test_maass_evaluate_vs_naive_and_mpmath(odd_form):
    z = 0.17 + 0.6j
    fast = maass_evaluate(odd_form, z, 50)
    slow = maass_evaluate_naive(odd_form, z, 50)
    assert abs(fast - slow) < 1e-12 * max(1.0, abs(slow))
    mpmath.mp.dps = 25
    ref = sum(
        odd_form.b(n) * mpmath.sqrt(z.imag) * mpmath.besselk(1j * odd_form.r, 2 * mpmath.pi * n * z.imag).real
        * 2 * mpmath.sin(2 * mpmath.pi * n * z.real)
        for n in range(1, 51)
    )
    assert abs(fast - float(ref)) < 1e-11


def test_truncation_warning(odd_form):
    with pytest.warns(TruncationWarning):
        maass_evaluate(odd_form, 0.1 + 0.05j, 10)


def test_maass_domain_error(odd_form):
    with pytest.raises(FormDataError):
        maass_evaluate(odd_form, 0.3 - 0.1j, 10)


def test_roundtrip_files(tmp_path, odd_form):
    p = tmp_path / "u.txt"
    write_coefficients(odd_form, p)
    back = ingest_coefficients(p)
    assert back.coeffs == odd_form.coeffs and back.r == odd_form.r and back.parity == "odd"
    q = tmp_path / "f.txt"
    f = HolomorphicCuspForm(37, (1, Fraction(-2), -3))
    write_coefficients(f, q)
    assert ingest_coefficients(q).coeffs == (1, -2, -3)
    write_coefficients_csv(f, tmp_path / "f.csv")
    assert (tmp_path / "f.csv").read_text().splitlines()[1] == "n,value"


@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=0, max_size=30), st.sampled_from(["even", "odd"]))
@settings(max_examples=30, deadline=None)
def test_roundtrip_property(tmp_path_factory, tail, parity):
    u = MaassFormData(7.25, parity, (1.0, *tail))
    p = tmp_path_factory.mktemp("rt") / "u.txt"
    write_coefficients(u, p)
    back = ingest_coefficients(p)
    assert (back.r, back.parity, back.coeffs) == (u.r, u.parity, u.coeffs)


@pytest.mark.parametrize(
    "body,code,line,fragment",
    [
        ("1 1\n2 0.5\n2 0.1\n", "forms.index_order", 4, "duplicate index 2"),
        ("1 1\n3 0.5\n", "forms.index_order", 3, "index 3 skips 2"),
        ("1 1\n2 abc\n", "forms.non_numeric", 3, "abc"),
        ("1 1\n2 0.5 7\n", "forms.syntax", 3, "expected"),
        ("1 1\n2 0.5\n3 1\n1 1\n", "forms.index_order", 5, "decreasing"),
    ],
)
def test_parse_errors_name_line(tmp_path, body, code, line, fragment):
    p = tmp_path / "bad.txt"
    p.write_text("# type=maass level=1 r=3.0 parity=even\n" + body)
    with pytest.raises(CoefficientParseError) as info:
        ingest_coefficients(p)
    assert info.value.code == code
    assert info.value.line == line
    assert fragment in str(info.value)


def test_header_errors(tmp_path):
    p = tmp_path / "bad.txt"
    for header in ("1 1", "# type=maass level=1 parity=even", "# type=cusp level=1", "# type=holomorphic level=37 r=2"):
        p.write_text(header + "\n1 1\n")
        with pytest.raises(CoefficientParseError) as info:
            ingest_coefficients(p)
        assert info.value.code == "forms.header"


def test_holomorphic_parse_exact(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("# type=holomorphic level=11\n1 1\n2 -2\n3 -1/3\n")
    f = ingest_coefficients(p)
    assert f.coeffs == (1, -2, Fraction(-1, 3))
    assert isinstance(f.coeffs[2], Fraction)


def test_fixture_agrees_with_literature_values(odd_form):
    # leading coefficients of the first odd Maass cusp form for SL(2, Z)
    assert odd_form.r == pytest.approx(9.53369526135355755434, abs=1e-14)
    assert odd_form.b(2) == pytest.approx(-1.068333551223, abs=1e-11)
    assert odd_form.b(3) == pytest.approx(-0.456197354506, abs=1e-11)
    assert np.all(np.isfinite(odd_form.b_array()))
