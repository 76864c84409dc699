import math

import numpy as np
import pytest

import fracdamp

SMALL = """
[grid]
n = 40
[quadrature]
n_nodes = 64
[time]
T = 2
dt = 0.01
record_every = 10
[scan]
points = 24
"""


def test_gamma_and_weight():
    assert fracdamp.gamma_const(0.5) == pytest.approx(1.0 / math.pi, rel=1e-15)
    assert fracdamp.p_weight(4.0, 0.75) == pytest.approx(math.sqrt(2.0), rel=1e-15)


def test_closed_forms():
    value = fracdamp.closed_integral_resolvent(0.5, 1.0, 1.0)
    assert value.real == pytest.approx(1.2203312255379458, rel=1e-12)
    assert value.imag == pytest.approx(-0.5054777442051975, rel=1e-12)
    assert fracdamp.closed_integral_squared(0.5, 1.0, 1.0) == pytest.approx(0.5054777442051975, rel=1e-12)
    c1, c2 = fracdamp.kv_coefficients(0.5, 1.0, 2.0)
    assert c1 == pytest.approx(0.17578879212707146, rel=1e-11)
    assert c2 == pytest.approx(0.5688644810057831, rel=1e-11)


def test_quadrature_and_diffusive_apply():
    quad = fracdamp.Quadrature(0.5, 1.0)
    assert len(quad) == 128
    assert quad.certificate_error < 1e-8
    assert np.all(quad.weights > 0)
    dt = 0.01
    t = np.arange(1001) * dt
    u = np.sin(t)
    out = fracdamp.diffusive_apply(u, dt, quad)
    ref = fracdamp.fractional_integral(u, dt, 0.5, 1.0, 0.5)
    assert np.max(np.abs(out - ref)) <= 1e-3 * np.max(np.abs(ref))


def test_certificate_error_raised():
    with pytest.raises(fracdamp.CertificateError):
        fracdamp.Quadrature(0.5, 1.0, xi_max=10.0, strategy="truncated")


def test_simulate_energy_decreases():
    trace = fracdamp.simulate(SMALL)
    assert trace["steps"] == 200
    assert trace["t"][0] == 0.0
    assert trace["t"][-1] == pytest.approx(2.0)
    assert np.all(np.diff(trace["E"]) <= 0.0)
    np.testing.assert_allclose(trace["E"], trace["E1"] + trace["E2"], rtol=1e-12)


def test_resolvent_scan():
    aug = fracdamp.resolvent_scan(SMALL, "augmented")
    cls = fracdamp.resolvent_scan(SMALL, "classical")
    assert aug["omega"].shape == aug["norm"].shape == aug["flagged"].shape
    assert not aug["flagged"].any()
    assert aug["exponent"] > cls["exponent"]
    with pytest.raises(ValueError):
        fracdamp.resolvent_scan(SMALL, "other")


def test_fit_decay():
    t = np.linspace(0.0, 200.0, 2001)
    fit = fracdamp.fit_decay(t, (1.0 + t) ** -4.0, "polynomial", 20.0, 200.0)
    assert fit["rate"] == pytest.approx(4.0, rel=1e-10)
    assert fit["accepted"]
    assert fracdamp.predict_decay(0.5) == pytest.approx(4.0)


def test_config_errors_and_hash():
    with pytest.raises(fracdamp.ConfigError):
        fracdamp.config_hash("[params]\nalpha = oops\n")
    assert len(fracdamp.config_hash("")) == 16
    assert fracdamp.config_hash(fracdamp.canonical_config(SMALL)) == fracdamp.config_hash(SMALL)


def test_run_command(tmp_path):
    code, log, err = fracdamp.run("verify-kernel", "", str(tmp_path))
    assert code == 0, err
    assert (tmp_path / "kernel_report.csv").read_text().startswith("# config_hash: ")
    code, _, err = fracdamp.run("resolvent", "[params]\neta = 0\n", str(tmp_path / "r"))
    assert code == 1
    assert "eta" in err
