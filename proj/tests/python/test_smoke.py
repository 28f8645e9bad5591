import math

import numpy as np
import pytest

import focklab


def test_basis_norm_product_at_zero_and_limit():
    assert focklab.basis_norm("1", 0) * focklab.basis_norm("inf", 0) == pytest.approx(1.0, abs=1e-12)
    product = focklab.basis_norm("1", 60) * focklab.basis_norm("inf", 60)
    assert abs(product - 1 / math.sqrt(2)) < 1e-3


def test_gaussian_heat_transform_closed_form():
    value = focklab.heat_transform({"family": "gaussian", "a": 1.0}, 0.5, 0.3 + 0.4j)
    assert value == pytest.approx(math.exp(-0.25 / 1.5) / 1.5, abs=1e-14)


def test_toeplitz_diagonal_and_berezin():
    m = focklab.toeplitz_matrix({"family": "gaussian", "a": 1.0}, 1.0, 16)
    assert m.shape == (17, 17)
    assert np.allclose(np.diag(m).real[:10], 0.5 ** np.arange(1, 11), atol=1e-12)
    assert focklab.berezin(m, 1.0, 0.0) == pytest.approx(0.5, abs=1e-12)


def test_unknown_family_raises():
    with pytest.raises(ValueError):
        focklab.heat_transform({"family": "bessel"}, 0.5, 0.0)


def test_wiener_order_two_certified(tmp_path):
    err, certified, terms = focklab.wiener_l1_error(1.0, 2, str(tmp_path))
    assert certified and err <= 0.5 and terms > 1


def test_run_suite_report():
    assert len(focklab.list_suites()) == 13
    report = focklab.run_suite("basis-norms")
    assert report["summary"]["status"] == "pass"
    assert "generated_at" not in report
    with pytest.raises(ValueError):
        focklab.run_suite("basis-norms", colour="blue")
