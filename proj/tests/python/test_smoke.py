import json
import math
import os
import subprocess

import numpy as np
import pytest

import cec

CLI = os.environ.get("CEC_CLI")


def test_sample_shape_and_range():
    u = cec.sample(1000, 4, 5.0, 11)
    assert u.shape == (1000, 4)
    assert ((u > 0) & (u < 1)).all()


def test_sample_rejects_invalid_alpha():
    with pytest.raises(cec.DomainError):
        cec.sample(10, 10, -0.9, 1)
    with pytest.raises(cec.DomainError):
        cec.sample(10, 3, 0.0, 1)


def test_radial_quantile_inverts_cdf():
    v = cec.radial_quantile(0.3, 5.0, 10)
    assert cec.radial_cdf(v, 5.0, 10) == pytest.approx(0.3, abs=1e-10)


def test_laplace_at_zero_is_one():
    assert cec.laplace_qv(0.0, cec.CevParams()) == pytest.approx(1.0, abs=1e-12)


def test_rearrangement_pairs_large_values_with_small_prices():
    z = np.array([1.0, 3.0, 2.0])
    xi = np.array([0.5, 0.1, 0.9])
    perm = cec.rearrange_antimonotone(z, xi)
    assert list(z[perm]) == [2.0, 3.0, 1.0]
    assert cec.cost(z, xi)["cost"] <= cec.cost(z, xi, rearranged=False)["cost"]


def test_efficient_cost_is_deterministic():
    a = cec.efficient_cost(100, 40, 10, 5.0, cec.BsParams(), 5000, 3)
    b = cec.efficient_cost(100, 40, 10, 5.0, cec.BsParams(), 5000, 3)
    assert a["cost"] == b["cost"]
    assert (a["z_star"] == b["z_star"]).all()
    assert 700 < a["cost"] < 900


def test_allocation_sums_are_exact():
    u = cec.sample(2000, 3, 5.0, 4)
    population = 100 * np.exp(0.3 * (u - 0.5))
    z = population.sum(axis=1)
    values = cec.allocate(population, z, 9)["values"]
    assert (values[:, 0] + values[:, 1] + values[:, 2] == z).all()


def test_hedge_positions_are_finite():
    delta, psi = cec.hedge_positions(0.5, 1.0, 100, 40, cec.BsParams())
    assert math.isfinite(delta) and math.isfinite(psi)


def test_service_cost_matches_binding():
    status, body = cec.service_cost(
        json.dumps({"alpha": 5, "mean": 100, "std": 40, "scenarios": 5000, "seed": 3})
    )
    assert status == 200
    reply = json.loads(body)
    direct = cec.efficient_cost(100, 40, 10, 5.0, cec.BsParams(), 5000, 3)
    assert reply["cost"] == direct["cost"]


def test_service_cost_rejects_bad_alpha():
    status, body = cec.service_cost(json.dumps({"alpha": 0}))
    assert status == 422
    assert "alpha" in body


@pytest.mark.skipif(CLI is None, reason="CEC_CLI not set")
def test_cli_rejects_zero_alpha():
    r = subprocess.run([CLI, "cost-surface", "--alphas", "0"], capture_output=True, text=True)
    assert r.returncode == 2


@pytest.mark.skipif(CLI is None, reason="CEC_CLI not set")
def test_cli_help_lists_columns():
    r = subprocess.run([CLI, "frontier", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    assert "CSV columns" in r.stdout


@pytest.mark.skipif(CLI is None, reason="CEC_CLI not set")
def test_cli_rerun_from_csv_header(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    args = ["--alphas", "5", "--stds", "40", "--scenarios", "3000", "--seed", "8"]
    subprocess.run([CLI, "cost-surface", *args, "-o", str(first)], check=True)
    subprocess.run([CLI, "cost-surface", "--from-csv", str(first), "-o", str(second)], check=True)

    def body(path):
        return [l for l in path.read_text().splitlines() if not l.startswith("#")]

    assert body(first) == body(second)
