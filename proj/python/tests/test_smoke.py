import math
import os
import re
from pathlib import Path

import pytest

import cubeperc as cp


def test_exact_counts_of_full_cube():
    for d, z in [(2, 7), (3, 35), (4, 743), (5, 254475)]:
        inst = cp.build_percolation(d, 1.0, 1)
        out = cp.exact_partition(inst)
        assert out["z_integer"] == z
        assert out["log_z"] == pytest.approx(math.log(z), rel=1e-12)


def test_hardcore_and_naive_agree():
    inst = cp.build_percolation(3, 1.0, 1)
    assert cp.exact_partition(inst, lam=2.0)["log_z"] == pytest.approx(math.log(177), rel=1e-12)
    assert cp.exact_partition(inst, lam=2.0)["z_integer"] is None
    inst = cp.build_percolation(4, 0.6, 9)
    assert cp.naive_count(inst) == cp.exact_partition(inst)["z_integer"]


def test_instance_is_deterministic():
    a = cp.build_percolation(10, 0.5, 42)
    b = cp.build_percolation(10, 0.5, 42)
    assert a.open_edge_count() == b.open_edge_count() == 2529
    assert sum(a.degree_histogram("even")) == 2**9
    assert a.edge_open(0, 3) == a.edge_open(8, 3)


def test_phi_sums_match_vertex_weights():
    inst = cp.build_percolation(8, 0.7, 3)
    even, odd = cp.phi_sums(inst, lam=1.0)
    evens = [v for v in range(2**8) if bin(v).count("1") % 2 == 0]
    assert even == pytest.approx(sum(cp.vertex_weight(inst, v, 1.0) for v in evens), rel=1e-12)
    assert odd > 0


def test_theory_constants():
    assert cp.critical_p(1.0) == pytest.approx(2 / 3, rel=1e-12)
    assert cp.mu_theory(10, 0.8) == pytest.approx(0.5 * 1.2**10, rel=1e-12)
    assert cp.sigma_sq_theory(10, 0.8) > 0
    assert 2**9 * cp.moment_theory(10, 0.8, 1.0, 1) == pytest.approx(cp.mu_theory(10, 0.8), rel=1e-12)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        cp.build_percolation(10, 1.5, 1)
    with pytest.raises(cp.InfeasibleError):
        cp.exact_partition(cp.build_percolation(9, 0.5, 1))
    with pytest.raises(ValueError):
        cp.critical_p(0.1)


def test_stats():
    assert cp.std_normal_cdf(0.0) == pytest.approx(0.5)
    assert cp.poisson_pmf(2.0, 0) == pytest.approx(math.exp(-2))
    assert cp.poisson_tv_exact(1.0, 1.0) == 0.0
    assert 0 < cp.poisson_tv_exact(1.0, 2.0) < 1
    assert cp.tv_discrete([0.5, 0.5], [1.0, 0.0]) == pytest.approx(0.5)
    assert cp.lognormal_sum_cdf(0.0, 1.0) == 0.0
    assert 0 < cp.lognormal_sum_cdf(2.0, 1.0) < cp.lognormal_sum_cdf(3.0, 1.0) < 1


def test_samplers_and_birthday():
    inst = cp.build_percolation(8, 0.8, 5)
    samples = cp.approx_samples(inst, 50, seed=7)
    assert len(samples) == 50
    for s in samples:
        members = s["even"] + s["odd"]
        for u in s["even"]:
            for v in s["odd"]:
                if bin(u ^ v).count("1") == 1:
                    assert not inst.edge_open(u, (u ^ v).bit_length() - 1)
        assert s["defect_size"] == min(len(s["even"]), len(s["odd"]))
        assert len(members) == s["s1_size"] + s["s2_size"]
    small = cp.build_percolation(4, 0.7, 2)
    assert 0 <= cp.tv_samplers_exact(small, 1.0, "symmetric") <= 1
    b = cp.birthday(inst, n=10, trials=200, seed=3)
    assert b["theta"] > 0
    assert 0 <= b["p_no_collision"] <= 1
    assert sum(b["collide_pmf"]) == pytest.approx(1.0)


def _schema_columns():
    src = os.environ.get("CUBEPERC_SOURCE_DIR", str(Path(__file__).resolve().parents[2]))
    text = (Path(src) / "docs" / "SCHEMAS.md").read_text()
    block = re.search(r"```columns\n(.*?)```", text, re.S).group(1)
    return dict(line.split(": ", 1) for line in block.strip().splitlines())


def test_run_experiment_matches_schema_and_manifest():
    cols = _schema_columns()
    res = cp.run_experiment("clt", d=10, p=0.8, instances=60, seed=11, workers=2)
    assert "ks" in str(res.summary).lower()
    rows = res.rows()
    assert len(rows) == 60
    assert ",".join(rows[0].keys()) == cols["clt"]
    assert res.manifest["command"] == "clt"
    assert res.manifest["columns"] == cols["clt"].split(",")
    assert res.manifest["theory"]["mu"] == pytest.approx(cp.mu_theory(10, 0.8))
    again = cp.run_experiment("clt", d=10, p=0.8, instances=60, seed=11, workers=1)
    assert again.data == res.data

    res = cp.run_experiment("census", d_grid=[6, 8, 10], p=0.8, accept=True)
    assert res.passed
    assert ",".join(res.rows()[0].keys()) == cols["census"]


def test_run_experiment_rejects_unknown_options():
    with pytest.raises(ValueError):
        cp.run_experiment("clt", bogus=1)
    with pytest.raises(ValueError):
        cp.run_experiment("nope")
