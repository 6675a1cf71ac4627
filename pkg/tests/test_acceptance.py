"""Acceptance suite: ten desk-scale criteria, one verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the verdict
lines as they are produced.  Each criterion prints exactly one
PASS/FAIL line before asserting, so a red criterion still reports its
measured values.
"""

import json
import math

import numpy as np
import pytest

from latticedeconv.asymptotics import BandwidthSchedule, check_lemma_limits
from latticedeconv.cli import main as cli_main
from latticedeconv.deconv import (
    DeconvKernel,
    GnTable,
    estimate_cf_form,
    estimate_direct,
    gn_abs_integral,
    gn_l1_limit,
    gn_l2_limit,
    gn_squared_integral,
)
from latticedeconv.fields import (
    LinearFieldSpec,
    MixingProfile,
    NoiseModel,
    add_noise,
    check_dependence_summability,
    decay_dependence_profile,
    dependence_linear,
    simulate_field,
)
from latticedeconv.harness import ExperimentConfig, joint_diagonality, run_experiment
from latticedeconv.lattice import make_rect_region

THREADS = 4


def _verdict(num: int, desc: str, ok: bool, detail: str = ""):
    line = f"[ACCEPTANCE {num}] {'PASS' if ok else 'FAIL'} - {desc}"
    if detail:
        line += f" ({detail})"
    print(line, flush=True)
    assert ok, line


# ---------------------------------------------------------------------------
# shared expensive runs
# ---------------------------------------------------------------------------

CLT_FIELD = LinearFieldSpec(2, (((0, 0), 0.8), ((0, 1), 0.6)))  # marginal N(0, 1)


def clt_config(theorem="mixing"):
    return ExperimentConfig(
        field_spec=CLT_FIELD,
        noise=NoiseModel.laplace(2.0),
        kernel=DeconvKernel("polynomial", 3),
        regions=(make_rect_region([48, 48]),),
        schedule=BandwidthSchedule(c=0.8, gamma=0.125),
        eval_points=(0.0, 3.0),
        replicates=500,
        base_seed=11,
        theorem=theorem,
        threads=THREADS,
    )


def clt_config_json():
    return {
        "schema": 1,
        "field": {
            "model": "linear",
            "dimension": 2,
            "coefficients": [
                {"site": [0, 0], "value": 0.8},
                {"site": [0, 1], "value": 0.6},
            ],
            "innovations": {"tag": "normal"},
        },
        "noise": {"tag": "laplace", "scale": 2.0},
        "kernel": {"tag": "polynomial", "order": 3},
        "regions": [{"kind": "rect", "sides": [48, 48]}],
        "bandwidth": {"c": 0.8, "gamma": 0.125},
        "eval_points": [0.0, 3.0],
        "replicates": 500,
        "seed": 11,
        "theorem": "mixing",
        "threads": THREADS,
    }


@pytest.fixture(scope="module")
def mixing_report():
    return run_experiment(clt_config("mixing"))


@pytest.fixture(scope="module")
def dependence_report():
    return run_experiment(clt_config("dependence"))


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------


def test_criterion_1_form_equivalence():
    """Direct-sum and cf-integral forms of the estimator agree."""
    rng = np.random.default_rng(0)
    worst = 0.0
    for trial in range(20):
        d = int(rng.integers(1, 3))
        sides = [int(rng.integers(4, 33)) for _ in range(d)]
        while int(np.prod(sides)) > 1024:
            sides = [max(2, s // 2) for s in sides]
        region = make_rect_region(sides)
        sigma = float(rng.choice([0.5, 1.0]))
        noise = NoiseModel.laplace(sigma)
        kernel = DeconvKernel("indicator") if trial % 2 else DeconvKernel("polynomial", int(rng.integers(1, 4)))
        spec = LinearFieldSpec.iid(d)
        y = add_noise(simulate_field(region, spec, seed=trial), noise, seed=trial)
        b = float(rng.uniform(0.2, 0.6))
        grid = np.sort(rng.uniform(-3, 3, int(rng.integers(5, 10))))
        direct = estimate_direct(y, kernel, noise, b, grid)
        cf = estimate_cf_form(y, kernel, noise, b, grid)
        gap = float(np.max(np.abs(direct.values - cf.values) / (1 + np.abs(direct.values))))
        worst = max(worst, gap)
    _verdict(1, "direct and cf estimator forms agree on 20 random configs", worst < 1e-6, f"worst relative gap {worst:.3e}")


def test_criterion_2_laplace_closed_form():
    """g(z) for Laplace noise matches K(z) - (sigma^2/b^2) K''(z)."""
    rng = np.random.default_rng(1)
    kernel = DeconvKernel("polynomial", 3)
    sigma, b = 1.0, 0.4
    table = GnTable(kernel, NoiseModel.laplace(sigma), b)
    z = rng.uniform(-50, 50, 1000)
    oracle = kernel.real_kernel(z) - (sigma**2 / b**2) * kernel.real_kernel_dd(z)
    gap = float(np.max(np.abs(table(z) - oracle)))
    _verdict(2, "Laplace closed-form oracle for g at 1000 random z", gap < 1e-8, f"max abs gap {gap:.3e}")


def test_criterion_3_plancherel_limits():
    """Finite-bandwidth integrals of g approach their scaling limits."""
    kernel = DeconvKernel("polynomial", 3)
    noise = NoiseModel.laplace(1.0)
    l2 = gn_l2_limit(kernel, noise.beta, noise.limit_constant)
    l1 = gn_l1_limit(kernel, noise.beta, noise.limit_constant)
    gaps2, gaps1 = [], []
    for b in (0.5, 0.2, 0.1, 0.05):
        table = GnTable(kernel, noise, b)
        gaps2.append(abs(b**4 * gn_squared_integral(table) - l2) / l2)
        gaps1.append(abs(b**2 * gn_abs_integral(table) - l1) / l1)
    ok = (
        all(a > c for a, c in zip(gaps2, gaps2[1:]))
        and all(a > c for a, c in zip(gaps1, gaps1[1:]))
        and gaps2[-1] < 0.05
        and gaps1[-1] < 0.05
    )
    detail = f"L2 gaps {[f'{g:.3g}' for g in gaps2]}, L1 gaps {[f'{g:.3g}' for g in gaps1]}"
    _verdict(3, "squared/absolute integrals of g converge to the scaling limits", ok, detail)


def test_criterion_4_bias_decay():
    """Mean estimate approaches the latent density over growing regions."""
    cfg = ExperimentConfig(
        field_spec=LinearFieldSpec.iid(2),
        noise=NoiseModel.laplace(1.0),
        kernel=DeconvKernel("polynomial", 1),
        regions=(make_rect_region([16, 16]), make_rect_region([32, 32]), make_rect_region([48, 48])),
        schedule=BandwidthSchedule(c=1.0, gamma=0.125),
        eval_points=(0.0,),
        replicates=300,
        base_seed=5,
        theorem="mixing",
        threads=THREADS,
    )
    rows = run_experiment(cfg).bias_rows
    gaps = [row[4] for row in rows]
    decreasing = all(a > c for a, c in zip(gaps, gaps[1:]))
    ok = decreasing and gaps[-1] < 0.05
    _verdict(4, "bias gap strictly decreasing and < 0.05 at the largest region", ok, f"gaps {[f'{g:.4f}' for g in gaps]}")


def test_criterion_5_variance_scaling():
    """Scaled replicate variance of the estimate matches sigma^2(x)."""
    cfg = ExperimentConfig(
        field_spec=LinearFieldSpec.iid(2),
        noise=NoiseModel.laplace(1.0),
        kernel=DeconvKernel("polynomial", 1),
        regions=(make_rect_region([48, 48]),),
        schedule=BandwidthSchedule(c=1.0, gamma=0.125),
        eval_points=(0.0,),
        replicates=500,
        base_seed=5,
        theorem="mixing",
        threads=THREADS,
    )
    ratio = run_experiment(cfg).variance_ratios[0][1][0]
    ok = 0.7 <= ratio <= 1.3
    _verdict(5, "variance ratio in [0.7, 1.3] at the largest region", ok, f"ratio {ratio:.4f}")


def test_criterion_6_mixing_clt(mixing_report):
    """Standardized statistic is normal and decorrelates across points."""
    p0 = mixing_report.ks[0][1]
    verdict = joint_diagonality(mixing_report, threshold=0.15)
    ok = p0 > 0.01 and verdict.passed
    detail = f"KS p at x=0: {p0:.4f}, max |corr| {verdict.max_abs_correlation:.4f}"
    _verdict(6, "mixing-model CLT: KS normality and joint diagonality", ok, detail)


def test_criterion_7_dependence_clt(mixing_report, dependence_report):
    """Dependence-model CLT via the same pipeline, admissibility checked."""
    profile = dependence_linear(CLT_FIELD, 2)
    delta = profile((0, 1))
    exact = abs(delta - math.sqrt(2) * 0.6) < 1e-12
    summable = check_dependence_summability(profile, d=2).finite
    p0 = dependence_report.ks[0][1]
    identical = np.array_equal(mixing_report.standardized, dependence_report.standardized)
    ok = exact and summable and p0 > 0.01 and identical
    detail = f"KS p {p0:.4f}, delta exact {exact}, summable {summable}, samples identical {identical}"
    _verdict(7, "dependence-model CLT with exact coupling coefficients", ok, detail)


def test_criterion_8_blocking_sequences():
    """Blocking radii grow while m^d b vanishes along the schedule."""
    schedule = BandwidthSchedule(c=1.0, gamma=0.25)
    profile = MixingProfile(tag="m_dependent", cutoff=1)
    report = check_lemma_limits(schedule, profile, 1, "mixing", [10**2, 10**4, 10**6, 10**8])
    ms = [r.m for r in report.rows]
    mb = [r.m_d_b for r in report.rows]
    tails = [r.tail_ratio for r in report.rows]
    expect_mb = [10**-0.5, 0.3, 5 * 10**-1.5, 0.1]
    ok = (
        ms == [1, 3, 5, 10]
        and report.m_increasing
        and all(abs(a - e) < 1e-12 for a, e in zip(mb, expect_mb))
        and report.m_d_b_decreasing
        and all(t == 0.0 for t in tails)
    )
    _verdict(8, "blocking radii increase, m^d b decreases, tails vanish", ok, f"m {ms}, m^d b {[f'{v:.4f}' for v in mb]}")


def test_criterion_9_guard_rails():
    """Inadmissible inputs are rejected with the condition named."""
    failures = []
    try:
        NoiseModel.from_tag("gaussian")
        failures.append("gaussian noise accepted")
    except ValueError as e:
        if "A3" not in str(e):
            failures.append("gaussian rejection does not name A3")
    try:
        cfg = clt_config()
        from dataclasses import replace

        replace(cfg, eval_points=(0.0, 0.0)).validate()
        failures.append("duplicate points accepted")
    except ValueError as e:
        if "distinct" not in str(e):
            failures.append("duplicate-point rejection does not name distinctness")
    try:
        BandwidthSchedule(c=1.0, gamma=0.2).validate(2.0)
        failures.append("boundary schedule accepted")
    except ValueError as e:
        if "A5" not in str(e):
            failures.append("schedule rejection does not name A5")
    try:
        from latticedeconv.asymptotics import m_seq_dependence

        m_seq_dependence(0.1, decay_dependence_profile(1, 1.0, 3.0), 1)
        failures.append("divergent dependence profile accepted")
    except ValueError as e:
        if "condition (8)" not in str(e):
            failures.append("divergence rejection does not name condition (8)")
    _verdict(9, "guard rails reject A3/A5/distinctness/condition-(8) violations", not failures, "; ".join(failures))


def test_criterion_10_determinism(tmp_path):
    """Same config and seed reproduce report files byte for byte."""
    cfg_path = tmp_path / "clt.json"
    cfg_path.write_text(json.dumps(clt_config_json()))
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    code1 = cli_main(["clt", "--config", str(cfg_path), "--out", str(out1)])
    code2 = cli_main(["clt", "--config", str(cfg_path), "--out", str(out2)])
    same = all(
        (out1 / name).read_bytes() == (out2 / name).read_bytes()
        for name in ("replicates.csv", "summary.txt", "lemma_check.txt")
    )
    ok = code1 == 0 and code2 == 0 and same
    _verdict(10, "repeated runs emit byte-identical report files", ok, f"exit codes {code1}/{code2}, identical {same}")
