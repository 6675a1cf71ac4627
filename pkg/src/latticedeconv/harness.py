"""Monte Carlo harness for the asymptotic claims of the estimator.

Runs seeded replicate simulations over a growing region sequence and
checks, statistically:

* the bias of f-hat against the closed-form latent marginal,
* the variance scaling n b^{2 beta + 1} Var(f-hat) -> sigma^2(x),
* asymptotic normality of the standardized statistic at each evaluation
  point (one-sample Kolmogorov-Smirnov), and
* diagonality of the joint limit (vanishing cross-correlations).

Statistics are centered at the replicate mean, i.e. at E f-hat rather
than at the true density — the limit theorems are statements about
f-hat minus its expectation, and at desk scale the smoothing bias is
not negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from . import asymptotics
from .asymptotics import BandwidthSchedule, fy_gaussian_convolution, sigma2, standardize
from .deconv import DeconvKernel, estimate_direct, GnTable
from .fields import (
    DependenceProfile,
    FieldSample,
    LinearFieldSpec,
    MixingProfile,
    NoiseModel,
    ROLE_AUX,
    VolterraFieldSpec,
    add_noise,
    check_dependence_summability,
    check_mixing_summability,
    dependence_linear,
    dependence_volterra,
    simulate_field,
    stream_rng,
)
from .lattice import LatticeRegion


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

MIN_REPLICATES = 100


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one Monte Carlo CLT experiment."""

    field_spec: object  # LinearFieldSpec | VolterraFieldSpec
    noise: NoiseModel
    kernel: DeconvKernel
    regions: tuple  # growing sequence of LatticeRegion
    schedule: BandwidthSchedule
    eval_points: tuple
    replicates: int = 500
    base_seed: int = 0
    theorem: str = "mixing"  # "mixing" | "dependence"
    threads: int = 1

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "eval_points", tuple(float(x) for x in self.eval_points))

    def validate(self) -> None:
        """Check every admissibility condition; raises naming the first violated one."""
        if not self.regions:
            raise ValueError("config needs at least one region")
        d = self.regions[0].dimension
        if any(r.dimension != d for r in self.regions):
            raise ValueError("all regions must share one dimension")
        if getattr(self.field_spec, "dimension", d) != d:
            raise ValueError("field spec and region dimensions differ")
        if not self.eval_points:
            raise ValueError("config needs at least one evaluation point")
        if len(set(self.eval_points)) != len(self.eval_points):
            raise ValueError("evaluation points must be pairwise distinct")
        if self.replicates < MIN_REPLICATES:
            raise ValueError(f"normality tests need at least {MIN_REPLICATES} replicates")
        if self.theorem not in ("mixing", "dependence"):
            raise ValueError(f"unknown theorem tag: {self.theorem!r}")
        if self.noise.beta < 0 or self.noise.limit_constant <= 0:
            raise ValueError("noise violates A3: needs beta >= 0 and B > 0")
        self.schedule.validate(self.noise.beta)
        # theorem-specific summability of the field's dependence structure
        if self.theorem == "mixing":
            verdict = check_mixing_summability(mixing_profile_for(self.field_spec), d)
            if not verdict.finite:
                raise ValueError(
                    f"field violates condition (7): {verdict.reason} "
                    f"(partial sum {verdict.partial_sum:.4g} at m = {verdict.truncated_at})"
                )
        else:
            verdict = check_dependence_summability(dependence_profile_for(self.field_spec), d)
            if not verdict.finite:
                raise ValueError(
                    f"field violates condition (8): {verdict.reason} "
                    f"(partial sum {verdict.partial_sum:.4g} at |i| = {verdict.truncated_at})"
                )


def mixing_profile_for(spec) -> MixingProfile:
    """m-dependence profile implied by a finite-support field spec."""
    if isinstance(spec, LinearFieldSpec):
        return MixingProfile.from_linear_spec(spec)
    if isinstance(spec, VolterraFieldSpec):
        sites = [s for s1, s2, v in spec.coefficients if v != 0.0 for s in (s1, s2)]
        if not sites:
            return MixingProfile(tag="m_dependent", cutoff=0)
        diam = max(
            max(abs(a - b) for a, b in zip(u, w)) for u in sites for w in sites
        )
        return MixingProfile(tag="m_dependent", cutoff=diam)
    raise TypeError(f"no mixing profile for field spec type {type(spec).__name__}")


def dependence_profile_for(spec, p: int = 2) -> DependenceProfile:
    if isinstance(spec, LinearFieldSpec):
        return dependence_linear(spec, p)
    if isinstance(spec, VolterraFieldSpec):
        return dependence_volterra(spec, p)
    raise TypeError(f"no dependence profile for field spec type {type(spec).__name__}")


# ---------------------------------------------------------------------------
# f_Y at the evaluation points
# ---------------------------------------------------------------------------

_MEGA_SAMPLE_SITES = 1_000_000


def latent_marginal_density(spec) -> Optional[tuple]:
    """(callable f_X, description) when the marginal is closed-form, else None.

    Available for linear fields with Gaussian innovations: the marginal
    is N(0, variance) with variance = sum a_s^2.
    """
    if isinstance(spec, LinearFieldSpec) and spec.innovations.tag == "normal":
        var = spec.marginal_variance
        if var <= 0:
            return None
        sd = math.sqrt(var)

        def fx(x):
            x = np.asarray(x, dtype=float)
            return np.exp(-0.5 * (x / sd) ** 2) / (sd * math.sqrt(2.0 * math.pi))

        return fx, f"gaussian marginal, sd = {sd:.6g}"
    return None


def fy_values(spec, noise: NoiseModel, points, base_seed: int = 0) -> tuple:
    """f_Y at the evaluation points, plus a tag recording the method.

    Closed-form convolution when the latent marginal is Gaussian;
    otherwise a one-off kernel density estimate on a mega-sample drawn
    from an auxiliary stream.
    """
    points = np.asarray(points, dtype=float)
    closed = latent_marginal_density(spec)
    if closed is not None and isinstance(spec, LinearFieldSpec):
        sd = math.sqrt(spec.marginal_variance)
        if noise.tag == "none":
            vals = closed[0](points)
        else:
            vals = fy_gaussian_convolution(sd, noise, points)
        return np.atleast_1d(vals), "convolution"
    # fallback: estimate f_Y once from a large i.i.d.-site sample
    from scipy.stats import gaussian_kde

    from .lattice import make_rect_region

    d = spec.dimension
    side = int(round(_MEGA_SAMPLE_SITES ** (1.0 / d)))
    region = make_rect_region([side] * d)
    rng_rep = 10**9  # reserved replicate index for the auxiliary stream
    x = simulate_field(region, spec, base_seed, replicate=rng_rep)
    y = add_noise(x, noise, base_seed, replicate=rng_rep)
    kde = gaussian_kde(y.values)
    return np.atleast_1d(kde(points)), "mega-sample kde"


# ---------------------------------------------------------------------------
# replicate machinery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReplicateResult:
    replicate: int
    n_sites: int
    b: float
    fhat: np.ndarray  # one value per evaluation point


def _one_replicate(config: ExperimentConfig, region: LatticeRegion, b: float, grid: np.ndarray, replicate: int) -> np.ndarray:
    x = simulate_field(region, config.field_spec, config.base_seed, replicate=replicate)
    y = add_noise(x, config.noise, config.base_seed, replicate=replicate)
    est = estimate_direct(y, config.kernel, config.noise, b, grid)
    return est.values


def _run_region(config: ExperimentConfig, region: LatticeRegion, replicate_offset: int) -> list:
    """All replicates on one region, in deterministic replicate order."""
    b = config.schedule.b(region.n_sites)
    order = np.argsort(config.eval_points)
    grid = np.asarray(config.eval_points, dtype=float)[order]
    inverse = np.argsort(order)
    results = Parallel(n_jobs=config.threads, backend="threading")(
        delayed(_one_replicate)(config, region, b, grid, replicate_offset + r)
        for r in range(config.replicates)
    )
    return [
        ReplicateResult(r, region.n_sites, b, vals[inverse])
        for r, vals in enumerate(results)
    ]


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------


def ks_normality(samples) -> tuple:
    """One-sample Kolmogorov-Smirnov test against N(0, 1).

    Returns (D, p) with the p-value from the asymptotic Kolmogorov
    series, truncated at 100 terms — a documented approximation, good
    for n in the hundreds.
    """
    from scipy.stats import norm

    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n < 8:
        raise ValueError("Kolmogorov-Smirnov test needs at least 8 samples")
    cdf = norm.cdf(x)
    i = np.arange(1, n + 1)
    d = float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))
    lam = math.sqrt(n) * d
    terms = [2.0 * (-1.0) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam) for k in range(1, 101)]
    p = min(1.0, max(0.0, sum(terms)))
    return d, p


def joint_diagonality(report: "CltReport", threshold: Optional[float] = None) -> "DiagonalityVerdict":
    """Check that standardized statistics at distinct points decorrelate."""
    k = len(report.eval_points)
    if k < 2:
        raise ValueError("joint diagonality needs at least 2 evaluation points")
    if threshold is None:
        threshold = 3.0 / math.sqrt(report.replicates) + 0.05
    corr = report.correlations
    off = np.abs(corr[~np.eye(k, dtype=bool)])
    return DiagonalityVerdict(
        passed=bool(np.all(off < threshold)),
        max_abs_correlation=float(np.max(off)),
        threshold=float(threshold),
    )


@dataclass(frozen=True)
class DiagonalityVerdict:
    passed: bool
    max_abs_correlation: float
    threshold: float


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CltReport:
    eval_points: tuple
    replicates: int
    region_sizes: tuple
    bandwidths: tuple
    fy: tuple  # f_Y at each evaluation point
    fy_method: str
    sigma: tuple  # sigma(x) per point
    standardized: np.ndarray  # (R, k), final region
    fhat_final: np.ndarray  # (R, k) raw estimates at the final region
    ks: tuple  # (D, p) per point
    correlations: np.ndarray  # (k, k)
    variance_ratios: tuple  # (n_sites, ratio per point) rows
    bias_rows: Optional[tuple]  # (n_sites, b, mean fhat, f_X(x), gap) at the first point
    theorem: str

    def to_csv(self, path) -> None:
        """One row per (replicate, point): replicate, x, fhat, standardized."""
        with open(path, "w", newline="\n") as fh:
            fh.write("replicate,x,fhat,standardized\n")
            for r in range(self.replicates):
                for j, x in enumerate(self.eval_points):
                    fh.write(
                        f"{r},{float(x)!r},{float(self.fhat_final[r, j])!r},"
                        f"{float(self.standardized[r, j])!r}\n"
                    )

    def summary_text(self) -> str:
        lines = [
            f"theorem: {self.theorem}",
            f"replicates: {self.replicates}",
            f"region sizes: {', '.join(str(n) for n in self.region_sizes)}",
            f"bandwidths: {', '.join(format(b, '.6g') for b in self.bandwidths)}",
            f"f_Y method: {self.fy_method}",
        ]
        for j, x in enumerate(self.eval_points):
            d, p = self.ks[j]
            lines.append(
                f"point x = {x:g}: f_Y = {self.fy[j]:.6g}, sigma = {self.sigma[j]:.6g}, "
                f"KS D = {d:.6g}, p = {p:.6g}"
            )
        for row in self.variance_ratios:
            n = row[0]
            ratios = ", ".join(format(v, ".4g") for v in row[1])
            lines.append(f"variance ratio at |Lambda| = {n}: {ratios}")
        if self.bias_rows is not None:
            for n, b, mean, fx, gap in self.bias_rows:
                lines.append(
                    f"bias at |Lambda| = {n} (b = {b:.4g}): mean fhat = {mean:.6g}, "
                    f"f_X = {fx:.6g}, gap = {gap:.6g}"
                )
        k = len(self.eval_points)
        if k >= 2:
            for a in range(k):
                for c in range(a + 1, k):
                    lines.append(
                        f"correlation ({self.eval_points[a]:g}, {self.eval_points[c]:g}): "
                        f"{self.correlations[a, c]:.6g}"
                    )
        return "\n".join(lines) + "\n"


def run_experiment(config: ExperimentConfig) -> CltReport:
    """Run the full replicate ensemble and assemble the CLT report.

    Deterministic given (config, base seed): replicate streams are
    indexed by (region index * R + replicate) and results are aggregated
    in replicate order regardless of scheduling.
    """
    config.validate()
    beta = config.noise.beta
    big_b = config.noise.limit_constant
    points = np.asarray(config.eval_points, dtype=float)
    fy, fy_method = fy_values(config.field_spec, config.noise, points, config.base_seed)
    sig = np.sqrt([sigma2(v, config.kernel, beta, big_b) for v in fy])
    if np.any(sig <= 0):
        raise ValueError("sigma(x) must be positive at every evaluation point")

    per_region = []
    for ri, region in enumerate(config.regions):
        per_region.append(_run_region(config, region, replicate_offset=ri * config.replicates))

    region_sizes = tuple(r.n_sites for r in config.regions)
    bandwidths = tuple(config.schedule.b(n) for n in region_sizes)

    # variance scaling ratio per region: n b^{2 beta + 1} Var(fhat) / sigma^2
    variance_ratios = []
    for results, n, b in zip(per_region, region_sizes, bandwidths):
        mat = np.stack([r.fhat for r in results])
        var = mat.var(axis=0, ddof=1)
        ratios = n * b ** (2.0 * beta + 1.0) * var / sig**2
        variance_ratios.append((n, tuple(float(v) for v in ratios)))

    # bias curve at the first evaluation point, when f_X is closed-form
    bias_rows = None
    closed = latent_marginal_density(config.field_spec)
    if closed is not None:
        fx0 = float(closed[0](points[0]))
        bias_rows = []
        for results, n, b in zip(per_region, region_sizes, bandwidths):
            mean0 = float(np.mean([r.fhat[0] for r in results]))
            bias_rows.append((n, b, mean0, fx0, abs(mean0 - fx0)))
        bias_rows = tuple(bias_rows)

    # standardized statistics at the final region, centered at the replicate mean
    final = per_region[-1]
    mat = np.stack([r.fhat for r in final])
    efhat = mat.mean(axis=0)
    n_final, b_final = region_sizes[-1], bandwidths[-1]
    standardized = np.stack(
        [standardize(mat[r], efhat, n_final, b_final, beta, 1.0) / sig for r in range(config.replicates)]
    )

    ks = tuple(ks_normality(standardized[:, j]) for j in range(points.size))
    if points.size >= 2:
        corr = np.corrcoef(standardized, rowvar=False)
    else:
        corr = np.ones((1, 1))

    return CltReport(
        eval_points=config.eval_points,
        replicates=config.replicates,
        region_sizes=region_sizes,
        bandwidths=bandwidths,
        fy=tuple(float(v) for v in fy),
        fy_method=fy_method,
        sigma=tuple(float(s) for s in sig),
        standardized=standardized,
        fhat_final=mat,
        ks=ks,
        correlations=np.asarray(corr, dtype=float).reshape(points.size, points.size),
        variance_ratios=tuple(variance_ratios),
        bias_rows=bias_rows,
        theorem=config.theorem,
    )


# ---------------------------------------------------------------------------
# focused curves (bias / variance only, cheaper than the full report)
# ---------------------------------------------------------------------------


def variance_scaling_curve(config: ExperimentConfig, regions: Optional[Sequence[LatticeRegion]] = None) -> list:
    """(|Lambda|, ratio) rows; ratio should trend toward 1."""
    cfg = config if regions is None else _with_regions(config, regions)
    if len(cfg.regions) < 3:
        raise ValueError("need at least 3 region sizes")
    report = run_experiment(cfg)
    return [(n, ratios[0]) for n, ratios in report.variance_ratios]


def bias_curve(config: ExperimentConfig, regions: Optional[Sequence[LatticeRegion]] = None) -> list:
    """(|Lambda|, b, mean fhat, f_X(x), gap) rows at the first point."""
    cfg = config if regions is None else _with_regions(config, regions)
    if latent_marginal_density(cfg.field_spec) is None:
        raise ValueError("bias curve needs a closed-form latent marginal (gaussian linear field)")
    report = run_experiment(cfg)
    return list(report.bias_rows)


def _with_regions(config: ExperimentConfig, regions) -> ExperimentConfig:
    from dataclasses import replace

    return replace(config, regions=tuple(regions))


def expected_fhat_quadrature(spec, noise: NoiseModel, kernel: DeconvKernel, b: float, x: float) -> float:
    """E fhat(x) = (1/b) int g((x - y)/b) f_Y(y) dy, quadrature cross-check.

    Available for Gaussian-marginal linear fields; used to validate the
    replicate-mean centering.
    """
    closed = latent_marginal_density(spec)
    if closed is None:
        raise ValueError("quadrature centering needs a closed-form latent marginal")
    sd = math.sqrt(spec.marginal_variance)
    table = GnTable(kernel, noise, b)
    lo, hi = -12.0 * sd - 12.0, 12.0 * sd + 12.0
    from .deconv import _composite_panels

    y, w = _composite_panels(lo, hi, panel=min(1.0, b / 2.0), order=16)
    fy = (
        closed[0](y)
        if noise.tag == "none"
        else fy_gaussian_convolution(sd, noise, y)
    )
    return float(np.sum(w * table((x - y) / b) * fy)) / b
