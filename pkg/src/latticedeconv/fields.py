"""Simulation of latent, noise and observed fields on lattice regions.

Models: linear moving averages ``X_i = sum_s a_s eps_{i-s}`` and second
order Volterra fields ``X_i = sum a_{s1,s2} eps_{i-s1} eps_{i-s2}`` driven
by i.i.d. innovations, plus additive observation noise ``Y = X + theta``.

Admissible noise has an ordinary-smooth characteristic function:
``|t|^beta |phi_theta(t)| -> B`` for some ``beta, B > 0`` (assumption A3).
Gaussian noise violates A3 (supersmooth) and is rejected at construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .lattice import LatticeRegion, sup_norm_shell_count

# stream roles for the counter-based seeding scheme
ROLE_INNOVATIONS = 0
ROLE_NOISE = 1
ROLE_AUX = 2


def stream_rng(base_seed: int, replicate: int = 0, role: int = ROLE_INNOVATIONS) -> np.random.Generator:
    """Named per-replicate random stream.

    Streams are derived as (base_seed, replicate, role) spawn keys, so
    replicates can run in parallel without overlap and identical triples
    reproduce bit-identical draws.
    """
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(int(replicate), int(role)))
    return np.random.default_rng(ss)


# ---------------------------------------------------------------------------
# innovations
# ---------------------------------------------------------------------------

_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class InnovationSpec:
    """Mean-zero i.i.d. innovation law.

    Tags: ``normal`` (standard normal), ``uniform`` (on [-sqrt(3), sqrt(3)],
    unit variance) and ``laplace`` (centered, explicit scale).  Moments up
    to order 4 are known in closed form, which keeps the linear-field
    dependence coefficients exact.
    """

    tag: str = "normal"
    scale: float = 1.0  # laplace only

    def __post_init__(self):
        if self.tag not in ("normal", "uniform", "laplace"):
            raise ValueError(f"unknown innovation tag: {self.tag!r}")
        if self.tag == "laplace" and self.scale <= 0:
            raise ValueError("laplace scale must be positive")

    @property
    def variance(self) -> float:
        if self.tag == "laplace":
            return 2.0 * self.scale**2
        return 1.0

    def central_moment(self, p: int) -> float:
        """E eps^p for even p in {2, 4} (odd moments vanish by symmetry)."""
        if p == 2:
            return self.variance
        if p == 4:
            if self.tag == "normal":
                return 3.0
            if self.tag == "uniform":
                return 9.0 / 5.0
            return 24.0 * self.scale**4
        raise ValueError(f"moment order {p} not supported")

    def lp_norm(self, p: int) -> float:
        """||eps||_p for p in {2, 4}."""
        return self.central_moment(p) ** (1.0 / p)

    def coupling_norm(self, p: int) -> float:
        """||eps - eps'||_p for an independent copy eps', p in {2, 4}."""
        if p == 2:
            return math.sqrt(2.0 * self.variance)
        if p == 4:
            m4 = self.central_moment(4)
            v = self.variance
            return (2.0 * m4 + 6.0 * v * v) ** 0.25
        raise ValueError(f"moment order {p} not supported")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.tag == "normal":
            return rng.standard_normal(size)
        if self.tag == "uniform":
            return rng.uniform(-_SQRT3, _SQRT3, size)
        return rng.laplace(0.0, self.scale, size)


# ---------------------------------------------------------------------------
# field specs
# ---------------------------------------------------------------------------


def _site_key(site, d) -> tuple:
    t = tuple(int(c) for c in site)
    if len(t) != d:
        raise ValueError(f"site {site} does not have dimension {d}")
    return t


@dataclass(frozen=True)
class LinearFieldSpec:
    """Finite-support linear moving-average field."""

    dimension: int
    coefficients: tuple  # ((site, value), ...)
    innovations: InnovationSpec = InnovationSpec()
    truncation_deficit: float = 0.0  # sum of a_s^2 dropped when truncating an infinite support

    def __post_init__(self):
        object.__setattr__(
            self,
            "coefficients",
            tuple((_site_key(s, self.dimension), float(v)) for s, v in self.coefficients),
        )
        keys = [s for s, _ in self.coefficients]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate coefficient sites")

    @property
    def support_radius(self) -> int:
        """Largest sup-norm of a support site (0 for empty support)."""
        nz = [s for s, v in self.coefficients if v != 0.0]
        if not nz:
            return 0
        return max(max(abs(c) for c in s) for s in nz)

    @property
    def support_diameter(self) -> int:
        """Largest sup-norm distance between two nonzero-coefficient sites."""
        nz = [s for s, v in self.coefficients if v != 0.0]
        if len(nz) < 2:
            return 0
        return max(
            max(abs(a - b) for a, b in zip(s1, s2)) for s1 in nz for s2 in nz
        )

    @property
    def marginal_variance(self) -> float:
        return self.innovations.variance * sum(v * v for _, v in self.coefficients)

    @staticmethod
    def iid(dimension: int, innovations: InnovationSpec = InnovationSpec()) -> "LinearFieldSpec":
        return LinearFieldSpec(dimension, (((0,) * dimension, 1.0),), innovations)

    @staticmethod
    def from_decay(dimension, amplitude, rate, radius, innovations=InnovationSpec()):
        """Truncate an isotropic decaying support ``a_s = amplitude |s|^-rate``.

        Sites with ``|s| > radius`` are dropped; the discarded variance
        ``sum_{|s|>radius} a_s^2`` is recorded on the spec so users can see
        the truncation cost.
        """
        if radius < 1:
            raise ValueError("truncation radius must be >= 1")
        coeffs = [((0,) * dimension, float(amplitude))]
        rng_axes = range(-radius, radius + 1)
        from itertools import product

        for s in product(rng_axes, repeat=dimension):
            norm = max(abs(c) for c in s)
            if norm == 0:
                continue
            coeffs.append((s, float(amplitude) * norm ** (-float(rate))))
        # discarded variance, shell sums until negligible
        deficit = 0.0
        m = radius + 1
        while True:
            term = sup_norm_shell_count(dimension, m) * (amplitude * m ** (-rate)) ** 2
            deficit += term
            if term < 1e-15 * max(deficit, 1e-300) or m > 10**6:
                break
            m += 1
        return LinearFieldSpec(dimension, tuple(coeffs), innovations, truncation_deficit=deficit)


@dataclass(frozen=True)
class VolterraFieldSpec:
    """Second order Volterra field with zero diagonal coefficients."""

    dimension: int
    coefficients: tuple  # ((site1, site2, value), ...)
    innovations: InnovationSpec = InnovationSpec()

    def __post_init__(self):
        norm = []
        for s1, s2, v in self.coefficients:
            k1 = _site_key(s1, self.dimension)
            k2 = _site_key(s2, self.dimension)
            if k1 == k2 and float(v) != 0.0:
                raise ValueError(f"diagonal coefficient at {k1} must be zero")
            norm.append((k1, k2, float(v)))
        object.__setattr__(self, "coefficients", tuple(norm))
        keys = [(k1, k2) for k1, k2, _ in self.coefficients]
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate coefficient site pairs")


@dataclass(frozen=True)
class FieldSample:
    """A realization of real values indexed by the sites of a region."""

    region: LatticeRegion
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.region.n_sites,):
            raise ValueError("values must align with the region's site enumeration")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


# ---------------------------------------------------------------------------
# noise models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseModel:
    """Additive observation-noise law with ordinary-smooth cf.

    ``beta`` and ``limit_constant`` describe the polynomial cf decay
    ``|t|^beta |phi(t)| -> limit_constant``; both enter the deconvolution
    variance constants downstream.
    """

    tag: str
    beta: float
    limit_constant: float
    cf: Callable[[np.ndarray], np.ndarray]
    density: Callable[[np.ndarray], np.ndarray]
    sampler: Optional[Callable[[np.random.Generator, int], np.ndarray]]
    params: dict = field(default_factory=dict)

    @staticmethod
    def none() -> "NoiseModel":
        return NoiseModel(
            tag="none",
            beta=0.0,
            limit_constant=1.0,
            cf=lambda t: np.ones_like(np.asarray(t, dtype=float)),
            density=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
            sampler=None,
        )

    @staticmethod
    def laplace(scale: float = 1.0) -> "NoiseModel":
        if scale <= 0:
            raise ValueError("laplace scale must be positive")
        s = float(scale)
        return NoiseModel(
            tag="laplace",
            beta=2.0,
            limit_constant=1.0 / s**2,
            cf=lambda t: 1.0 / (1.0 + (s * np.asarray(t, dtype=float)) ** 2),
            density=lambda x: np.exp(-np.abs(np.asarray(x, dtype=float)) / s) / (2.0 * s),
            sampler=lambda rng, n: rng.laplace(0.0, s, n),
            params={"scale": s},
        )

    @staticmethod
    def symmetrized_gamma(shape: float, scale: float = 1.0) -> "NoiseModel":
        """Difference of two i.i.d. Gamma(shape, scale) variables.

        cf ``(1 + scale^2 t^2)^-shape``, so beta = 2*shape and
        B = scale^(-2*shape).  The density is the Bessel-K (variance
        gamma) form, defined for shape > 1/2.
        """
        if shape <= 0.5:
            raise ValueError("symmetrized-gamma shape must exceed 1/2")
        if scale <= 0:
            raise ValueError("scale must be positive")
        k, s = float(shape), float(scale)

        def cf(t):
            return (1.0 + (s * np.asarray(t, dtype=float)) ** 2) ** (-k)

        def density(x):
            from scipy import special

            nu = k - 0.5
            z = np.abs(np.atleast_1d(np.asarray(x, dtype=float))) / s
            small = z < 1e-8
            zs = np.where(small, 1.0, z)
            out = (zs / 2.0) ** nu * special.kv(nu, zs) / (s * math.sqrt(math.pi) * special.gamma(k))
            at0 = special.gamma(nu) / (2.0 * s * math.sqrt(math.pi) * special.gamma(k))
            return np.where(small, at0, out)

        return NoiseModel(
            tag="symmetrized_gamma",
            beta=2.0 * k,
            limit_constant=s ** (-2.0 * k),
            cf=cf,
            density=density,
            sampler=lambda rng, n: rng.gamma(k, s, n) - rng.gamma(k, s, n),
            params={"shape": k, "scale": s},
        )

    @staticmethod
    def from_tag(tag: str, **params) -> "NoiseModel":
        if tag == "none":
            return NoiseModel.none()
        if tag == "laplace":
            return NoiseModel.laplace(params.get("scale", 1.0))
        if tag in ("symmetrized_gamma", "gamma"):
            return NoiseModel.symmetrized_gamma(params["shape"], params.get("scale", 1.0))
        if tag in ("gaussian", "normal"):
            raise ValueError(
                "noise violates A3: the Gaussian characteristic function decays "
                "faster than any polynomial (no beta, B with |t|^beta |phi(t)| -> B)"
            )
        raise ValueError(f"unknown noise tag: {tag!r}")


# ---------------------------------------------------------------------------
# simulation
# ---------------------------------------------------------------------------


def _innovation_box(region: LatticeRegion, shift_sites) -> tuple:
    """Bounding box of {i - s : i in region, s in shifts} as (lo, shape)."""
    arr = region.site_array()
    shifts = np.asarray(list(shift_sites), dtype=np.int64).reshape(-1, region.dimension)
    lo = arr.min(axis=0) - shifts.max(axis=0)
    hi = arr.max(axis=0) - shifts.min(axis=0)
    return lo, (hi - lo + 1)


def _box_flat_index(coords: np.ndarray, lo: np.ndarray, shape: np.ndarray) -> np.ndarray:
    rel = coords - lo
    return np.ravel_multi_index(tuple(rel.T), tuple(int(n) for n in shape))


def simulate_linear(region: LatticeRegion, spec: LinearFieldSpec, seed, replicate: int = 0) -> FieldSample:
    """Draw one realization of a linear field on the region.

    Innovations are drawn once on the bounding box of the region dilated
    by the coefficient support, so every ``eps_{i-s}`` is a single shared
    draw; the convolution is then exact.
    """
    if spec.dimension != region.dimension:
        raise ValueError("field spec and region dimensions differ")
    rng = stream_rng(seed, replicate, ROLE_INNOVATIONS)
    coeffs = [(s, v) for s, v in spec.coefficients if v != 0.0]
    if not coeffs:
        return FieldSample(region, np.zeros(region.n_sites))
    lo, shape = _innovation_box(region, [s for s, _ in coeffs])
    eps = spec.innovations.sample(rng, tuple(int(n) for n in shape)).ravel()
    arr = region.site_array()
    x = np.zeros(region.n_sites)
    for s, v in coeffs:
        idx = _box_flat_index(arr - np.asarray(s, dtype=np.int64), lo, shape)
        x += v * eps[idx]
    return FieldSample(region, x)


def simulate_volterra(region: LatticeRegion, spec: VolterraFieldSpec, seed, replicate: int = 0) -> FieldSample:
    """Draw one realization of a second order Volterra field."""
    if spec.dimension != region.dimension:
        raise ValueError("field spec and region dimensions differ")
    rng = stream_rng(seed, replicate, ROLE_INNOVATIONS)
    coeffs = [(s1, s2, v) for s1, s2, v in spec.coefficients if v != 0.0]
    if not coeffs:
        return FieldSample(region, np.zeros(region.n_sites))
    shifts = [s1 for s1, _, _ in coeffs] + [s2 for _, s2, _ in coeffs]
    lo, shape = _innovation_box(region, shifts)
    eps = spec.innovations.sample(rng, tuple(int(n) for n in shape)).ravel()
    arr = region.site_array()
    x = np.zeros(region.n_sites)
    for s1, s2, v in coeffs:
        i1 = _box_flat_index(arr - np.asarray(s1, dtype=np.int64), lo, shape)
        i2 = _box_flat_index(arr - np.asarray(s2, dtype=np.int64), lo, shape)
        x += v * eps[i1] * eps[i2]
    return FieldSample(region, x)


def simulate_field(region: LatticeRegion, spec, seed, replicate: int = 0) -> FieldSample:
    if isinstance(spec, LinearFieldSpec):
        return simulate_linear(region, spec, seed, replicate)
    if isinstance(spec, VolterraFieldSpec):
        return simulate_volterra(region, spec, seed, replicate)
    raise TypeError(f"unknown field spec type: {type(spec).__name__}")


def add_noise(x: FieldSample, noise: NoiseModel, seed, replicate: int = 0) -> FieldSample:
    """Observed field ``Y = X + theta`` with i.i.d. noise from its own stream."""
    if noise.tag == "none":
        return x
    if noise.sampler is None:
        raise ValueError(f"noise model {noise.tag!r} has no sampler")
    rng = stream_rng(seed, replicate, ROLE_NOISE)
    theta = noise.sampler(rng, x.region.n_sites)
    return FieldSample(x.region, x.values + theta)


# ---------------------------------------------------------------------------
# dependence and mixing profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DependenceProfile:
    """Coupling-distance coefficients delta_{i,p} of a field.

    Exact for linear fields, a Rosenthal-type upper bound for Volterra
    fields (``exact`` is False there).  Finite-support profiles evaluate
    to 0 outside the support; infinite profiles carry a polynomial decay
    tag ``delta_i = amplitude * |i|^-rate`` instead.
    """

    dimension: int
    p: float
    evaluator: Callable[[tuple], float]
    exact: bool = True
    support_radius: Optional[int] = None  # None means infinite support
    decay: Optional[tuple] = None  # (amplitude, rate) for infinite tails

    def __call__(self, site) -> float:
        return self.evaluator(tuple(int(c) for c in site))


def dependence_linear(spec: LinearFieldSpec, p: int) -> DependenceProfile:
    """Exact delta_{i,p} = |a_i| * ||eps - eps'||_p for a linear field."""
    if p < 1:
        raise ValueError("p must be >= 1")
    norm = spec.innovations.coupling_norm(p)  # raises for unsupported p
    table = {s: abs(v) * norm for s, v in spec.coefficients}
    return DependenceProfile(
        dimension=spec.dimension,
        p=float(p),
        evaluator=lambda s: table.get(s, 0.0),
        exact=True,
        support_radius=spec.support_radius,
    )


def dependence_volterra(spec: VolterraFieldSpec, p: int) -> DependenceProfile:
    """Rosenthal-type upper bound on delta_{i,p} for a Volterra field.

    delta_{i,p} <= C_p A_i^{1/2} ||eps||_2 ||eps||_p + C_p B_i^{1/p} ||eps||_p^2
    with A_i = sum(a_{s,i}^2 + a_{i,s}^2), B_i = sum(|a_{s,i}|^p + |a_{i,s}|^p).
    C_p is fixed to p, a crude but valid constant for the shipped p; only
    the summability of the profile matters downstream, not its scale.
    """
    if p < 2:
        raise ValueError("p must be >= 2 for the Volterra bound")
    n2 = spec.innovations.lp_norm(2)
    npp = spec.innovations.lp_norm(p)
    cp = float(p)

    a_sum: dict = {}
    b_sum: dict = {}
    radius = 0
    for s1, s2, v in spec.coefficients:
        if v == 0.0:
            continue
        for i in (s1, s2):
            a_sum[i] = a_sum.get(i, 0.0) + v * v
            b_sum[i] = b_sum.get(i, 0.0) + abs(v) ** p
            radius = max(radius, max(abs(c) for c in i))

    def ev(s):
        a = a_sum.get(s, 0.0)
        b = b_sum.get(s, 0.0)
        if a == 0.0 and b == 0.0:
            return 0.0
        return cp * math.sqrt(a) * n2 * npp + cp * b ** (1.0 / p) * npp**2

    return DependenceProfile(
        dimension=spec.dimension,
        p=float(p),
        evaluator=ev,
        exact=False,
        support_radius=radius,
    )


def decay_dependence_profile(dimension: int, amplitude: float, rate: float, p: float = 2.0) -> DependenceProfile:
    """Polynomial-decay profile delta_i = amplitude * |i|^-rate (|i| >= 1)."""

    def ev(s):
        n = max(abs(c) for c in s)
        if n == 0:
            return 0.0
        return amplitude * float(n) ** (-rate)

    return DependenceProfile(
        dimension=dimension,
        p=float(p),
        evaluator=ev,
        exact=True,
        support_radius=None,
        decay=(float(amplitude), float(rate)),
    )


@dataclass(frozen=True)
class MixingProfile:
    """Strong mixing rate m -> alpha(m), nonincreasing with values in [0, 1/4].

    Tags: ``m_dependent`` (alpha vanishes beyond a cutoff) or
    ``polynomial`` (alpha(m) = min(1/4, amplitude * m^-rate)).  ``tau``
    records which one-vs-tau coefficient family the rate is meant for;
    for m-dependent fields both families vanish beyond the range.
    """

    tag: str
    cutoff: int = 0  # m_dependent
    amplitude: float = 0.25  # polynomial
    rate: float = 0.0  # polynomial
    tau: str = "inf"  # "1" or "inf"

    def __post_init__(self):
        if self.tag not in ("m_dependent", "polynomial"):
            raise ValueError(f"unknown mixing tag: {self.tag!r}")
        if self.tau not in ("1", "inf"):
            raise ValueError("tau tag must be '1' or 'inf'")
        if self.tag == "m_dependent" and self.cutoff < 0:
            raise ValueError("cutoff must be >= 0")
        if self.tag == "polynomial" and (self.amplitude < 0 or self.rate <= 0):
            raise ValueError("polynomial profile needs amplitude >= 0 and rate > 0")

    def alpha(self, m: int) -> float:
        if m < 1:
            raise ValueError("m must be >= 1")
        if self.tag == "m_dependent":
            return 0.25 if m <= self.cutoff else 0.0
        return min(0.25, self.amplitude * float(m) ** (-self.rate))

    @staticmethod
    def from_linear_spec(spec: LinearFieldSpec, tau: str = "inf") -> "MixingProfile":
        """m-dependence range of a finite-support linear field.

        Sites farther apart than the support diameter share no innovation,
        so every mixing coefficient vanishes there.
        """
        return MixingProfile(tag="m_dependent", cutoff=spec.support_diameter, tau=tau)


@dataclass(frozen=True)
class SummabilityVerdict:
    finite: bool
    partial_sum: float
    truncated_at: int
    reason: str


def check_dependence_summability(profile: DependenceProfile, d: int, cutoff: int = 10_000) -> SummabilityVerdict:
    """Decide whether sum_i |i|^{5d/2} delta_i is finite (condition (8)).

    Finite-support profiles give the exact finite sum.  Decay profiles are
    decided analytically (shell counts grow like m^{d-1}, so the series
    converges iff rate > 5d/2 + d) and a truncated numeric sum is reported.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    power = 2.5 * d
    if profile.support_radius is not None:
        total = 0.0
        from itertools import product

        r = profile.support_radius
        for s in product(range(-r, r + 1), repeat=d):
            n = max(abs(c) for c in s) if s else 0
            if n == 0:
                continue
            total += float(n) ** power * profile(s)
        return SummabilityVerdict(True, total, r, "finite support")
    if profile.decay is None:
        raise ValueError("infinite profile without a decay tag cannot be classified")
    amplitude, rate = profile.decay
    finite = rate > power + d
    partial = sum(
        sup_norm_shell_count(d, m) * float(m) ** power * amplitude * float(m) ** (-rate)
        for m in range(1, cutoff + 1)
    )
    reason = f"shell exponent {power + (d - 1) - rate:+.3g} {'< -1, converges' if finite else '>= -1, diverges'}"
    return SummabilityVerdict(finite, partial, cutoff, reason)


def check_mixing_summability(profile: MixingProfile, d: int, cutoff: int = 10_000) -> SummabilityVerdict:
    """Decide whether sum_m m^{2d-1} alpha(m) is finite (condition (7))."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if profile.tag == "m_dependent":
        total = sum(float(m) ** (2 * d - 1) * profile.alpha(m) for m in range(1, profile.cutoff + 1))
        return SummabilityVerdict(True, total, profile.cutoff, "m-dependent: finitely many terms")
    finite = profile.rate > 2 * d
    partial = sum(float(m) ** (2 * d - 1) * profile.alpha(m) for m in range(1, cutoff + 1))
    reason = f"exponent {2 * d - 1 - profile.rate:+.3g} {'< -1, converges' if finite else '>= -1, diverges'}"
    return SummabilityVerdict(finite, partial, cutoff, reason)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def innovation_to_dict(spec: InnovationSpec) -> dict:
    out = {"tag": spec.tag}
    if spec.tag == "laplace":
        out["scale"] = spec.scale
    return out


def innovation_from_dict(d) -> InnovationSpec:
    if isinstance(d, str):
        return InnovationSpec(tag=d)
    return InnovationSpec(tag=d["tag"], scale=d.get("scale", 1.0))


def field_spec_to_dict(spec) -> dict:
    if isinstance(spec, LinearFieldSpec):
        return {
            "model": "linear",
            "dimension": spec.dimension,
            "coefficients": [{"site": list(s), "value": v} for s, v in spec.coefficients],
            "innovations": innovation_to_dict(spec.innovations),
        }
    if isinstance(spec, VolterraFieldSpec):
        return {
            "model": "volterra",
            "dimension": spec.dimension,
            "coefficients": [
                {"site1": list(s1), "site2": list(s2), "value": v} for s1, s2, v in spec.coefficients
            ],
            "innovations": innovation_to_dict(spec.innovations),
        }
    raise TypeError(f"unknown field spec type: {type(spec).__name__}")


def field_spec_from_dict(d: dict):
    model = d.get("model")
    innov = innovation_from_dict(d.get("innovations", "normal"))
    dim = int(d["dimension"])
    if model == "iid":
        return LinearFieldSpec.iid(dim, innov)
    if model == "linear":
        coeffs = tuple((tuple(c["site"]), c["value"]) for c in d["coefficients"])
        return LinearFieldSpec(dim, coeffs, innov)
    if model == "volterra":
        coeffs = tuple((tuple(c["site1"]), tuple(c["site2"]), c["value"]) for c in d["coefficients"])
        return VolterraFieldSpec(dim, coeffs, innov)
    raise ValueError(f"unknown field model: {model!r}")


def noise_to_dict(noise: NoiseModel) -> dict:
    return {"tag": noise.tag, **noise.params}


def noise_from_dict(d: dict) -> NoiseModel:
    d = dict(d)
    return NoiseModel.from_tag(d.pop("tag"), **d)
