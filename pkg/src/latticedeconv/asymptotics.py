"""Asymptotic constants, bandwidth schedules and blocking sequences.

Closed-form kernel moments feed the limiting variance of the estimator,

    sigma^2(x) = f_Y(x) / (2 pi B^2) * integral |t|^{2 beta} phi_K(t)^2 dt,

where (beta, B) describe the noise cf decay.  Bandwidth schedules
b_n = c n^{-gamma} are validated symbolically against A5 (b_n -> 0,
n b_n -> infinity, n b_n^{2 beta + 1} -> infinity).  The blocking radii
m_{n,tau} and m_n couple the bandwidth to mixing / dependence tails and
are evaluated with exact sup-norm shell counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .deconv import DeconvKernel, _unit_leggauss
from .fields import DependenceProfile, MixingProfile, NoiseModel
from .lattice import sup_norm_shell_count

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# kernel moments and variance constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KernelMoments:
    """I2 = int |t|^{2 beta} phi_K^2 dt and I1 = int |t|^beta |phi_K| dt."""

    i2: float
    i1: float

    def __post_init__(self):
        if not (self.i2 > 0 and math.isfinite(self.i2)):
            raise ValueError("I2 must be positive and finite")
        if not (self.i1 > 0 and math.isfinite(self.i1)):
            raise ValueError("I1 must be positive and finite")


def kernel_moments(kernel: DeconvKernel, beta: float) -> KernelMoments:
    """Closed-form kernel moments (Beta-function identities)."""
    if beta < 0:
        raise ValueError("beta must be >= 0")
    if kernel.tag == "indicator":
        return KernelMoments(i2=2.0 / (2.0 * beta + 1.0), i1=2.0 / (beta + 1.0))
    m = kernel.order
    # 2 int_0^1 t^{2 beta} (1-t^2)^{2m} dt = B(beta + 1/2, 2m + 1)
    i2 = special.beta(beta + 0.5, 2 * m + 1)
    # 2 int_0^1 t^{beta} (1-t^2)^{m} dt = B((beta + 1)/2, m + 1)
    i1 = special.beta((beta + 1.0) / 2.0, m + 1)
    return KernelMoments(i2=float(i2), i1=float(i1))


def kernel_moments_quadrature(kernel: DeconvKernel, beta: float) -> KernelMoments:
    """Same moments by quadrature; cross-check for the closed forms."""
    t, w = _unit_leggauss(2048)
    i2 = 2.0 * float(np.sum(w * t ** (2.0 * beta) * kernel.cf(t) ** 2))
    i1 = 2.0 * float(np.sum(w * t**beta * np.abs(kernel.cf(t))))
    return KernelMoments(i2=i2, i1=i1)


def sigma2(fy_at_x: float, kernel: DeconvKernel, beta: float, limit_constant: float) -> float:
    """Asymptotic variance constant at a point with f_Y(x) = fy_at_x."""
    if fy_at_x < 0:
        raise ValueError("fY at x must be >= 0")
    if limit_constant <= 0:
        raise ValueError("limit constant B must be positive")
    i2 = kernel_moments(kernel, beta).i2
    return fy_at_x * i2 / (TWO_PI * limit_constant**2)


def eta(lam1: float, lam2: float, fy_x: float, fy_y: float, kernel: DeconvKernel, beta: float, limit_constant: float) -> float:
    """Variance of lam1 Z_x + lam2 Z_y in the bivariate limit (unit norm)."""
    if abs(lam1**2 + lam2**2 - 1.0) > 1e-12:
        raise ValueError("lambda coefficients must satisfy lam1^2 + lam2^2 = 1")
    if limit_constant <= 0:
        raise ValueError("limit constant B must be positive")
    i2 = kernel_moments(kernel, beta).i2
    return (lam1**2 * fy_x + lam2**2 * fy_y) * i2 / (TWO_PI * limit_constant**2)


def standardize(fhat, efhat, n_sites: int, b: float, beta: float, sigma: float):
    """(n b^{2 beta + 1})^{1/2} (fhat - E fhat) / sigma."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if b <= 0:
        raise ValueError("bandwidth must be positive")
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    factor = math.sqrt(n_sites * b ** (2.0 * beta + 1.0))
    return factor * (np.asarray(fhat, dtype=float) - np.asarray(efhat, dtype=float)) / sigma


# ---------------------------------------------------------------------------
# bandwidth schedules (A5)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BandwidthSchedule:
    """Power-law bandwidth rule b_n = c * n^{-gamma}."""

    c: float = 1.0
    gamma: float = 0.125

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("bandwidth constant c must be positive")

    def b(self, n_sites: int) -> float:
        if n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        return self.c * float(n_sites) ** (-self.gamma)

    def validate(self, beta: float) -> None:
        """Check A5 symbolically; raises naming the violated limit."""
        if self.gamma <= 0:
            raise ValueError("schedule violates A5: does not satisfy b_n -> 0 (need gamma > 0)")
        if self.gamma >= 1:
            raise ValueError("schedule violates A5: does not satisfy |Lambda_n| b_n -> infinity (need gamma < 1)")
        cap = 1.0 / (2.0 * beta + 1.0)
        if self.gamma >= cap:
            raise ValueError(
                "schedule violates A5: does not satisfy |Lambda_n| b_n^{2 beta + 1} -> infinity "
                f"(need gamma < 1/(2 beta + 1) = {cap:.6g}, got {self.gamma:.6g})"
            )


# ---------------------------------------------------------------------------
# blocking sequences
# ---------------------------------------------------------------------------


def _v_n(b: float, d: int) -> int:
    return int(float(b) ** (-1.0 / (2.0 * d)))


def _mixing_tail(v: int, profile: MixingProfile, d: int) -> float:
    """sum over sup-norm shells m > v of c_d(m) m^d alpha(m)."""
    if profile.tag == "m_dependent":
        return sum(
            sup_norm_shell_count(d, m) * float(m) ** d * profile.alpha(m)
            for m in range(v + 1, profile.cutoff + 1)
        )
    # polynomial: shell term ~ m^{2d - 1 - rate}; condition (7) equivalent
    if profile.rate <= 2 * d:
        raise ValueError(
            "mixing profile violates condition (7): sum of m^{2d-1} alpha(m) diverges "
            f"(rate {profile.rate:g} <= 2d = {2 * d})"
        )
    total = 0.0
    m = v + 1
    while True:
        term = sup_norm_shell_count(d, m) * float(m) ** d * profile.alpha(m)
        total += term
        if term < 1e-12 * max(total, 1e-300):
            return total
        m += 1


def m_seq_mixing(b: float, profile: MixingProfile, d: int) -> int:
    """Blocking radius m_{n,tau}: max{v, [ (tail / b)^{1/d} ] + 1}."""
    if not (0 < b < 1):
        raise ValueError("bandwidth must lie in (0, 1)")
    v = _v_n(b, d)
    tail = _mixing_tail(v, profile, d)
    return max(v, int((tail / b) ** (1.0 / d)) + 1)


def _dependence_tail(v: int, profile: DependenceProfile, d: int) -> float:
    """sum over sites |i| > v of |i|^{5d/2} delta_i."""
    power = 2.5 * d
    if profile.support_radius is not None:
        r = profile.support_radius
        total = 0.0
        if r > v:
            for s in product(range(-r, r + 1), repeat=d):
                n = max(abs(c) for c in s)
                if n <= v:
                    continue
                total += float(n) ** power * profile(s)
        return total
    if profile.decay is None:
        raise ValueError("infinite dependence profile without a decay tag")
    amplitude, rate = profile.decay
    # shell term ~ m^{d - 1 + 5d/2 - rate}; condition (8) equivalent
    if rate <= power + d:
        raise ValueError(
            "dependence profile violates condition (8): sum of |i|^{5d/2} delta_i diverges "
            f"(rate {rate:g} <= 5d/2 + d = {power + d:g})"
        )
    total = 0.0
    m = v + 1
    while True:
        term = sup_norm_shell_count(d, m) * float(m) ** power * amplitude * float(m) ** (-rate)
        total += term
        if term < 1e-12 * max(total, 1e-300):
            return total
        m += 1


def m_seq_dependence(b: float, profile: DependenceProfile, d: int) -> int:
    """Blocking radius m_n: max{v, [ (tail / b^3)^{1/(3d)} ] + 1}."""
    if not (0 < b < 1):
        raise ValueError("bandwidth must lie in (0, 1)")
    v = _v_n(b, d)
    tail = _dependence_tail(v, profile, d)
    return max(v, int((tail / b**3) ** (1.0 / (3.0 * d))) + 1)


# ---------------------------------------------------------------------------
# sequence-limit diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LemmaCheckRow:
    n_sites: int
    b: float
    m: int
    m_d_b: float  # m^d * b, should decrease toward 0
    tail_ratio: float  # tail / (m^d b) (mixing) or tail / (m^d b)^{3/2} (dependence)


@dataclass(frozen=True)
class LemmaCheckReport:
    kind: str
    rows: tuple
    m_increasing: bool
    m_d_b_decreasing: bool  # last value < first value
    m_d_b_below_threshold: bool  # last value <= threshold * first value
    tail_ratio_vanishing: bool

    @property
    def all_pass(self) -> bool:
        return self.m_increasing and self.m_d_b_decreasing and self.tail_ratio_vanishing


def check_lemma_limits(schedule: BandwidthSchedule, profile, d: int, kind: str, n_list: Sequence[int], threshold: float = 0.2) -> LemmaCheckReport:
    """Finite-n trend diagnostics for the blocking-sequence limits.

    Evaluates m, m^d b and the tail ratio along n_list and reports trend
    verdicts (monotone toward the limit; final value below threshold x
    initial for the vanishing quantities).  A diagnostic, not a proof.
    """
    if kind not in ("mixing", "dependence"):
        raise ValueError(f"unknown kind: {kind!r}")
    n_list = [int(n) for n in n_list]
    if len(n_list) < 4 or any(a >= c for a, c in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be increasing with at least 4 entries")
    rows = []
    for n in n_list:
        b = schedule.b(n)
        v = _v_n(b, d)
        if kind == "mixing":
            tail = _mixing_tail(v, profile, d)
            m = max(v, int((tail / b) ** (1.0 / d)) + 1)
            denom = (m**d * b)
            ratio = tail / denom
        else:
            tail = _dependence_tail(v, profile, d)
            m = max(v, int((tail / b**3) ** (1.0 / (3.0 * d))) + 1)
            denom = (m**d * b) ** 1.5
            ratio = tail / denom
        rows.append(LemmaCheckRow(n, b, m, m**d * b, ratio))

    m_inc = rows[-1].m > rows[0].m
    mb = [r.m_d_b for r in rows]
    ratios = [r.tail_ratio for r in rows]
    mb_dec = mb[-1] < mb[0]
    mb_below = mb[-1] <= threshold * mb[0] + 1e-300
    # identically-zero tails count as vanished
    ratio_van = ratios[-1] <= threshold * ratios[0] + 1e-300
    return LemmaCheckReport(kind, tuple(rows), m_inc, mb_dec, mb_below, ratio_van)


# ---------------------------------------------------------------------------
# f_Y helpers
# ---------------------------------------------------------------------------


def fy_gaussian_convolution(sd: float, noise: NoiseModel, x) -> np.ndarray:
    """Density of N(0, sd^2) + noise at x, by Fourier inversion.

    f_Y(x) = (1 / pi) int_0^inf cos(t x) exp(-sd^2 t^2 / 2) phi_theta(t) dt.
    """
    if sd <= 0:
        raise ValueError("standard deviation must be positive")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    # the Gaussian factor kills the integrand beyond ~10/sd
    upper = 12.0 / sd
    t, w = _unit_leggauss(2048)
    t = t * upper
    w = w * upper
    kern = w * np.exp(-0.5 * (sd * t) ** 2) * noise.cf(t)
    return (np.cos(np.outer(x, t)) @ kern) / math.pi
