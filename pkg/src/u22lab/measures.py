"""Measures on the triangular chart, Monte-Carlo engines, and the divergence probe.

Coordinates on the group are (r1, r2, r) with Lebesgue reference measure
ds = dr1 dr2 d(Re r) d(Im r).  Right translation s -> s s0 has constant
Jacobian pi(s0) = r1(s0)^3 r2(s0), so the right Haar measure is
pi(s)^-1 ds.  The working almost-invariant measure is |s|^-4 ds, which in
polar coordinates s = r w (|w| = 1) reads r^-1 dr dw.

Monte-Carlo integrals are importance sampled: a sampler provides points and
its own density relative to ds, and the estimate of  integral F d(measure)
over the sampler's support is the sample mean of F * density_ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .groups import TriangularS, as_generator
from .points import SPoints

__all__ = [
    "NonFinite",
    "MeasureSpec",
    "lebesgue_measure",
    "haar_measure",
    "nu_measure",
    "truncated_nu",
    "OMEGA_PATCH_MASS",
    "norm_s",
    "modulus_pi",
    "singular_values",
    "rn_derivative_right",
    "nu_derivative_band",
    "right_translation_jacobian_fd",
    "polar_decompose_s",
    "polar_measure_weight",
    "PolarShellSampler",
    "LogNormalSampler",
    "BoxSampler",
    "IntegralEstimate",
    "MCAccumulator",
    "BATCH_SIZE",
    "integrate_mc",
    "DivergenceVerdict",
    "divergence_probe",
]

# Area of the unit-sphere patch {|x| = 1, x1 > 0, x2 > 0} in R^4:
# one quarter of the full 3-sphere area 2 pi^2.
OMEGA_PATCH_MASS = math.pi**2 / 2.0

# Defaults for the radial cutoff of the polar importance sampler; integrands
# in this package carry exp(-|s|) decay, so 30 is far past their support.
DEFAULT_R_MIN = 1e-4
DEFAULT_R_MAX = 30.0

BATCH_SIZE = 1 << 18

# Divergence-probe thresholds.
CONVERGED_REL_TAIL = 0.01  # last increment / total below this -> convergent
SLOPE_SIGNIFICANCE = 5.0  # slope must exceed this many standard errors
LINEAR_R2_MIN = 0.99  # linear fit quality required for log divergence
POWER_GROWTH_RATIO = 2.0  # growing increments beyond this -> power divergence


class NonFinite(FloatingPointError):
    """A Monte-Carlo sample evaluated to NaN or infinity."""


@dataclass(frozen=True)
class MeasureSpec:
    """A measure on the open chart given by its density against Lebesgue."""

    name: str
    density: Callable[[SPoints], np.ndarray]


def lebesgue_measure() -> MeasureSpec:
    return MeasureSpec("lebesgue", lambda pts: np.ones(pts.size))


def haar_measure() -> MeasureSpec:
    """Right-invariant measure pi(s)^-1 ds with pi(s) = r1^3 r2."""
    return MeasureSpec("haar", lambda pts: 1.0 / (pts.r1**3 * pts.r2))


def nu_measure() -> MeasureSpec:
    """The almost-invariant measure |s|^-4 ds."""
    return MeasureSpec("nu", lambda pts: pts.norms() ** -4.0)


def truncated_nu(r_min: float) -> MeasureSpec:
    """Control measure: |s|^-4 ds cut off below radius r_min."""

    def density(pts: SPoints) -> np.ndarray:
        norms = pts.norms()
        return np.where(norms >= r_min, norms**-4.0, 0.0)

    return MeasureSpec(f"nu-truncated-{r_min:g}", density)


# ---------------------------------------------------------------------------
# scalar chart functions


def norm_s(s: TriangularS) -> float:
    """|s| = sqrt(r1^2 + r2^2 + |r|^2)."""
    return s.norm()


def modulus_pi(s: TriangularS) -> float:
    """The translation Jacobian pi(s) = r1^3 r2; multiplicative."""
    return s.r1**3 * s.r2


def singular_values(s: TriangularS) -> tuple[float, float]:
    """(smallest, largest) singular value of the 2x2 matrix of s."""
    vals = np.linalg.svd(s.matrix(), compute_uv=False)
    return float(vals[-1]), float(vals[0])


def rn_derivative_right(measure: MeasureSpec, s: TriangularS, s0: TriangularS) -> float:
    """Density of the right-translated measure against the original at s.

    Equals density(s s0) * pi(s0) / density(s); for the Haar measure it is
    identically 1, and for |s|^-4 ds it is pi(s0) (|s| / |s s0|)^4.
    """
    num = float(measure.density(SPoints.single(s.multiply(s0)))[0]) * modulus_pi(s0)
    den = float(measure.density(SPoints.single(s))[0])
    return num / den


def nu_derivative_band(s0: TriangularS) -> tuple[float, float]:
    """Analytic bounds [pi(s0)/smax^4, pi(s0)/smin^4] for the |s|^-4 measure."""
    smin, smax = singular_values(s0)
    p = modulus_pi(s0)
    return p / smax**4, p / smin**4


def right_translation_jacobian_fd(s: TriangularS, s0: TriangularS, h: float = 1e-6) -> float:
    """Jacobian determinant of s -> s s0 by central differences (oracle use)."""

    def chart(v: np.ndarray) -> np.ndarray:
        el = TriangularS(v[0], v[1], complex(v[2], v[3]))
        out = el.multiply(s0)
        return np.array([out.r1, out.r2, out.r.real, out.r.imag])

    base = np.array([s.r1, s.r2, s.r.real, s.r.imag])
    jac = np.zeros((4, 4))
    for j in range(4):
        dv = np.zeros(4)
        dv[j] = h
        jac[:, j] = (chart(base + dv) - chart(base - dv)) / (2.0 * h)
    return float(np.linalg.det(jac))


def polar_decompose_s(s: TriangularS) -> tuple[float, TriangularS]:
    """Split s = r w with r = |s| and |w| = 1."""
    r = s.norm()
    return r, s.scale(1.0 / r)


def polar_measure_weight(r) -> np.ndarray:
    """Radial density r^-1 of the |s|^-4 measure in polar coordinates."""
    return 1.0 / np.asarray(r, dtype=float)


# ---------------------------------------------------------------------------
# samplers: each provides points plus its own density against Lebesgue ds


@dataclass(frozen=True)
class PolarShellSampler:
    """Log-uniform radius on [r_min, r_max], uniform direction on the patch.

    The direction of an isotropic Gaussian conditioned on the two positive
    coordinates is uniform on the patch, so the Lebesgue density is
    |s|^-4 / (log(r_max/r_min) * patch_mass) inside the annulus.
    """

    r_min: float = DEFAULT_R_MIN
    r_max: float = DEFAULT_R_MAX

    def __post_init__(self):
        if not (0.0 < self.r_min < self.r_max):
            raise ValueError("need 0 < r_min < r_max")

    @property
    def log_ratio(self) -> float:
        return math.log(self.r_max / self.r_min)

    def sample(self, n: int, rng: np.random.Generator) -> SPoints:
        radii = self.r_min * (self.r_max / self.r_min) ** rng.random(n)
        x = rng.standard_normal((n, 4))
        x[:, 0] = np.abs(x[:, 0])
        x[:, 1] = np.abs(x[:, 1])
        lengths = np.sqrt(np.sum(x**2, axis=1))
        x /= lengths[:, None]
        return SPoints(radii * x[:, 0], radii * x[:, 1], radii * (x[:, 2] + 1j * x[:, 3]))

    def density(self, pts: SPoints) -> np.ndarray:
        norms = pts.norms()
        inside = (norms >= self.r_min) & (norms <= self.r_max)
        return np.where(inside, norms**-4.0 / (self.log_ratio * OMEGA_PATCH_MASS), 0.0)


@dataclass(frozen=True)
class LogNormalSampler:
    """Independent lognormal diagonal coordinates and Gaussian off-diagonal."""

    mu1: float = 0.0
    mu2: float = 0.0
    tau: float = 1.0
    sigma_r: float = 1.0

    def sample(self, n: int, rng: np.random.Generator) -> SPoints:
        r1 = np.exp(self.mu1 + self.tau * rng.standard_normal(n))
        r2 = np.exp(self.mu2 + self.tau * rng.standard_normal(n))
        re = self.sigma_r * rng.standard_normal(n)
        im = self.sigma_r * rng.standard_normal(n)
        return SPoints(r1, r2, re + 1j * im)

    def density(self, pts: SPoints) -> np.ndarray:
        t1 = (np.log(pts.r1) - self.mu1) / self.tau
        t2 = (np.log(pts.r2) - self.mu2) / self.tau
        d1 = np.exp(-0.5 * t1**2) / (pts.r1 * self.tau * math.sqrt(2 * math.pi))
        d2 = np.exp(-0.5 * t2**2) / (pts.r2 * self.tau * math.sqrt(2 * math.pi))
        dre = np.exp(-0.5 * (pts.r.real / self.sigma_r) ** 2) / (
            self.sigma_r * math.sqrt(2 * math.pi)
        )
        dim = np.exp(-0.5 * (pts.r.imag / self.sigma_r) ** 2) / (
            self.sigma_r * math.sqrt(2 * math.pi)
        )
        return d1 * d2 * dre * dim


@dataclass(frozen=True)
class BoxSampler:
    """Uniform sampler on an axis-aligned box in chart coordinates."""

    r1_lo: float
    r1_hi: float
    r2_lo: float
    r2_hi: float
    re_lo: float
    re_hi: float
    im_lo: float
    im_hi: float

    @property
    def volume(self) -> float:
        return (
            (self.r1_hi - self.r1_lo)
            * (self.r2_hi - self.r2_lo)
            * (self.re_hi - self.re_lo)
            * (self.im_hi - self.im_lo)
        )

    def sample(self, n: int, rng: np.random.Generator) -> SPoints:
        r1 = rng.uniform(self.r1_lo, self.r1_hi, n)
        r2 = rng.uniform(self.r2_lo, self.r2_hi, n)
        re = rng.uniform(self.re_lo, self.re_hi, n)
        im = rng.uniform(self.im_lo, self.im_hi, n)
        return SPoints(r1, r2, re + 1j * im)

    def density(self, pts: SPoints) -> np.ndarray:
        inside = (
            (pts.r1 >= self.r1_lo)
            & (pts.r1 <= self.r1_hi)
            & (pts.r2 >= self.r2_lo)
            & (pts.r2 <= self.r2_hi)
            & (pts.r.real >= self.re_lo)
            & (pts.r.real <= self.re_hi)
            & (pts.r.imag >= self.im_lo)
            & (pts.r.imag <= self.im_hi)
        )
        return np.where(inside, 1.0 / self.volume, 0.0)


# ---------------------------------------------------------------------------
# estimates


@dataclass(frozen=True)
class IntegralEstimate:
    """A Monte-Carlo estimate with its standard error."""

    value: complex
    std_error: float
    sample_count: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("standard error must be nonnegative")

    @property
    def real(self) -> float:
        return float(np.real(self.value))


class MCAccumulator:
    """Mergeable (sum, sum of |x|^2, count) triple for streaming estimates."""

    __slots__ = ("total", "total_sq", "count")

    def __init__(self):
        self.total = 0.0 + 0.0j
        self.total_sq = 0.0
        self.count = 0

    def add(self, values: np.ndarray):
        self.total += complex(np.sum(values))
        self.total_sq += float(np.sum(np.abs(values) ** 2))
        self.count += int(values.size)

    def merge(self, other: "MCAccumulator"):
        self.total += other.total
        self.total_sq += other.total_sq
        self.count += other.count

    def estimate(self) -> IntegralEstimate:
        n = self.count
        mean = self.total / n
        var = max(self.total_sq - abs(self.total) ** 2 / n, 0.0) / max(n - 1, 1)
        value = mean.real if abs(mean.imag) == 0.0 else mean
        return IntegralEstimate(value, math.sqrt(var / n), n)


def _contributions(integrand, measure, sampler, pts, mode):
    values = integrand(pts)
    g = np.abs(values) ** 2 if mode == "square" else values
    weights = measure.density(pts) / sampler.density(pts)
    contrib = g * weights
    if not np.all(np.isfinite(contrib.view(float))):
        raise NonFinite("integrand produced a non-finite sample")
    return contrib


def integrate_mc(
    integrand,
    measure: MeasureSpec,
    sampler,
    n: int,
    rng,
    mode: str = "square",
) -> IntegralEstimate:
    """Importance-sampled integral over the sampler's support.

    ``mode="square"`` estimates the squared-modulus integral of the
    integrand; ``mode="plain"`` integrates the (possibly complex) values.
    Batches are merged through (sum, sum of squares, count) triples.
    """
    if n < 1000:
        raise ValueError("need at least 1000 samples")
    if mode not in ("square", "plain"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = as_generator(rng)
    acc = MCAccumulator()
    remaining = n
    while remaining > 0:
        batch = min(remaining, BATCH_SIZE)
        pts = sampler.sample(batch, rng)
        acc.add(_contributions(integrand, measure, sampler, pts, mode))
        remaining -= batch
    return acc.estimate()


# ---------------------------------------------------------------------------
# divergence probe


@dataclass(frozen=True)
class DivergenceVerdict:
    """Classification of the small-radius behavior of a squared-norm integral."""

    classification: str  # convergent | log-divergent | power-divergent | inconclusive
    slope: float
    slope_stderr: float
    r_squared: float
    fit_rms: float
    eps_ladder: tuple
    estimates: tuple  # (value, stderr) per ladder rung
    reason: str | None = None

    @property
    def is_divergent(self) -> bool:
        return self.classification in ("log-divergent", "power-divergent")


def _linear_fit(x: np.ndarray, y: np.ndarray):
    n = len(x)
    xbar, ybar = x.mean(), y.mean()
    sxx = float(np.sum((x - xbar) ** 2))
    slope = float(np.sum((x - xbar) * (y - ybar)) / sxx)
    intercept = ybar - slope * xbar
    resid = y - (intercept + slope * x)
    ss_res = float(np.sum(resid**2))
    ss_tot = float(np.sum((y - ybar) ** 2))
    rms = math.sqrt(ss_res / max(n - 2, 1))
    se_slope = rms / math.sqrt(sxx)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return slope, se_slope, r2, rms


def divergence_probe(
    integrand,
    measure: MeasureSpec,
    eps_sequence,
    r_max: float = DEFAULT_R_MAX,
    samples: int = 200_000,
    rng=0,
) -> DivergenceVerdict:
    """Classify I(eps) = integral of |F|^2 d(measure) over radius > eps.

    One nested sample on [min(eps), r_max] serves every ladder rung, so the
    increments between rungs are exact nonnegative shell sums.  The rules:

    * the relative tail increment below ``CONVERGED_REL_TAIL`` -> convergent;
    * else a linear fit of I against log(1/eps) with slope above
      ``SLOPE_SIGNIFICANCE`` standard errors, fit R^2 above
      ``LINEAR_R2_MIN``, and non-growing increments -> log-divergent;
    * else increments growing by more than ``POWER_GROWTH_RATIO``
      -> power-divergent;
    * otherwise inconclusive (reason reported, never raised).
    """
    eps = np.array(sorted(set(float(e) for e in eps_sequence), reverse=True))
    if len(eps) < 5:
        raise ValueError("need a decreasing ladder of at least 5 cutoffs")
    if eps[0] >= r_max or eps[-1] <= 0:
        raise ValueError("ladder must lie strictly inside (0, r_max)")
    rng = as_generator(rng)
    sampler = PolarShellSampler(float(eps[-1]), float(r_max))

    sums = np.zeros(len(eps))
    sums_sq = np.zeros(len(eps))
    total = 0
    remaining = samples
    while remaining > 0:
        batch = min(remaining, BATCH_SIZE)
        pts = sampler.sample(batch, rng)
        contrib = np.real(_contributions(integrand, measure, sampler, pts, "square"))
        radii = pts.norms()
        for j, cut in enumerate(eps):
            masked = np.where(radii >= cut, contrib, 0.0)
            sums[j] += masked.sum()
            sums_sq[j] += (masked**2).sum()
        total += batch
        remaining -= batch

    values = sums / total
    variances = np.maximum(sums_sq / total - values**2, 0.0)
    stderrs = np.sqrt(variances / total)
    estimates = tuple((float(v), float(se)) for v, se in zip(values, stderrs))

    x = np.log(1.0 / eps)
    slope, se_slope, r2, rms = _linear_fit(x, values)
    increments = np.diff(values)
    tiny = 1e-300
    rel_tail = increments[-1] / max(abs(values[-1]), tiny)
    growth = increments[-1] / max(increments[0], tiny)

    if rel_tail < CONVERGED_REL_TAIL:
        cls, reason = "convergent", None
    elif slope > SLOPE_SIGNIFICANCE * se_slope and r2 > LINEAR_R2_MIN and growth < POWER_GROWTH_RATIO:
        cls, reason = "log-divergent", None
    elif growth > POWER_GROWTH_RATIO:
        cls, reason = "power-divergent", None
    else:
        cls = "inconclusive"
        reason = (
            f"tail {rel_tail:.3g}, slope {slope:.3g} (se {se_slope:.3g}), "
            f"R2 {r2:.4f}, growth {growth:.3g}"
        )
    return DivergenceVerdict(
        cls, slope, se_slope, r2, rms, tuple(float(e) for e in eps), estimates, reason
    )
