"""Stochastic inputs for the market simulator.

Two ingredients drive the order flow: a long-memory sequence of order signs
(thresholded fractional Gaussian noise) and relative order prices drawn from
a composite density whose left and right halves may come from different
families (heavy-tailed Student / q-Gaussian, Laplace, or Gaussian), glued
together by a continuity constraint at zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betaincinv, gammaln


def log_beta(a: float, b: float) -> float:
    """log of the Beta function, via log-Gamma (stable for small arguments)."""
    return gammaln(a) + gammaln(b) - gammaln(a + b)


def beta_fn(a: float, b: float) -> float:
    return float(np.exp(log_beta(a, b)))


# ---------------------------------------------------------------------------
# Density families
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StudentQG:
    """Student (q-Gaussian) family: heavy tailed with tail exponent `alpha`.

    Density: sqrt(scale) * alpha^(alpha/2) / B(1/2, alpha/2)
             * (alpha + scale * x^2)^(-(alpha+1)/2)
    """

    alpha: float
    scale: float

    def __post_init__(self):
        if self.alpha <= 0 or self.scale <= 0:
            raise ValueError("StudentQG parameters must be positive")


@dataclass(frozen=True)
class Laplace:
    """Double-exponential family with rate `rate`: rate/2 * exp(-rate*|x|)."""

    rate: float

    def __post_init__(self):
        if self.rate <= 0:
            raise ValueError("Laplace rate must be positive")


@dataclass(frozen=True)
class Gaussian:
    """Zero-mean normal with standard deviation `sigma`."""

    sigma: float

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("Gaussian sigma must be positive")


DensityFamily = StudentQG | Laplace | Gaussian

FAMILY_NAMES = {"studentqg": StudentQG, "laplace": Laplace, "gaussian": Gaussian}


def family_name(fam: DensityFamily) -> str:
    return {StudentQG: "studentqg", Laplace: "laplace", Gaussian: "gaussian"}[type(fam)]


def density(fam: DensityFamily, x):
    """Pointwise probability density of a family; vectorized over x."""
    x = np.asarray(x, dtype=float)
    if isinstance(fam, StudentQG):
        a, s = fam.alpha, fam.scale
        norm = math.sqrt(s) * a ** (a / 2.0) / beta_fn(0.5, a / 2.0)
        out = norm * (a + s * x * x) ** (-(a + 1.0) / 2.0)
    elif isinstance(fam, Laplace):
        out = 0.5 * fam.rate * np.exp(-fam.rate * np.abs(x))
    elif isinstance(fam, Gaussian):
        s = fam.sigma
        out = np.exp(-x * x / (2.0 * s * s)) / (math.sqrt(2.0 * math.pi) * s)
    else:
        raise TypeError(f"unknown density family: {fam!r}")
    return out if out.ndim else float(out)


def solve_continuity(alpha_x: float, sigma_x: float) -> tuple[float, float, float]:
    """Solve the parameter triple (scale, rate, sigma) so that all three
    families have equal density at zero.

    The StudentQG scale follows from the target scale sigma_x:
        scale = alpha_x / ((1 + alpha_x) * sigma_x^2)
    and the Laplace rate / Gaussian sigma are then pinned by matching the
    central density sqrt(scale/alpha_x) / B(1/2, alpha_x/2).  The returned
    triple always satisfies rate^2 * sigma^2 = 2/pi.
    """
    if alpha_x <= 0 or sigma_x <= 0:
        raise ValueError("alpha_x and sigma_x must be positive")
    scale = alpha_x / ((1.0 + alpha_x) * sigma_x**2)
    b = beta_fn(0.5, alpha_x / 2.0)
    rate = 2.0 * math.sqrt(scale / alpha_x) / b
    sigma = b / math.sqrt(2.0 * math.pi * scale / alpha_x)
    return scale, rate, sigma


# ---------------------------------------------------------------------------
# Composite relative-price sampler
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PriceSamplerSpec:
    """Composite density: `left` governs x < 0, `right` governs x > 0.

    Both halves must agree at zero (each family is symmetric and zero-mean,
    so each half carries probability mass 1/2 and the composite is a proper
    density).
    """

    left: DensityFamily
    right: DensityFamily
    sigma_x: float

    def __post_init__(self):
        if self.sigma_x <= 0:
            raise ValueError("sigma_x must be positive")
        f0_l = density(self.left, 0.0)
        f0_r = density(self.right, 0.0)
        if abs(f0_l - f0_r) > 1e-10 * f0_l:
            raise ValueError(
                f"left/right densities disagree at 0: {f0_l!r} vs {f0_r!r}"
            )


def make_sampler_spec(left: str, right: str, alpha_x: float,
                      sigma_x: float = 0.0024) -> PriceSamplerSpec:
    """Build a composite sampler from family names; parameters are always
    solved from (alpha_x, sigma_x), never hand-set."""
    scale, rate, sigma = solve_continuity(alpha_x, sigma_x)
    built = {
        "studentqg": StudentQG(alpha_x, scale),
        "laplace": Laplace(rate),
        "gaussian": Gaussian(sigma),
    }
    try:
        return PriceSamplerSpec(built[left.lower()], built[right.lower()], sigma_x)
    except KeyError as exc:
        raise ValueError(f"unknown density family name: {exc.args[0]!r}") from None


def _sample_magnitude(fam: DensityFamily, rng: np.random.Generator, n: int):
    """Draw |x| for one symmetric family (the half-density magnitude)."""
    if isinstance(fam, StudentQG):
        # Exact inverse CDF: for t ~ Student(alpha), alpha/(alpha+t^2) is
        # Beta(alpha/2, 1/2); invert and rescale by sqrt(alpha/scale).
        u = rng.random(n)
        w = betaincinv(fam.alpha / 2.0, 0.5, u)
        return np.sqrt(fam.alpha / fam.scale) * np.sqrt((1.0 - w) / w)
    if isinstance(fam, Laplace):
        return rng.exponential(scale=1.0 / fam.rate, size=n)
    if isinstance(fam, Gaussian):
        return fam.sigma * np.abs(rng.standard_normal(n))
    raise TypeError(f"unknown density family: {fam!r}")


def sample_relative_price(spec: PriceSamplerSpec, rng: np.random.Generator,
                          size: int | None = None):
    """Draw relative prices from the composite density.

    The sign is negative/positive with probability 1/2 each; the magnitude
    comes from the corresponding half-density.  Returns a scalar when `size`
    is None, else an ndarray of length `size`.
    """
    n = 1 if size is None else int(size)
    negative = rng.random(n) < 0.5
    out = np.empty(n)
    n_left = int(negative.sum())
    if n_left:
        out[negative] = -_sample_magnitude(spec.left, rng, n_left)
    if n - n_left:
        out[~negative] = _sample_magnitude(spec.right, rng, n - n_left)
    return out if size is not None else float(out[0])


# ---------------------------------------------------------------------------
# Long-memory order signs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SignSeries:
    values: np.ndarray  # elements are exactly +1 / -1
    target_hurst: float


def fgn_autocovariance(hurst: float, lags: np.ndarray) -> np.ndarray:
    k = np.abs(lags).astype(float)
    h2 = 2.0 * hurst
    return 0.5 * (np.abs(k - 1) ** h2 - 2.0 * k**h2 + (k + 1) ** h2)


def generate_fgn(hurst: float, n: int, rng: np.random.Generator) -> np.ndarray:
    """Exact fractional Gaussian noise by circulant embedding.

    Embeds the n-point covariance in a 2n circulant matrix, takes its FFT
    eigenvalues, colors a complex white-noise vector and transforms back.
    O(n log n) and exact for all 0 < hurst < 1.
    """
    if not 0.0 < hurst < 1.0:
        raise ValueError("hurst must be in (0, 1)")
    if n < 1:
        raise ValueError("n must be >= 1")
    cov = fgn_autocovariance(hurst, np.arange(n + 1))
    row = np.concatenate([cov, cov[-2:0:-1]])  # length 2n
    eig = np.fft.fft(row).real
    if eig.min() < -1e-8 * eig.max():
        raise RuntimeError(
            f"circulant embedding not nonnegative definite (min eig {eig.min():g})"
        )
    eig = np.maximum(eig, 0.0)
    m = 2 * n
    g1 = rng.standard_normal(n + 1)
    g2 = rng.standard_normal(n - 1) if n > 1 else np.empty(0)
    w = np.empty(m, dtype=complex)
    w[0] = math.sqrt(eig[0] / m) * g1[0]
    w[n] = math.sqrt(eig[n] / m) * g1[n]
    if n > 1:
        half = np.sqrt(eig[1:n] / (2.0 * m))
        w[1:n] = half * (g1[1:n] + 1j * g2)
        w[n + 1:] = np.conj(w[n - 1:0:-1])
    return np.fft.fft(w)[:n].real


def generate_sign_series(hurst: float, n: int,
                         rng: np.random.Generator) -> SignSeries:
    """Order signs with long memory: elementwise sign of exact fractional
    Gaussian noise (zeros, a measure-zero event, map to +1)."""
    noise = generate_fgn(hurst, n, rng)
    values = np.where(noise < 0.0, -1, 1).astype(np.int8)
    return SignSeries(values=values, target_hurst=hurst)


def estimate_hurst(series, min_scale: int = 16, n_scales: int = 24) -> float:
    """Hurst exponent by first-order detrended fluctuation analysis.

    Builds the profile (cumulative sum of the demeaned series), linearly
    detrends non-overlapping windows across a log-spaced grid of scales, and
    regresses log fluctuation on log scale.
    """
    x = np.asarray(series, dtype=float).ravel()
    if x.size < 1 << 10:
        raise ValueError("series too short for DFA (need at least 2^10 points)")
    if np.ptp(x) == 0.0:
        raise ValueError("degenerate (constant) series")
    profile = np.cumsum(x - x.mean())
    n = profile.size
    scales = np.unique(np.floor(np.logspace(
        math.log10(min_scale), math.log10(n // 8), n_scales)).astype(int))
    flucts = []
    used = []
    for s in scales:
        n_win = n // s
        if n_win < 4:
            continue
        segs = profile[: n_win * s].reshape(n_win, s)
        t = np.arange(s, dtype=float)
        coef = np.polynomial.polynomial.polyfit(t, segs.T, 1)
        resid = segs - (coef[0][:, None] + coef[1][:, None] * t)
        flucts.append(math.sqrt(np.mean(resid * resid)))
        used.append(s)
    slope = np.polyfit(np.log(used), np.log(flucts), 1)[0]
    return float(slope)
