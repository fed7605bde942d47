"""Analytic and discrete test signals.

The Lorentzian line with its closed-form Fourier transform, the periodic
pseudo-Lorentzian built from exponentially decaying coefficients, and
reproducible white-noise injection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import SampleGrid, Spectrum

__all__ = [
    "LorentzianLine",
    "EtaRatio",
    "NoiseModel",
    "lorentzian_ds",
    "lorentzian_rs",
    "pseudo_lorentzian_discrete",
    "add_white_noise",
]

_U64 = 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class LorentzianLine:
    """Half-width gamma, peak position center, integrated area."""

    gamma: float
    center: float = 0.0
    area: float = 1.0

    def __post_init__(self) -> None:
        if not self.gamma > 0:
            raise ValueError(f"lorentzian requires gamma > 0, got {self.gamma}")


@dataclass(frozen=True)
class EtaRatio:
    """Dimensionless gamma / x_o: line half-width over filter half-width."""

    eta: float

    def __post_init__(self) -> None:
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")

    @classmethod
    def from_line(cls, line: LorentzianLine, x_o: float) -> "EtaRatio":
        return cls(line.gamma / x_o)

    def __float__(self) -> float:
        return self.eta


@dataclass(frozen=True)
class NoiseModel:
    """Gaussian i.i.d. per-point fluctuations of rms sigma, seeded for replay."""

    sigma: float
    seed: int

    def __post_init__(self) -> None:
        if not self.sigma >= 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")

    def sequence(self, index: int, count: int) -> np.ndarray:
        """Draw `count` values for stream `index`; bit-stable per (seed, index)."""
        key = np.array([self.seed & _U64, index & _U64], dtype=np.uint64)
        gen = np.random.Generator(np.random.Philox(key=key))
        return gen.normal(0.0, self.sigma, count) if self.sigma else np.zeros(count)


def lorentzian_ds(line: LorentzianLine, x):
    """Direct-space line: (area*gamma/pi) / ((x-center)^2 + gamma^2)."""
    x = np.asarray(x, dtype=float)
    out = (line.area * line.gamma / np.pi) / ((x - line.center) ** 2 + line.gamma**2)
    return out if out.ndim else float(out)


def lorentzian_rs(line: LorentzianLine, k):
    """Transform magnitude (area/2pi)*exp(-|k|*gamma).

    For center != 0 the transform carries a phase exp(-i*k*center); only the
    center-independent magnitude is returned since every mean-square measure
    uses |F|^2.
    """
    k = np.asarray(k, dtype=float)
    out = (line.area / (2.0 * np.pi)) * np.exp(-np.abs(k) * line.gamma)
    return out if out.ndim else float(out)


def pseudo_lorentzian_discrete(gamma: float, n: int) -> Spectrum:
    """Periodic line whose coefficients are exp(-|kappa|*gamma)/(2N+1).

    Production path is the closed form of the summed geometric series; it is
    cross-checked on every call against the finite geometric sum, which must
    agree within the tail-truncation bound exp(-(N+1)*gamma).
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    grid = SampleGrid(n)
    theta = grid.theta
    m = grid.size
    r = np.exp(-gamma)
    # denominator written as (1-r)^2 + 4r sin^2(theta/2): no cancellation
    denom = np.expm1(-gamma) ** 2 + 4.0 * r * np.sin(0.5 * theta) ** 2
    closed = (1.0 - r * r) / denom / m
    w = r * np.exp(1j * theta)
    finite = (-1.0 + 2.0 * np.real((1.0 - w ** (n + 1)) / (1.0 - w))) / m
    bound = 10.0 * np.exp(-(n + 1) * gamma) + 100.0 * np.finfo(float).eps * closed.max()
    dev = float(np.max(np.abs(closed - finite)))
    if dev > bound:
        raise RuntimeError(
            f"pseudo-lorentzian closed form deviates from the finite sum by "
            f"{dev:.3e}, beyond the truncation bound {bound:.3e}"
        )
    return Spectrum(grid, closed)


def add_white_noise(s: Spectrum, noise: NoiseModel) -> Spectrum:
    """Perturb each sample by an independent Gaussian draw of rms sigma."""
    return Spectrum(s.grid, s.values + noise.sequence(0, s.grid.size))
