"""Spatial correlation model of the multi-port receiver and per-hop SNR CDFs.

Port positions are spread uniformly over an aperture of W wavelengths, which
gives the classic isotropic-scattering correlation J0(2 pi W (m-n)/(N-1))
between ports m and n. The eigenvalues of that matrix act as effective
independent diversity branches; the number retained above a relative
threshold is the effective rank used throughout the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numerics import bessel_j0, gamma_lower_cdf, jacobi_eigh

DEFAULT_RANK_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FasSpectrum:
    """Eigen-spectrum of the port correlation matrix.

    `eigenvalues` holds all N values in descending order (trace N preserved);
    `lambdas` exposes the n_eff retained branches that the analytical model
    treats as independent.
    """

    n_ports: int
    aperture: float
    eigenvalues: tuple[float, ...]
    n_eff: int
    rank_tolerance: float

    def __post_init__(self):
        if self.n_ports < 1:
            raise ValueError("n_ports must be >= 1")
        if not 1 <= self.n_eff <= self.n_ports:
            raise ValueError("n_eff must lie in [1, n_ports]")
        if len(self.eigenvalues) != self.n_ports:
            raise ValueError("need one eigenvalue per port")
        if any(ev < 0 for ev in self.eigenvalues):
            raise ValueError("eigenvalues must be nonnegative")
        trace = sum(self.eigenvalues)
        if abs(trace - self.n_ports) > 1e-9 * self.n_ports:
            raise ValueError(f"eigenvalue sum {trace} violates trace {self.n_ports}")

    @property
    def lambdas(self) -> tuple[float, ...]:
        return self.eigenvalues[: self.n_eff]

    @property
    def lambda_sum(self) -> float:
        return float(sum(self.lambdas))


def jakes_matrix(n_ports: int, aperture: float) -> np.ndarray:
    """Port correlation matrix J[m, n] = J0(2 pi W (m - n) / (N - 1)).

    A single port has no spacing to speak of; the 1x1 identity keeps the
    fixed-antenna baseline well defined.
    """
    if n_ports < 1:
        raise ValueError("n_ports must be >= 1")
    if aperture <= 0:
        raise ValueError("aperture must be positive")
    if n_ports == 1:
        return np.array([[1.0]])
    j = np.empty((n_ports, n_ports))
    for delta in range(n_ports):
        val = bessel_j0(2.0 * math.pi * aperture * delta / (n_ports - 1))
        for row in range(n_ports - delta):
            j[row, row + delta] = val
            j[row + delta, row] = val
    return j


def eigen_spectrum(j: np.ndarray, rank_tolerance: float = DEFAULT_RANK_TOLERANCE,
                   aperture: float = math.nan) -> FasSpectrum:
    """Descending eigenvalues of a correlation matrix plus the effective rank.

    Tiny negative eigenvalues from roundoff are clipped to zero; branches are
    retained while they exceed rank_tolerance relative to the largest one.
    """
    j = np.asarray(j, dtype=float)
    n = j.shape[0]
    if j.shape != (n, n):
        raise ValueError("correlation matrix must be square")
    if np.any(np.abs(np.diagonal(j) - 1.0) > 1e-12):
        raise ValueError("correlation matrix must have unit diagonal")
    if rank_tolerance <= 0 or rank_tolerance >= 1:
        raise ValueError("rank_tolerance must lie in (0, 1)")
    values, _ = jacobi_eigh(j)
    values = np.clip(values, 0.0, None)
    values = np.sort(values)[::-1]
    n_eff = int(np.count_nonzero(values > rank_tolerance * values[0]))
    n_eff = max(n_eff, 1)
    return FasSpectrum(n_ports=n, aperture=float(aperture),
                       eigenvalues=tuple(float(v) for v in values),
                       n_eff=n_eff, rank_tolerance=rank_tolerance)


@lru_cache(maxsize=256)
def fas_spectrum(n_ports: int, aperture: float,
                 rank_tolerance: float = DEFAULT_RANK_TOLERANCE) -> FasSpectrum:
    """Build and decompose the correlation matrix for (N, W) in one step."""
    return eigen_spectrum(jakes_matrix(n_ports, aperture), rank_tolerance,
                          aperture=aperture)


def cdf_hop1(x: float, vartheta: float, m1: int) -> float:
    """First-hop SNR CDF: regularized lower gamma P(m1, x * vartheta)."""
    if x < 0:
        raise ValueError("SNR argument must be nonnegative")
    if vartheta <= 0:
        raise ValueError("vartheta must be positive")
    return gamma_lower_cdf(x * vartheta, m1)


def cdf_hop2(x: float, vartheta2: float, m2: int, lambdas) -> float:
    """Second-hop selected-port SNR CDF: product of per-branch gamma CDFs."""
    if x < 0:
        raise ValueError("SNR argument must be nonnegative")
    if vartheta2 <= 0:
        raise ValueError("vartheta2 must be positive")
    lams = [float(l) for l in lambdas]
    if not lams:
        raise ValueError("lambdas must be non-empty")
    if any(l <= 0 for l in lams):
        raise ValueError("lambdas must be positive")
    prod = 1.0
    for lam in lams:
        prod *= gamma_lower_cdf(x * vartheta2 / lam, m2)
        if prod == 0.0:
            return 0.0
    return prod
