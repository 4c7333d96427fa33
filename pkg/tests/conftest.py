import math

import numpy as np
import pytest
from scipy import integrate

from fasrelay import ScenarioConfig, linearize
from fasrelay.numerics import gamma_lower_cdf

_LOG2E = math.log2(math.e)


@pytest.fixture
def urban():
    """Reference urban scenario (all defaults)."""
    return ScenarioConfig()


@pytest.fixture
def fbl100():
    """80 bits over 100 channel uses."""
    return linearize(0.8, 100)


def quad_hop1(params, vartheta, m):
    """Independent quadrature oracle for the hop-1 average BLER."""
    val, _ = integrate.quad(lambda x: gamma_lower_cdf(x * vartheta, m),
                            params.rho_l, params.rho_h,
                            epsabs=1e-300, epsrel=1e-12, limit=300)
    return params.chi * val


def quad_hop2(params, vartheta, m, lambdas):
    """Independent quadrature oracle for the hop-2 average BLER."""
    def integrand(x):
        prod = 1.0
        for lam in lambdas:
            prod *= gamma_lower_cdf(x * vartheta / lam, m)
        return prod

    val, _ = integrate.quad(integrand, params.rho_l, params.rho_h,
                            epsabs=1e-300, epsrel=1e-11, limit=300)
    return params.chi * val


def exact_avg_bler(vartheta, m, lambdas, rate, blocklength):
    """Average of the exact Q-shaped instantaneous BLER against the SNR CDF
    (no piecewise-linear surrogate); integration by parts concentrates the
    integrand into a bump around the rate threshold."""
    def neg_eps_prime(x):
        cap = np.log2(1 + x)
        disp = (1 - 1 / (1 + x) ** 2) * _LOG2E * _LOG2E
        arg = (cap - rate) / np.sqrt(disp / blocklength)
        d_cap = _LOG2E / (1 + x)
        d_disp = 2 * _LOG2E * _LOG2E / (1 + x) ** 3
        s = np.sqrt(disp / blocklength)
        d_arg = d_cap / s - (cap - rate) * d_disp / (2 * blocklength * s ** 3)
        return np.exp(-arg ** 2 / 2) / math.sqrt(2 * math.pi) * d_arg

    def cdf(x):
        if lambdas is None:
            return gamma_lower_cdf(x * vartheta, m)
        prod = 1.0
        for lam in lambdas:
            prod *= gamma_lower_cdf(x * vartheta / lam, m)
        return prod

    hi = 2.0 ** rate + 50.0 * math.sqrt(1.0 / blocklength)
    val, _ = integrate.quad(lambda x: cdf(x) * neg_eps_prime(x), 0.0, hi,
                            epsabs=1e-300, epsrel=1e-10, limit=400)
    return val


def ks_statistic(samples, cdf):
    """One-sample Kolmogorov-Smirnov statistic against a callable CDF."""
    xs = np.sort(np.asarray(samples))
    n = xs.size
    f = np.array([cdf(x) for x in xs])
    upper = np.max(np.arange(1, n + 1) / n - f)
    lower = np.max(f - np.arange(0, n) / n)
    return max(upper, lower)
