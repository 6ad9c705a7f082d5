"""Closed-form continuum predictions for the protective / non-protective experiment.

Everything reduces to the overlap of two displaced normalised Gaussians,
``<psi(x - a) | psi(x - b)> = exp(-(a - b)^2 / (8 sigma^2))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from photonsim.errors import DomainError, NumericalError

PROTECTIVE = "protective"
NONPROTECTIVE = "nonprotective"
MODES = (PROTECTIVE, NONPROTECTIVE)


@dataclass(frozen=True)
class TheoryParams:
    sigma: float = 0.4
    coupling: float = 0.106
    alpha: float = math.pi / 8

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")


def gaussian_overlap(a, b, sigma):
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    return np.exp(-((np.asarray(a) - np.asarray(b)) ** 2) / (8.0 * sigma ** 2))


def _binom(m: int, k: int) -> int:
    return math.comb(m, k) if 0 <= k <= m else 0


def protective_coefficients(n: int, k: int, alpha: float) -> float:
    """Weight of ``psi(x - k g)`` in the exiting protective-case state."""
    if n < 1:
        raise DomainError("coefficients are defined for n >= 1")
    return _binom(n - 1, k) * math.sin(2 * alpha) + _binom(n - 1, k - 1) * math.cos(2 * alpha)


def _scaled_weights(n: int, alpha: float) -> np.ndarray:
    # coefficient / 2^(n-1); exact big-int division keeps large n in range
    s, c = math.sin(2 * alpha), math.cos(2 * alpha)
    den = 1 << (n - 1)
    return np.array([_binom(n - 1, k) / den * s + _binom(n - 1, k - 1) / den * c
                     for k in range(n + 1)])


def protective_prob(params: TheoryParams, n: int) -> float:
    if n < 0:
        raise DomainError("n must be non-negative")
    if n == 0:
        return 1.0
    w = _scaled_weights(n, params.alpha)
    shifts = np.arange(n + 1) * params.coupling
    ov = gaussian_overlap(shifts[:, None], shifts[None, :], params.sigma)
    return float(0.5 * w @ ov @ w)


def _cross_term(params: TheoryParams, n: int) -> float:
    return (2 * math.sin(2 * params.alpha) * math.cos(2 * params.alpha)
            * float(gaussian_overlap(0.0, n * params.coupling, params.sigma)))


def nonprotective_T(params: TheoryParams, n: int) -> float:
    if n < 0:
        raise DomainError("n must be non-negative")
    if n == 0:
        return 1.0
    return 0.5 * (1 + _cross_term(params, n))


def nonprotective_R(params: TheoryParams, n: int) -> float:
    if n < 0:
        raise DomainError("n must be non-negative")
    if n == 0:
        return 0.0
    return 0.5 * (1 - _cross_term(params, n))


def curve(params: TheoryParams, mode: str, n_max: int) -> np.ndarray:
    fn = protective_prob if mode == PROTECTIVE else nonprotective_T
    return np.array([fn(params, n) for n in range(n_max + 1)])


@dataclass(frozen=True)
class Asymptotics:
    n: int
    p_protective: float
    p_transmitted: float
    transmitted_at_half: bool
    protective_decreasing: bool
    crossover_n: int | None


def asymptotics(params: TheoryParams, n: int = 200, scan_to: int | None = None) -> Asymptotics:
    """Large-``n`` diagnostics plus the first ``n`` where ``P(n) < P'_T(n)``."""
    if not params.coupling > 0:
        raise DomainError("asymptotics need g > 0")
    if not 0 < params.alpha < math.pi / 4:
        raise DomainError("asymptotics need alpha in (0, pi/4)")
    p_n = protective_prob(params, n)
    p_prev = protective_prob(params, n - 1)
    t_n = nonprotective_T(params, n)
    crossover = None
    for m in range(1, (scan_to or n) + 1):
        if protective_prob(params, m) < nonprotective_T(params, m):
            crossover = m
            break
    return Asymptotics(n, p_n, t_n, abs(t_n - 0.5) < 1e-6, p_n < p_prev, crossover)


def _psi(x, sigma):
    return (2 * math.pi * sigma ** 2) ** -0.25 * np.exp(-x ** 2 / (4 * sigma ** 2))


def quadrature_check(params: TheoryParams, n: int, mode: str, tol: float = 1e-11) -> float:
    """Integrate the squared exiting amplitude numerically over ``[-20 sigma, 20 sigma + n g]``.

    Independent of the closed forms: the integrand is built from ``psi``
    itself, never from ``gaussian_overlap``.
    """
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    if not 0 <= n <= 30:
        raise DomainError("quadrature_check supports 0 <= n <= 30")
    if n == 0:
        return 1.0
    s, c = math.sin(2 * params.alpha), math.cos(2 * params.alpha)
    g, sig = params.coupling, params.sigma
    if mode == PROTECTIVE:
        coeffs = [protective_coefficients(n, k, params.alpha) for k in range(n + 1)]
        scale = 2.0 ** -(2 * n - 1)

        def integrand(x):
            amp = sum(ck * _psi(x - k * g, sig) for k, ck in enumerate(coeffs))
            return scale * amp ** 2
    else:
        def integrand(x):
            return 0.5 * (s * _psi(x, sig) + c * _psi(x - n * g, sig)) ** 2

    lo, hi = -20 * sig, 20 * sig + n * g
    centres = [k * g for k in range(n + 1)]
    value, err = integrate.quad(integrand, lo, hi, points=centres[:50], limit=500,
                                epsabs=tol, epsrel=tol)
    if not err < 1e-9:
        raise NumericalError("quadrature did not converge", value=value, error=err, n=n, mode=mode)
    return float(value)
