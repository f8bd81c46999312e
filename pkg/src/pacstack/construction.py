"""Bit-channel parameters under the Gaussian approximation.

Every synthesized channel is modelled as a BI-AWGN channel whose LLR is
Gaussian with mean ``mu`` and variance ``2 mu``; its equivalent noise
standard deviation is ``sqrt(2 / mu)``. From that the cutoff rate (the
metric bias), the capacity and the varentropy follow in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats

LN2 = math.log(2.0)

# two-piece approximation of phi(x) = 1 - E[tanh(l/2)], l ~ N(x, 2x)
_PHI_A, _PHI_B, _PHI_C = 0.4527, 0.86, 0.0218
_PHI_SPLIT = 10.0


def _log_phi(x: float) -> float:
    if x <= 0.0:
        return 0.0
    if x < _PHI_SPLIT:
        return -_PHI_A * x ** _PHI_B + _PHI_C
    return 0.5 * math.log(math.pi / x) - x / 4.0 + math.log1p(-10.0 / (7.0 * x))


def phi(x: float) -> float:
    if x < 0:
        raise ValueError(f"phi is defined for x >= 0, got {x}")
    return math.exp(_log_phi(x))


def _log_phi_inv(log_y: float) -> float:
    if log_y >= 0.0:
        return 0.0
    # -0.4527 x^0.86 + 0.0218 = log y gives a starting bracket
    hi = max(1.0, ((_PHI_C - log_y) / _PHI_A) ** (1.0 / _PHI_B), -4.0 * log_y)
    while _log_phi(hi) > log_y:
        hi *= 2.0
    return optimize.brentq(lambda x: _log_phi(x) - log_y, 0.0, hi, xtol=1e-300, rtol=1e-12,
                           maxiter=500)


def phi_inv(y: float) -> float:
    if not 0.0 < y <= 1.0:
        raise ValueError(f"phi_inv is defined on (0, 1], got {y}")
    return _log_phi_inv(math.log(y))


def _minus_mean(mu: float) -> float:
    # phi(mu-) = 1 - (1 - phi(mu))^2 = phi (2 - phi), kept in the log domain
    lp = _log_phi(mu)
    # the fitted phi exceeds 1 near zero; keep the target strictly below 1 so
    # very weak channels stay on the continuous branch instead of jumping to 0
    return _log_phi_inv(min(lp + math.log(2.0 - math.exp(lp)), -1e-300))


def ga_evolve(sigma_ch: float, n: int) -> np.ndarray:
    """LLR means of the N synthesized channels, in natural order.

    Channel index ``i`` (zero-based) takes the minus branch at the top
    split when the most significant of its n bits is 0, and so on down to
    the least significant bit.
    """
    if sigma_ch <= 0:
        raise ValueError(f"sigma must be positive, got {sigma_ch}")
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    mu = np.array([2.0 / sigma_ch ** 2])
    for _ in range(n):
        nxt = np.empty(2 * mu.size)
        nxt[0::2] = [_minus_mean(m) for m in mu]
        nxt[1::2] = 2.0 * mu
        mu = nxt
    return mu


def r0_biawgn(sigma):
    """Cutoff rate of the BI-AWGN channel in bits."""
    sigma = np.asarray(sigma, dtype=np.float64)
    return 1.0 - np.logaddexp(0.0, -0.5 / sigma ** 2) / LN2


def j_approx(t):
    """Capacity approximation, ``t = 2 / sigma``."""
    t = np.asarray(t, dtype=np.float64)
    return (1.0 - 2.0 ** (-0.3073 * t ** (2 * 0.8935))) ** 1.1064


def k_approx(t):
    t = np.asarray(t, dtype=np.float64)
    return (1.0 - 2.0 ** (-0.96483 * t ** (2 * 0.61746))) ** 10.232


def v_approx(t):
    """Varentropy approximation in bits squared."""
    return -(j_approx(t) - 1.0) ** 2 - k_approx(t) + 1.0


def prune_threshold(var, p_th: float, combine: str = "min"):
    """Pruning threshold (bits) for a channel of varentropy ``var``.

    One arm comes from the Chebyshev bound, ``floor(-sqrt(var / p_th)) - 10``,
    the other from the Chernoff bound, ``floor(log2 p_th)``. ``combine``
    selects which of the two is used; the default takes the smaller.
    """
    if not 0.0 < p_th < 1.0:
        raise ValueError(f"p_th must lie in (0, 1), got {p_th}")
    var = np.maximum(np.asarray(var, dtype=np.float64), 0.0)
    cheb = np.floor(-np.sqrt(var / p_th)) - 10.0
    chern = math.floor(math.log2(p_th))
    if combine == "min":
        out = np.minimum(cheb, chern)
    elif combine == "max":
        out = np.maximum(cheb, chern)
    else:
        raise ValueError(f"combine must be 'min' or 'max', got {combine!r}")
    return out.astype(np.int64)


@dataclass(frozen=True)
class ConstructionTables:
    n: int
    sigma_ch: float
    p_th: float
    mu: np.ndarray
    sigma_i: np.ndarray
    t_i: np.ndarray
    E0: np.ndarray
    I_vec: np.ndarray
    Var_vec: np.ndarray
    gamma_T: np.ndarray

    @property
    def N(self) -> int:
        return 1 << self.n

    def rows(self):
        """Rows of the construction CSV (one-based index)."""
        for i in range(self.N):
            yield (i + 1, self.mu[i], self.sigma_i[i], self.E0[i], self.I_vec[i],
                   self.Var_vec[i], int(self.gamma_T[i]))


CSV_HEADER = ("index", "mu", "sigma_i", "E0", "I", "Var", "gamma_T")


def build_tables(sigma_ch: float, n: int, p_th: float, combine: str = "min") -> ConstructionTables:
    mu = ga_evolve(sigma_ch, n)
    sigma_i = np.sqrt(2.0 / mu)
    t_i = np.sqrt(2.0 * mu)
    var = np.maximum(v_approx(t_i), 0.0)
    return ConstructionTables(
        n=n,
        sigma_ch=float(sigma_ch),
        p_th=float(p_th),
        mu=mu,
        sigma_i=sigma_i,
        t_i=t_i,
        E0=r0_biawgn(sigma_i),
        I_vec=j_approx(t_i),
        Var_vec=var,
        gamma_T=prune_threshold(var, p_th, combine),
    )


def dmc_quantized_params(sigma: float, bins: int = 4096, span: float = 8.0):
    """Capacity, cutoff rate and varentropy of a quantized BI-AWGN channel.

    The output ``y = (1 - 2x) + sigma z`` is cut into ``bins`` equal
    intervals over ``[-1 - span sigma, 1 + span sigma]``; the two outer
    intervals absorb the tails. Returns ``(I, R0, Var)`` in bits.
    """
    if bins < 2:
        raise ValueError("need at least two bins")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    edges = np.linspace(-1.0 - span * sigma, 1.0 + span * sigma, bins + 1)
    edges[0], edges[-1] = -np.inf, np.inf
    # P(y in bin | x) for x = 0 (mean +1) and x = 1 (mean -1), via survival
    # functions on both sides to keep tail precision
    w0 = _bin_probs(edges, 1.0, sigma)
    w1 = w0[::-1]
    p_y = 0.5 * (w0 + w1)
    bhatt = np.sum(np.sqrt(w0 * w1))
    r0 = 1.0 - math.log2(1.0 + bhatt)
    info, second = 0.0, 0.0
    for w in (w0, w1):
        mask = w > 0
        dens = np.log2(w[mask] / p_y[mask])
        info += 0.5 * np.sum(w[mask] * dens)
        second += 0.5 * np.sum(w[mask] * dens ** 2)
    return float(info), float(r0), float(max(second - info ** 2, 0.0))


def _bin_probs(edges, mean, sigma):
    z = (edges - mean) / sigma
    lower = special.ndtr(z)
    upper = stats.norm.sf(z)
    probs = np.where(z[1:] <= 0, np.diff(lower), -np.diff(upper))
    return np.maximum(probs, 0.0)
