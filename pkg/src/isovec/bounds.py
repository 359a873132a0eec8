"""Closed-form volume-bound quantities in log space.

gamma(d, m) = mbar^d / (d! C(mbar, d)) with mbar = min(m, d(d+1)/2) is the
improvement factor multiplying the greedy-selection guarantee d!/d^d; it is
decreasing in m, increasing in d at the cap, bounded by e, and has explicit
asymptotics when m grows linearly in d or exceeds d by a constant.

All quantities are computed through math.lgamma so that d and m up to 1e6
stay representable; an exact big-integer rational path (gamma_exact) covers
the small grid where cross-checks and pretty printing want exact values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "LogValue",
    "m_bar",
    "gamma",
    "gamma_exact",
    "dr_volume_bound",
    "p1_exact",
    "gamma_asymptotic_linear",
    "gamma_asymptotic_additive",
]


@dataclass(frozen=True)
class LogValue:
    """A nonnegative quantity stored as (sign, natural log)."""

    log_value: float
    sign: int = 1  # +1 for positive values, 0 for an exact zero

    def __post_init__(self):
        if self.sign not in (0, 1):
            raise ValueError("sign must be 0 or +1")

    @property
    def value(self) -> float:
        if not self.sign:
            return 0.0
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def __float__(self) -> float:
        return self.value


def m_bar(d: int, m: int) -> int:
    """min(m, d(d+1)/2), the effective system size after reduction."""
    return min(m, d * (d + 1) // 2)


def _log_binomial(n: int, k: int) -> float:
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)


def _validate_dm(d: int, m: int) -> None:
    if d < 1:
        raise ValueError("d must be a positive integer")
    if m < d:
        raise ValueError(f"m must be at least d, got m={m} < d={d}")


def gamma(d: int, m: int) -> LogValue:
    """log-space gamma(d, mbar) = mbar^d / (d! C(mbar, d))."""
    _validate_dm(d, m)
    mb = m_bar(d, m)
    log = d * math.log(mb) - math.lgamma(d + 1) - _log_binomial(mb, d)
    return LogValue(log)


def gamma_exact(d: int, m: int) -> Fraction:
    """Exact rational gamma(d, mbar); intended for the small (d, m) grid."""
    _validate_dm(d, m)
    mb = m_bar(d, m)
    return Fraction(mb**d, math.factorial(d) * math.comb(mb, d))


def dr_volume_bound(d: int) -> LogValue:
    """log-space d!/d^d, the squared-volume floor for greedy selection."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    return LogValue(math.lgamma(d + 1) - d * math.log(d))


def p1_exact(probabilities, d: int) -> float:
    """Probability that d independent index draws are pairwise distinct.

    Equals d! times the degree-d elementary symmetric polynomial of the
    atom probabilities, evaluated by one coefficient-propagation pass over
    the degree-d prefix of prod_i (1 + p_i t); every term is nonnegative,
    so there is no cancellation.
    """
    p = [float(x) for x in probabilities]
    if len(p) < 1:
        raise ValueError("need at least one probability")
    if d < 1:
        raise ValueError("d must be a positive integer")
    if any(x < 0.0 for x in p):
        raise ValueError("probabilities must be nonnegative")
    if abs(sum(p) - 1.0) > 1e-12:
        raise ValueError("probabilities must sum to 1 within 1e-12")
    if d > len(p):
        return 0.0
    coeff = [1.0] + [0.0] * d
    for i, x in enumerate(p):
        for j in range(min(i + 1, d), 0, -1):
            coeff[j] += x * coeff[j - 1]
    e_d = coeff[d]
    if e_d <= 0.0:
        return 0.0
    return math.exp(math.lgamma(d + 1) + math.log(e_d))


def gamma_asymptotic_linear(d: int, c: float) -> LogValue:
    """Large-d form of gamma(d, ceil(c d)) for fixed c > 1:
    sqrt((c-1)/c) ((c-1)/c)^((c-1)d) e^d."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    if not c > 1.0:
        raise ValueError("c must exceed 1")
    if c < 1.0 + 1.0 / d:
        raise ValueError(f"c must be at least 1 + 1/d = {1.0 + 1.0 / d}")
    r = math.log((c - 1.0) / c)
    return LogValue(0.5 * r + (c - 1.0) * d * r + d)


def gamma_asymptotic_additive(d: int, k: int) -> LogValue:
    """Large-d form of gamma(d, d+k) for a fixed integer k >= 1:
    k! e^k / sqrt(2 pi) * e^d / (d+k)^(k+1/2)."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    if k < 1:
        raise ValueError("k must be a positive integer")
    log = (
        math.lgamma(k + 1)
        + k
        - 0.5 * math.log(2.0 * math.pi)
        + d
        - (k + 0.5) * math.log(d + k)
    )
    return LogValue(log)
