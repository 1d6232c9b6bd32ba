"""
Binomial weights of the fractional operators (1 - z)^d and (1 - z)^{-d}, and
their action at a seasonal lag.

Weights come from the ratio recurrences

    difference:   c_0 = 1,  c_j = c_{j-1} (j - 1 - d) / j
    integration:  c_0 = 1,  c_j = c_{j-1} (j - 1 + d) / j

so no Gamma function is ever evaluated at a pole.
"""
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import kernels

__all__ = [
    "FracCoeffs",
    "DEFAULT_TRUNCATION",
    "pi_coeffs",
    "psi_coeffs",
    "apply_seasonal",
]

DEFAULT_TRUNCATION = 10_000

Kind = Literal["difference", "integration"]


@dataclass(frozen=True)
class FracCoeffs:
    """Weights ``coeffs[0..M]`` of a truncated fractional operator."""

    d: float
    kind: Kind
    coeffs: np.ndarray

    @property
    def M(self) -> int:
        return self.coeffs.shape[0] - 1

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.coeffs
        return self.coeffs.astype(dtype)

    def __len__(self):
        return self.coeffs.shape[0]

    def __getitem__(self, item):
        return self.coeffs[item]


def _ratio_weights(d: float, M: int, sign: float) -> np.ndarray:
    M = int(M)
    if M < 0:
        raise ValueError("truncation M must be >= 0")
    if not np.isfinite(d):
        raise ValueError("order d must be finite")
    j = np.arange(1, M + 1, dtype=np.float64)
    out = np.empty(M + 1)
    out[0] = 1.0
    # cumprod reproduces the sequential recurrence term by term
    out[1:] = np.cumprod((j - 1.0 + sign * d) / j)
    return out


def pi_coeffs(d: float, M: int) -> FracCoeffs:
    """Weights of the fractional difference ``(1 - z)^d`` up to ``z^M``.

    ``pi_coeffs(d, M)[j] == Gamma(j - d) / (Gamma(j + 1) Gamma(-d))``.
    """
    return FracCoeffs(float(d), "difference", _ratio_weights(d, M, -1.0))


def psi_coeffs(d: float, M: int) -> FracCoeffs:
    """Weights of the fractional integration ``(1 - z)^{-d}`` up to ``z^M``.

    ``psi_coeffs(d, M)[j] == Gamma(j + d) / (Gamma(j + 1) Gamma(d))``.
    """
    return FracCoeffs(float(d), "integration", _ratio_weights(d, M, +1.0))


def apply_seasonal(series, S: int, d: float, kind: Kind = "integration",
                   M: int | None = None) -> np.ndarray:
    """Apply ``(1 - L^S)^d`` (difference) or ``(1 - L^S)^{-d}`` (integration).

    Only in-sample history is used::

        out[t] = sum_{j=0}^{floor(t/S)} c_j * series[t - S*j]

    Parameters
    ----------
    series : array_like, shape (n,)
    S : int
        Seasonal lag, ``S >= 1``.
    d : float
        Fractional order.
    kind : {"difference", "integration"}
    M : int, optional
        Truncation of the weight sequence. Defaults to the longest lag the
        series can use, ``(n - 1) // S``.
    """
    x = np.asarray(series, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError("series must be a non-empty 1-d sequence")
    S = int(S)
    if S < 1:
        raise ValueError("seasonal period S must be >= 1")
    if kind not in ("difference", "integration"):
        raise ValueError(f"unknown kind {kind!r}")
    n = x.shape[0]
    if M is None:
        M = (n - 1) // S
    weights = pi_coeffs(d, M) if kind == "difference" else psi_coeffs(d, M)
    out = np.empty(n)
    for r in range(min(S, n)):
        out[r::S] = kernels.causal_filter(x[r::S], weights.coeffs)
    return out
