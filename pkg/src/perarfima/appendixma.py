"""
Moving-average weights of the periodic fractional difference equation

    (1 - L)^{d_t} y_t = u_t,   d_t = d_{t+S},

i.e. y_t + sum_{j>=1} pi_j(d_t) y_{t-j} = u_t with pi_j(d) the weights of
(1 - z)^d. Writing y_t = sum_j Psi_j(t) u_{t-j}, matching coefficients gives

    Psi_0(t) = 1,
    Psi_j(t) = -pi_j(d_t) - sum_{k=1}^{j-1} pi_k(d_t) Psi_{j-k}(t-k).

Unrolling the recursion expresses Psi_j(t) as a signed sum over the 2^{j-1}
compositions of j (``ma_composition_sum``). ``ma_oracle`` inverts the
lower-triangular AR operator directly and serves as an independent check.

Season indices are taken modulo S throughout, so d_{t-k} for k > t wraps.
"""
import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from . import kernels
from .fracdiff import pi_coeffs

__all__ = ["MaTable", "ma_recursion", "ma_composition_sum", "ma_oracle",
           "MAX_COMPOSITION_LAG", "MAX_ORACLE_LAG"]

MAX_COMPOSITION_LAG = 14
MAX_ORACLE_LAG = 200


@dataclass(frozen=True, eq=False)
class MaTable:
    """``psi[t-1, j] = Psi_j(t)`` for seasons t = 1..S and lags j = 0..Jmax."""

    S: int
    d: np.ndarray
    psi: np.ndarray

    @property
    def Jmax(self) -> int:
        return self.psi.shape[1] - 1

    def __call__(self, j: int, t: int) -> float:
        """``Psi_j(t)`` for any integer ``t`` (periodic in ``t``)."""
        return float(self.psi[(t - 1) % self.S, j])

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "j", "psi"])
        for t in range(1, self.S + 1):
            for j in range(self.Jmax + 1):
                writer.writerow([t, j, repr(float(self.psi[t - 1, j]) + 0.0)])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _orders(d) -> np.ndarray:
    d = np.atleast_1d(np.asarray(d, dtype=np.float64))
    if d.ndim != 1 or d.size < 1:
        raise ValueError("d must be a non-empty 1-d sequence (one order per season)")
    if not np.all(np.isfinite(d)):
        raise ValueError("orders d must be finite")
    return d


def _pi_table(d: np.ndarray, Jmax: int) -> np.ndarray:
    return np.stack([pi_coeffs(dt, Jmax).coeffs for dt in d])


def ma_recursion(d, Jmax: int) -> MaTable:
    """``Psi_j(t)`` for j <= Jmax by the triangular recursion, O(S Jmax^2)."""
    d = _orders(d)
    Jmax = int(Jmax)
    if Jmax < 0:
        raise ValueError("Jmax must be >= 0")
    psi = kernels.periodic_ma(_pi_table(d, Jmax))
    psi.setflags(write=False)
    return MaTable(S=d.size, d=d, psi=psi)


def ma_composition_sum(d, j: int, t: int) -> tuple[float, int]:
    """``Psi_j(t)`` as the signed sum over all compositions of ``j``.

    Each ordered tuple of positive parts (i_1, ..., i_k) summing to ``j``
    contributes ``(-1)^k pi_{i_1}(d_t) pi_{i_2}(d_{t-i_1}) ... pi_{i_k}(d_{t-i_1-...-i_{k-1}})``.

    Returns
    -------
    value : float
    count : int
        Number of compositions visited; equals ``2**(j-1)``.
    """
    d = _orders(d)
    j, t = int(j), int(t)
    if j < 1:
        raise ValueError("j must be >= 1")
    if j > MAX_COMPOSITION_LAG:
        raise ValueError(f"j = {j} too large for the 2^(j-1)-term sum (max {MAX_COMPOSITION_LAG})")
    S = d.size
    pi = _pi_table(d, j)

    total = 0.0
    count = 0
    # stack of (remaining, lag consumed so far, signed product)
    stack = [(j, 0, 1.0)]
    while stack:
        remaining, used, prod = stack.pop()
        season = (t - 1 - used) % S
        for part in range(1, remaining + 1):
            term = -prod * pi[season, part]
            if part == remaining:
                total += term
                count += 1
            else:
                stack.append((remaining - part, used + part, term))
    return total, count


def ma_oracle(d, Jmax: int) -> MaTable:
    """``Psi_j(t)`` by inverting the time-varying AR operator directly.

    For each season ``t`` the lower unit-triangular matrix with rows
    ``A[n, n-k] = pi_k(d at time n)`` over the ``Jmax + 1`` times ending at
    ``t`` is inverted by forward substitution; ``Psi_j(t)`` is the response at
    the last time to a unit impulse ``j`` steps earlier.
    """
    d = _orders(d)
    Jmax = int(Jmax)
    if not 0 <= Jmax <= MAX_ORACLE_LAG:
        raise ValueError(f"oracle supports 0 <= Jmax <= {MAX_ORACLE_LAG}")
    S = d.size
    n = Jmax + 1
    pi = _pi_table(d, Jmax)
    psi = np.empty((S, n))
    for t in range(S):
        A = np.zeros((n, n))
        for row in range(n):
            season = (t - (Jmax - row)) % S
            A[row, : row + 1] = pi[season, row::-1]
        inv = linalg.solve_triangular(A, np.eye(n), lower=True, unit_diagonal=True)
        psi[t] = inv[Jmax, ::-1]
    psi.setflags(write=False)
    return MaTable(S=S, d=d, psi=psi)
