"""
Inner loops shared by the simulation and autocovariance code.

Every kernel exists twice: a loop version compiled with numba ``@njit`` and a
vectorised pure-numpy version. The numba path is used when numba is importable
and the environment variable ``PERARFIMA_DISABLE_NUMBA`` is unset or falsy;
``set_backend`` switches at runtime (tests and the benchmark use it to run both
paths on the same inputs). Both paths agree to rounding error.
"""
import os
import logging

import numpy as np

logger = logging.getLogger(__name__)

try:
    from numba import njit
    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func
        if args and callable(args[0]):
            return args[0]
        return decorator

JIT_OPTIONS = {"cache": True, "nogil": True}

_FALSY = {"", "0", "false", "no", "off"}


def _numba_requested():
    flag = os.environ.get("PERARFIMA_DISABLE_NUMBA", "").strip().lower()
    return flag in _FALSY


_backend = "numba" if (HAS_NUMBA and _numba_requested()) else "numpy"


def get_backend():
    """Name of the active kernel backend, ``"numba"`` or ``"numpy"``."""
    return _backend


def set_backend(name):
    """Select the kernel backend; returns the previous one."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, _backend = _backend, name
    return previous


# ---------------------------------------------------------------------------
# truncated one-sided filter: out[t] = sum_{k <= min(t, m-1)} c[k] x[t-k]
# ---------------------------------------------------------------------------

# fastmath lets LLVM vectorise the dot-product reduction (reassociation only)
@njit(fastmath=True, **JIT_OPTIONS)
def _causal_filter_numba(x, coeffs, start):
    n = x.shape[0]
    m = coeffs.shape[0]
    out = np.zeros(n - start)
    for t in range(start, n):
        kmax = min(t, m - 1)
        acc = 0.0
        for k in range(kmax + 1):
            acc += coeffs[k] * x[t - k]
        out[t - start] = acc
    return out


def _causal_filter_numpy(x, coeffs, start):
    n = x.shape[0]
    m = coeffs.shape[0]
    # history older than start - (m - 1) never reaches a requested output
    lo = max(0, start - (m - 1))
    full = np.convolve(x[lo:], coeffs[: n - lo])
    return full[start - lo:n - lo].copy()


def causal_filter(x, coeffs, start=0):
    """Apply a finite one-sided filter using in-sample history only.

    Parameters
    ----------
    x : (n,) ndarray
        Input sequence; values before index 0 are taken as zero.
    coeffs : (m,) ndarray
        Filter weights ``c[0], ..., c[m-1]``.
    start : int
        First output index to compute. Outputs ``out[t]`` for ``t < start``
        are skipped, which saves work when they would be discarded anyway.

    Returns
    -------
    (n - start,) ndarray
        ``out[t - start] = sum_{k=0}^{min(t, m-1)} c[k] x[t-k]``.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    start = int(start)
    if not 0 <= start <= x.shape[0]:
        raise ValueError("start must lie in [0, len(x)]")
    if coeffs.shape[0] == 0 or start == x.shape[0]:
        return np.zeros(x.shape[0] - start)
    if _backend == "numba":
        return _causal_filter_numba(x, coeffs, start)
    return _causal_filter_numpy(x, coeffs, start)


# ---------------------------------------------------------------------------
# VAR recursion  V_t = L u_t + sum_i B_i V_{t-i},  V_t = 0 before the start
# ---------------------------------------------------------------------------

@njit(**JIT_OPTIONS)
def _var_recursion_numba(lead, lags, u):
    n, k = u.shape
    p = lags.shape[0]
    out = np.zeros((n, k))
    for t in range(n):
        for a in range(k):
            acc = 0.0
            for b in range(k):
                acc += lead[a, b] * u[t, b]
            for i in range(1, min(t, p) + 1):
                for b in range(k):
                    acc += lags[i - 1, a, b] * out[t - i, b]
            out[t, a] = acc
    return out


def _var_recursion_numpy(lead, lags, u):
    n, k = u.shape
    p = lags.shape[0]
    out = u @ lead.T
    for t in range(1, n):
        q = min(t, p)
        # lags[0] pairs with out[t-1], lags[1] with out[t-2], ...
        out[t] += np.einsum("iab,ib->a", lags[:q], out[t - 1::-1][:q])
    return out


def var_recursion(lead, lags, u):
    """Run ``V_t = lead @ u_t + sum_{i=1}^{P} lags[i-1] @ V_{t-i}``.

    Parameters
    ----------
    lead : (k, k) ndarray
    lags : (P, k, k) ndarray
    u : (n, k) ndarray
        Driving sequence, one row per time step.

    Returns
    -------
    (n, k) ndarray
        The recursion started from zero initial conditions.
    """
    lead = np.ascontiguousarray(lead, dtype=np.float64)
    lags = np.ascontiguousarray(lags, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.float64)
    if lags.ndim != 3 or lags.shape[1:] != lead.shape:
        raise ValueError("lags must have shape (P, k, k) matching lead")
    if u.shape[0] == 0:
        return np.zeros_like(u)
    if lags.shape[0] == 0:
        return u @ lead.T
    if _backend == "numba":
        return _var_recursion_numba(lead, lags, u)
    return _var_recursion_numpy(lead, lags, u)


# ---------------------------------------------------------------------------
# periodic lagged cross-products of a (demeaned) univariate series
# ---------------------------------------------------------------------------

@njit(**JIT_OPTIONS)
def _season_lag_products_numba(x, period, jmax):
    n = x.shape[0]
    sums = np.zeros((period, jmax + 1))
    counts = np.zeros((period, jmax + 1), dtype=np.int64)
    for t in range(n):
        s = t % period
        top = min(jmax, n - 1 - t)
        xt = x[t]
        for j in range(top + 1):
            sums[s, j] += xt * x[t + j]
            counts[s, j] += 1
    return sums, counts


def _season_lag_products_numpy(x, period, jmax):
    n = x.shape[0]
    sums = np.zeros((period, jmax + 1))
    counts = np.zeros((period, jmax + 1), dtype=np.int64)
    season = np.arange(n) % period
    for j in range(jmax + 1):
        m = n - j
        sums[:, j] = np.bincount(season[:m], weights=x[:m] * x[j:], minlength=period)
        counts[:, j] = np.bincount(season[:m], minlength=period)
    return sums, counts


def season_lag_products(x, period, jmax):
    """Sums and counts of ``x[t] * x[t+j]`` grouped by the season ``t % period``.

    Returns
    -------
    sums : (period, jmax + 1) ndarray
    counts : (period, jmax + 1) int ndarray
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    if _backend == "numba":
        return _season_lag_products_numba(x, int(period), int(jmax))
    return _season_lag_products_numpy(x, int(period), int(jmax))


# ---------------------------------------------------------------------------
# MA weights of an AR operator whose coefficients cycle with period S
#   psi[t, j] = -pi[t, j] - sum_{k=1}^{j-1} pi[t, k] psi[(t-k) % S, j-k]
# ---------------------------------------------------------------------------

@njit(**JIT_OPTIONS)
def _periodic_ma_numba(pi):
    period, width = pi.shape
    psi = np.zeros((period, width))
    for t in range(period):
        psi[t, 0] = 1.0
    for j in range(1, width):
        for t in range(period):
            acc = pi[t, j]
            for k in range(1, j):
                acc += pi[t, k] * psi[(t - k) % period, j - k]
            psi[t, j] = -acc
    return psi


def _periodic_ma_numpy(pi):
    period, width = pi.shape
    psi = np.zeros((period, width))
    psi[:, 0] = 1.0
    rows = np.arange(period)[:, None]
    for j in range(1, width):
        k = np.arange(1, j)
        src = psi[(rows - k[None, :]) % period, j - k[None, :]]
        psi[:, j] = -(pi[:, j] + np.sum(pi[:, 1:j] * src, axis=1))
    return psi


def periodic_ma(pi):
    """MA weights of ``y_t + sum_{j>=1} pi[t % S, j] y_{t-j} = u_t``.

    Parameters
    ----------
    pi : (S, J + 1) ndarray
        Row ``t`` holds the AR weights used at season ``t`` (column 0 ignored).

    Returns
    -------
    (S, J + 1) ndarray
        ``psi[t, j]``: weight of ``u_{t-j}`` in ``y_t`` for ``t`` in season ``t``.
    """
    pi = np.ascontiguousarray(pi, dtype=np.float64)
    if _backend == "numba":
        return _periodic_ma_numba(pi)
    return _periodic_ma_numpy(pi)
