"""
Periodic autocovariances gamma^(s)(j) = Cov(X_{S tau + s}, X_{S tau + s + j}).

Three routes are provided:

* ``exact_pacvf`` sums the S-variate MA representation,
  Gamma(h) = sum_j C_j Omega C_{j+h}', and reads gamma^(s)(j) off the right
  entry of Gamma(h + delta);
* ``asymptotic_pacvf_fivar`` / ``asymptotic_pacvf_varfi`` evaluate the
  large-lag hyperbolic approximations of the two model classes;
* ``empirical_pacvf`` estimates them from a simulated sample.

Seasons are 1-based in the public API (``s`` in 1..S) and 0-based in arrays
(``gamma[s - 1, j]``).
"""
import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from . import kernels
from .exceptions import NumericalError, SpecError
from .fracdiff import psi_coeffs
from .parmodel import (ModelKind, PeriodicModelSpec, build_companion,
                       check_stationary, pi_total, stationarity_roots)
from .simulate import (DEFAULT_BURNIN, DEFAULT_TRUNCATION, SeriesSample,
                       simulate_many)

__all__ = [
    "LagDecomposition",
    "Method",
    "Pacvf",
    "DEFAULT_EXACT_TRUNCATION",
    "decompose_lag",
    "ma_coefficients",
    "block_autocovariances",
    "exact_pacvf",
    "asymptotic_pacvf_fivar",
    "asymptotic_pacvf_varfi",
    "asymptotic_pacvf",
    "empirical_pacvf",
    "monte_carlo_pacvf",
    "expected_empirical_pacvf",
    "decay_slope",
    "fivar_amplitudes",
    "varfi_amplitudes",
    "frac_cross_tail",
]

DEFAULT_EXACT_TRUNCATION = 100_000


@dataclass(frozen=True)
class LagDecomposition:
    """``j = h*S + nu``; ``delta`` carries into the next block when ``s + nu > S``."""

    j: int
    s: int
    S: int
    h: int
    nu: int
    delta: int

    @property
    def target(self) -> int:
        """Season ``s + nu - S*delta`` (1-based) of the later observation."""
        return self.s + self.nu - self.S * self.delta

    @property
    def block_lag(self) -> int:
        return self.h + self.delta


def _decompose(j: int, s: int, S: int) -> LagDecomposition:
    h, nu = divmod(j, S)
    delta = 1 if s + nu > S else 0
    return LagDecomposition(j=j, s=s, S=S, h=h, nu=nu, delta=delta)


def decompose_lag(j: int, s: int, S: int) -> LagDecomposition:
    """Split a positive univariate lag ``j`` at season ``s`` into (h, nu, delta).

    ``delta = 0`` when ``s + nu <= S`` (the boundary ``s + nu = S`` included)
    and ``delta = 1`` when ``S + 1 <= s + nu <= 2S - 1``.
    """
    j, s, S = int(j), int(s), int(S)
    if S < 1 or not 1 <= s <= S:
        raise ValueError("season s must lie in 1..S")
    if j <= 0:
        raise ValueError("lag j must be positive; lag 0 is the variance")
    return _decompose(j, s, S)


class Method(str, enum.Enum):
    EXACT = "exact"
    ASYMPTOTIC_FIVAR = "asymptotic_fivar"
    ASYMPTOTIC_VARFI = "asymptotic_varfi"
    EMPIRICAL = "empirical"


@dataclass(frozen=True, eq=False)
class Pacvf:
    """Grid ``gamma[s-1, j]`` for seasons 1..S and lags 0..Jmax.

    Entries the method cannot produce (asymptotic values at block lag 0) are NaN.
    """

    S: int
    gamma: np.ndarray
    method: Method
    meta: dict = field(default_factory=dict)

    @property
    def Jmax(self) -> int:
        return self.gamma.shape[1] - 1

    def __call__(self, s: int, j: int) -> float:
        return float(self.gamma[s - 1, j])

    def rows(self):
        """Yield ``(s, j, h, nu, delta, gamma)`` in season-major order."""
        for s in range(1, self.S + 1):
            for j in range(self.Jmax + 1):
                dec = _decompose(j, s, self.S)
                yield s, j, dec.h, dec.nu, dec.delta, float(self.gamma[s - 1, j])

    def to_csv(self, path=None, header=True) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if header:
            writer.writerow(["s", "j", "h", "nu", "delta", "gamma", "method"])
        for row in self.rows():
            writer.writerow([*row[:5], repr(row[5]), self.method.value])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def to_json(self) -> str:
        gamma = [[None if not np.isfinite(v) else float(v) for v in row]
                 for row in self.gamma]
        meta = {k: v for k, v in self.meta.items() if isinstance(v, (int, float, str, bool))}
        return json.dumps({"S": self.S, "method": self.method.value,
                           "gamma": gamma, "meta": meta})

    def covariance_matrix(self, n: int) -> np.ndarray:
        """Covariance of ``X_1..X_n`` (first observation in season 1)."""
        if n - 1 > self.Jmax:
            raise ValueError(f"need Jmax >= {n - 1}, grid has {self.Jmax}")
        idx = np.arange(n)
        lag = idx[None, :] - idx[:, None]
        first = np.minimum(idx[:, None], idx[None, :]) % self.S
        return self.gamma[first, np.abs(lag)]


# ---------------------------------------------------------------------------
# amplitude grids
# ---------------------------------------------------------------------------

def fivar_amplitudes(spec: PeriodicModelSpec) -> np.ndarray:
    """``G[l, m] = Pi_l' Omega Pi_m`` with ``Pi_l`` the l-th row of Phi(1)^{-1}."""
    Pi = pi_total(build_companion(spec))
    return (Pi * spec.sigma2) @ Pi.T


def max_order_seasons(spec: PeriodicModelSpec) -> np.ndarray:
    """Boolean mask of the seasons whose D equals max(D) exactly."""
    return spec.D == spec.D.max()


def varfi_amplitudes(spec: PeriodicModelSpec) -> np.ndarray:
    """``A[l, m] = sum_{i : D_i = max D} Pi(l, i) Pi(m, i) sigma2_i``."""
    Pi = pi_total(build_companion(spec))
    keep = max_order_seasons(spec)
    return (Pi[:, keep] * spec.sigma2[keep]) @ Pi[:, keep].T


# ---------------------------------------------------------------------------
# exact route
# ---------------------------------------------------------------------------

def _pi_until_negligible(spec: PeriodicModelSpec, rtol=1e-18, cap=200_000) -> np.ndarray:
    c = build_companion(spec)
    lags = c.monic_lags()
    first = np.linalg.inv(c.Phi0)
    scale = np.abs(first).max()
    out = [first]
    quiet = 0
    # stop once P consecutive terms (one full recursion state) are negligible
    while quiet < c.P and len(out) < cap:
        j = len(out)
        nxt = np.zeros_like(first)
        for i in range(1, min(j, c.P) + 1):
            nxt += lags[i - 1] @ out[j - i]
        out.append(nxt)
        quiet = quiet + 1 if np.abs(nxt).max() <= rtol * scale else 0
    if len(out) >= cap:
        raise NumericalError("Pi(L) coefficients did not decay; AR part is near a unit root")
    return np.asarray(out)


def ma_coefficients(spec: PeriodicModelSpec, L: int) -> np.ndarray:
    """Stacked MA weights ``Coef_0..Coef_L`` of the S-variate process.

    Model A and B (FIVAR): ``C_j = sum_k Psi_k Pi_{j-k}``.
    Model C (VARFI): ``H_j = sum_k Pi_k Psi_{j-k}``.
    ``Psi_k = diag(psi_k(D_1), ..., psi_k(D_S))``.
    """
    L = int(L)
    S = spec.S
    Pi = _pi_until_negligible(spec)
    psi = np.stack([psi_coeffs(d, L).coeffs for d in spec.D])  # (S, L+1)
    coef = np.empty((L + 1, S, S))
    varfi = spec.kind is ModelKind.C
    for a in range(S):
        for b in range(S):
            weights = psi[b] if varfi else psi[a]
            coef[:, a, b] = np.convolve(weights, Pi[: L + 1, a, b])[: L + 1]
    return coef


def block_autocovariances(coef: np.ndarray, sigma2, H: int, M: int) -> np.ndarray:
    """``Gamma(h) = sum_{j=0}^{M} Coef_j Omega Coef_{j+h}'`` for h = 0..H.

    ``Gamma(h)[a, b] = Cov(X_{a, tau}, X_{b, tau + h})``.
    """
    if coef.shape[0] < M + H + 1:
        raise ValueError("need Coef_0..Coef_{M+H}")
    weighted = coef[: M + 1] * np.asarray(sigma2)[None, None, :]
    out = np.empty((H + 1,) + coef.shape[1:])
    for h in range(H + 1):
        out[h] = np.tensordot(weighted, coef[h:h + M + 1], axes=([0, 2], [0, 2]))
    return out


_STIRLING = (1.0 / 12.0, -1.0 / 360.0, 1.0 / 1260.0, -1.0 / 1680.0)


def _stirling_series(z):
    inv = 1.0 / z
    inv2 = inv * inv
    return inv * (_STIRLING[0] + inv2 * (_STIRLING[1] + inv2 * (_STIRLING[2] + inv2 * _STIRLING[3])))


def _log_ratio_excess(x, d):
    """``log(Gamma(x + d) / Gamma(x + 1)) - (d - 1) log x``, accurate for large x."""
    if x < 30.0:
        return special.gammaln(x + d) - special.gammaln(x + 1.0) - (d - 1.0) * math.log(x)
    # Stirling differences; the (d - 1) log x parts cancel analytically
    return ((x + d - 0.5) * math.log1p(d / x) - (x + 0.5) * math.log1p(1.0 / x) - (d - 1.0)
            + _stirling_series(x + d) - _stirling_series(x + 1.0))


def frac_cross_tail(a: float, b: float, h: int, M: int) -> float:
    """``sum_{j > M} psi_j(a) psi_{j+h}(b)`` for large ``M``.

    With ``f(x) = psi_x(a) psi_{x+h}(b)`` continued to real ``x`` through the
    Gamma ratio, the sum is replaced by its Euler-Maclaurin expansion
    ``int_M^inf f - f(M)/2 - f'(M)/12``. The integral splits into the leading
    power law ``x^{a+b-2} / (Gamma(a) Gamma(b))``, integrated in closed form,
    and an O(1/x) relative correction handled by adaptive quadrature.
    """
    if a == 0.0 or b == 0.0:
        return 0.0
    if a + b >= 1.0:
        raise ValueError("tail diverges unless a + b < 1")
    M = int(M)
    if M < 1:
        raise ValueError("M must be >= 1")
    alpha = a + b - 2.0
    log_c = special.gammaln(a) + special.gammaln(b)

    def excess(x):
        return _log_ratio_excess(x, a) + _log_ratio_excess(x + h, b) + (b - 1.0) * math.log1p(h / x)

    # x = M / t maps [M, inf) onto (0, 1]; the integrand then behaves like
    # t^{-alpha-1} times a smooth function, which QAWS integrates directly
    power = -alpha - 1.0

    # limit of x * expm1(excess(x)) as x -> inf
    first_order = 0.5 * (a * (a - 1.0) + b * (b - 1.0)) + (b - 1.0) * h

    def smooth_part(t):
        if t == 0.0:
            return math.exp(alpha * math.log(M) - log_c) * first_order
        x = M / t
        return (math.exp(alpha * math.log(x) - log_c) * math.expm1(excess(x))
                * M / (t * t) / t ** power)

    lead = math.exp((alpha + 1.0) * math.log(M) - log_c) / -(alpha + 1.0)
    corr, _ = integrate.quad(smooth_part, 0.0, 1.0, weight="alg", wvar=(power, 0.0),
                             epsabs=1e-15 * abs(lead), epsrel=1e-12, limit=200)
    fM = math.exp(alpha * math.log(M) - log_c + excess(float(M)))
    dlog = (special.digamma(M + a) - special.digamma(M + 1.0)
            + special.digamma(M + h + b) - special.digamma(M + h + 1.0))
    return lead + corr - 0.5 * fM - fM * dlog / 12.0


def _tail_matrices(spec: PeriodicModelSpec, H: int, M: int) -> np.ndarray:
    # Beyond lag M the AR part has died out: C_j ~ Psi_j Pi and H_j ~ Pi Psi_j.
    Pi = pi_total(build_companion(spec))
    S = spec.S
    out = np.zeros((H + 1, S, S))
    for h in range(H + 1):
        if spec.kind is ModelKind.C:
            tails = np.array([frac_cross_tail(d, d, h, M) for d in spec.D])
            out[h] = (Pi * (spec.sigma2 * tails)) @ Pi.T
        else:
            G = (Pi * spec.sigma2) @ Pi.T
            tails = np.array([[frac_cross_tail(spec.D[a], spec.D[b], h, M)
                               for b in range(S)] for a in range(S)])
            out[h] = G * tails
    return out


def _grid_from_blocks(gammas: np.ndarray, S: int, Jmax: int) -> np.ndarray:
    grid = np.empty((S, Jmax + 1))
    for s in range(1, S + 1):
        for j in range(Jmax + 1):
            dec = _decompose(j, s, S)
            grid[s - 1, j] = gammas[dec.block_lag, s - 1, dec.target - 1]
    return grid


def exact_pacvf(spec: PeriodicModelSpec, Jmax: int, M: int = DEFAULT_EXACT_TRUNCATION,
                tail: bool = True) -> Pacvf:
    """Periodic autocovariances from the truncated MA representation.

    Parameters
    ----------
    spec : PeriodicModelSpec
    Jmax : int
        Largest univariate lag.
    M : int
        Number of MA terms summed explicitly.
    tail : bool
        Add the analytic remainder ``sum_{j > M}`` (see ``frac_cross_tail``).
        With ``tail=False`` the result is the autocovariance of the process
        whose fractional weights stop at lag ``M``, which is what ``simulate``
        generates once its burn-in reaches ``M``.
    """
    check_stationary(spec)
    Jmax, M = int(Jmax), int(M)
    if Jmax < 0 or M < 0:
        raise ValueError("Jmax and M must be >= 0")
    S = spec.S
    H = Jmax // S + 1
    coef = ma_coefficients(spec, M + H)
    gammas = block_autocovariances(coef, spec.sigma2, H, M)
    if tail:
        gammas = gammas + _tail_matrices(spec, H, M)
    grid = _grid_from_blocks(gammas, S, Jmax)
    return Pacvf(S=S, gamma=grid, method=Method.EXACT,
                 meta={"M": M, "tail": tail, "kind": spec.kind.value, "spec": spec})


# ---------------------------------------------------------------------------
# asymptotic route
# ---------------------------------------------------------------------------

def _hyperbolic_constant(d_lead, d_sum):
    # Gamma(1 - d_sum) / (Gamma(d_lead) Gamma(1 - d_lead)); rgamma(0) = 0
    return special.gamma(1.0 - d_sum) * special.rgamma(d_lead) * special.rgamma(1.0 - d_lead)


def asymptotic_pacvf_fivar(spec: PeriodicModelSpec, Jmax: int) -> Pacvf:
    """Large-lag approximation for the FIVAR class (models A and B).

    ``gamma^(s)(j) ~ (h + delta)^{D_s + D_s' - 1}
    Gamma(1 - D_s - D_s') / (Gamma(D_s') Gamma(1 - D_s')) Pi_s' Omega Pi_s'``
    with ``s' = s + nu - S delta``. Entries whose lead order ``D_s'`` is zero
    have a vanishing prefactor; they are returned as 0 and flagged in
    ``meta["zero_prefactor"]``.
    """
    check_stationary(spec)
    S, D = spec.S, spec.D
    G = fivar_amplitudes(spec)
    grid = np.full((S, Jmax + 1), np.nan)
    zero = np.zeros((S, Jmax + 1), dtype=bool)
    for s in range(1, S + 1):
        for j in range(1, Jmax + 1):
            dec = _decompose(j, s, S)
            if dec.block_lag == 0:
                continue
            t = dec.target
            expo = D[s - 1] + D[t - 1] - 1.0
            const = _hyperbolic_constant(D[t - 1], D[s - 1] + D[t - 1])
            grid[s - 1, j] = dec.block_lag ** expo * const * G[s - 1, t - 1]
            zero[s - 1, j] = D[t - 1] == 0.0
    return Pacvf(S=S, gamma=grid, method=Method.ASYMPTOTIC_FIVAR,
                 meta={"zero_prefactor": zero, "spec": spec})


def asymptotic_pacvf_varfi(spec: PeriodicModelSpec, Jmax: int) -> Pacvf:
    """Large-lag approximation for the VARFI class (model C).

    ``gamma^(s)(j) ~ (h + delta)^{2 Dmax - 1}
    Gamma(1 - 2 Dmax) / (Gamma(Dmax) Gamma(1 - Dmax))
    sum_{i in F1} Pi(s, i) Pi(s', i) sigma2_i`` where ``F1`` holds the seasons
    with ``D_i == Dmax`` (exact equality).
    """
    check_stationary(spec)
    S = spec.S
    dmax = float(spec.D.max())
    A = varfi_amplitudes(spec)
    const = _hyperbolic_constant(dmax, 2.0 * dmax)
    grid = np.full((S, Jmax + 1), np.nan)
    for s in range(1, S + 1):
        for j in range(1, Jmax + 1):
            dec = _decompose(j, s, S)
            if dec.block_lag == 0:
                continue
            grid[s - 1, j] = dec.block_lag ** (2.0 * dmax - 1.0) * const * A[s - 1, dec.target - 1]
    zero = np.zeros((S, Jmax + 1), dtype=bool)
    if dmax == 0.0:
        zero[:, 1:] = True
    return Pacvf(S=S, gamma=grid, method=Method.ASYMPTOTIC_VARFI,
                 meta={"zero_prefactor": zero, "F1": np.flatnonzero(max_order_seasons(spec)) + 1,
                       "spec": spec})


def asymptotic_pacvf(spec: PeriodicModelSpec, Jmax: int) -> Pacvf:
    """The approximation matching ``spec.kind`` (VARFI for C, FIVAR otherwise)."""
    if spec.kind is ModelKind.C:
        return asymptotic_pacvf_varfi(spec, Jmax)
    return asymptotic_pacvf_fivar(spec, Jmax)


# ---------------------------------------------------------------------------
# empirical route
# ---------------------------------------------------------------------------

def empirical_pacvf(sample: SeriesSample, Jmax: int) -> Pacvf:
    """Sample periodic autocovariances with per-season demeaning.

    ``gamma_hat^(s)(j) = (1/N) sum_tau (x_{s+S tau} - m_s)(x_{s+S tau+j} - m_{s+j})``
    where ``N`` counts the summands (no degrees-of-freedom correction).
    """
    S, T, Jmax = sample.S, sample.T, int(Jmax)
    if Jmax < 0:
        raise ValueError("Jmax must be >= 0")
    if T < S * (Jmax // S + 2):
        raise SpecError(f"sample of length {T} too short for Jmax = {Jmax}")
    x = np.asarray(sample.values, dtype=np.float64)
    season = np.arange(T) % S
    means = np.bincount(season, weights=x, minlength=S) / np.bincount(season, minlength=S)
    sums, counts = kernels.season_lag_products(x - means[season], S, Jmax)
    return Pacvf(S=S, gamma=sums / counts, method=Method.EMPIRICAL,
                 meta={"T": T, "seed": sample.seed, "burnin": sample.burnin,
                       "M": sample.truncation, "model": sample.model.value})


def expected_empirical_pacvf(exact: Pacvf, T: int, Jmax: int, chunk: int = 512) -> Pacvf:
    """Expectation of ``empirical_pacvf`` for a sample of length ``T``.

    Demeaning by the seasonal sample means biases the estimator downwards by
    roughly the variance of those means, which under long memory decays only
    like ``T^{2D - 1}``. Given the true autocovariances (``exact.Jmax >= T - 1``)
    the expectation of the demeaned estimator is evaluated exactly::

        E = gamma^(s)(j) - mean_a Cov(x_a, m_{s+j}) - mean_a Cov(x_{a+j}, m_s)
            + Cov(m_s, m_{s+j})

    with ``a`` running over the summands of season ``s``.
    """
    S, T, Jmax = exact.S, int(T), int(Jmax)
    if exact.Jmax < T - 1:
        raise ValueError(f"need autocovariances up to lag {T - 1}")
    season = np.arange(T) % S
    weights = np.zeros((T, S))
    weights[np.arange(T), season] = 1.0
    weights /= weights.sum(axis=0)
    # R[a, m] = Cov(x_a, mean of season m), built from row blocks of Cov(x)
    R = np.empty((T, S))
    cols = np.arange(T)
    for lo in range(0, T, chunk):
        rows = np.arange(lo, min(T, lo + chunk))
        lag = np.abs(cols[None, :] - rows[:, None])
        first = np.minimum(rows[:, None], cols[None, :]) % S
        R[rows] = exact.gamma[first, lag] @ weights
    MM = weights.T @ R
    out = np.empty((S, Jmax + 1))
    for s in range(S):
        for j in range(Jmax + 1):
            a = np.arange(s, T - j, S)
            lead = (s + j) % S
            out[s, j] = (exact.gamma[s, j] - R[a, lead].mean() - R[a + j, s].mean()
                         + MM[s, lead])
    return Pacvf(S=S, gamma=out, method=Method.EXACT,
                 meta={"T": T, "expected_estimator": True, **{k: v for k, v in exact.meta.items()
                                                                if k in ("M", "tail", "kind")}})


def monte_carlo_pacvf(spec: PeriodicModelSpec, T: int, reps: int, Jmax: int, seed: int = 1,
                      burnin: int = DEFAULT_BURNIN, M: int = DEFAULT_TRUNCATION):
    """Mean empirical PACVF over independent replications.

    Returns
    -------
    mean : Pacvf
        Replication average (method ``empirical``).
    se : (S, Jmax + 1) ndarray
        Monte Carlo standard error of the mean (sample sd / sqrt(reps)).
    """
    grids = simulate_many(spec, T, reps, seed=seed, burnin=burnin, M=M,
                          func=lambda smp: empirical_pacvf(smp, Jmax).gamma)
    stack = np.stack(grids)
    se = stack.std(axis=0, ddof=1) / math.sqrt(reps) if reps > 1 else np.full(stack.shape[1:], np.nan)
    mean = Pacvf(S=spec.S, gamma=stack.mean(axis=0), method=Method.EMPIRICAL,
                 meta={"T": T, "reps": reps, "seed": seed, "burnin": burnin, "M": M,
                       "model": spec.kind.value})
    return mean, se


# ---------------------------------------------------------------------------
# decay diagnostics
# ---------------------------------------------------------------------------

def decay_slope(pacv: Pacvf, s: int, nu: int, hmin: int, hmax: int) -> float:
    """Least-squares slope of ``log gamma^(s)(S h + nu)`` on ``log(h + delta)``.

    Raises
    ------
    NumericalError
        If any value in the fit range is non-positive or missing.
    """
    S = pacv.S
    if not 1 <= s <= S or not 0 <= nu < S:
        raise ValueError("need 1 <= s <= S and 0 <= nu < S")
    delta = 1 if s + nu > S else 0
    hs = np.arange(int(hmin), int(hmax) + 1)
    if hs.size < 2:
        raise ValueError("fit range needs at least two lags")
    if hs[0] + delta < 1:
        raise ValueError("block lag h + delta must be >= 1 over the fit range")
    js = S * hs + nu
    if js[-1] > pacv.Jmax:
        raise ValueError(f"lag {js[-1]} beyond Jmax = {pacv.Jmax}")
    y = pacv.gamma[s - 1, js]
    if not np.all(np.isfinite(y)) or np.any(y <= 0.0):
        raise NumericalError(f"non-positive autocovariance in fit range for season {s}; slope undefined")
    slope, _ = np.polyfit(np.log(hs + delta), np.log(y), 1)
    return float(slope)
