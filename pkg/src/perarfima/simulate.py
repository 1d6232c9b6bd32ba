"""
Sample paths of the three periodic long-memory models.

All three start from Gaussian innovations u_{s,tau} ~ N(0, sigma2_s), drawn
block by block from ``numpy.random.default_rng(seed)`` (PCG64) as an
(n_blocks, S) array. Then

* model A fractionally integrates each season's innovations,
* model B runs the stacked AR recursion on the innovations first and
  fractionally integrates each season of the result afterwards,
* model C fractionally integrates the innovations first and feeds them to the
  stacked AR recursion afterwards.

Fractional integration is the MA filter with weights psi_0..psi_M, using only
the history generated so far. The first ``burnin`` blocks are discarded; a
retained block therefore sees at least ``burnin`` blocks of history, and
exactly ``M`` lags when ``burnin >= M``.
"""
import csv
import io
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .exceptions import SpecError
from .fracdiff import DEFAULT_TRUNCATION, psi_coeffs
from .parmodel import (ModelKind, PeriodicModelSpec, build_companion,
                       check_stationary, stationarity_roots)

logger = logging.getLogger(__name__)

__all__ = [
    "SeriesSample",
    "DEFAULT_BURNIN",
    "simulate",
    "simulate_many",
    "replicate_seeds",
    "thread_count",
]

DEFAULT_BURNIN = 2000


@dataclass(frozen=True, eq=False)
class SeriesSample:
    """A simulated univariate series with seasons interleaved.

    ``values[t]`` (0-based ``t``) belongs to season ``t % S + 1``.
    """

    values: np.ndarray
    S: int
    seed: int
    model: ModelKind
    burnin: int
    truncation: int

    @property
    def T(self) -> int:
        return self.values.shape[0]

    @property
    def seasons(self) -> np.ndarray:
        return np.arange(self.T) % self.S + 1

    def blocks(self) -> np.ndarray:
        """Complete periods as an (n_blocks, S) array, row ``tau`` = X_tau."""
        n = self.T // self.S
        return self.values[: n * self.S].reshape(n, self.S)

    def to_csv(self, path=None) -> str:
        """CSV with header ``t,season,value`` and 1-based ``t``."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "season", "value"])
        for t, (season, value) in enumerate(zip(self.seasons, self.values), start=1):
            writer.writerow([t, int(season), repr(float(value))])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text


def _var_warmup(spec: PeriodicModelSpec) -> int:
    """Blocks after which the AR impulse response is below double precision."""
    c = build_companion(spec)
    rho = stationarity_roots(c)[0] if spec.p else 0.0
    if rho <= 0.0:
        return spec.S * c.P + 1
    return int(math.ceil(math.log(1e-18) / math.log(rho))) + spec.S * c.P


def simulate(spec: PeriodicModelSpec, T: int, seed: int = 1,
             burnin: int = DEFAULT_BURNIN, M: int = DEFAULT_TRUNCATION) -> SeriesSample:
    """Simulate ``T`` observations of model ``spec.kind``.

    Parameters
    ----------
    spec : PeriodicModelSpec
        Must be periodically stationary.
    T : int
        Number of univariate observations returned (need not be a multiple
        of ``S``; the last block is cut).
    seed : int
        Seed for ``numpy.random.default_rng``.
    burnin : int
        Number of S-variate blocks generated and discarded.
    M : int
        Truncation of the fractional integration weights.
    """
    T, burnin, M = int(T), int(burnin), int(M)
    if T < 1:
        raise SpecError("T must be >= 1")
    if burnin < 0 or M < 0:
        raise SpecError("burnin and M must be >= 0")
    check_stationary(spec)

    S = spec.S
    n_blocks = -(-T // S)
    total = burnin + n_blocks
    rng = np.random.default_rng(seed)
    u = rng.standard_normal((total, S)) * np.sqrt(spec.sigma2)
    weights = [psi_coeffs(d, M).coeffs for d in spec.D]

    if spec.kind is ModelKind.A:
        out = np.column_stack([kernels.causal_filter(u[:, s], weights[s], burnin)
                               for s in range(S)])
    else:
        c = build_companion(spec)
        lead = np.linalg.inv(c.Phi0)
        lags = c.monic_lags()
        if spec.kind is ModelKind.B:
            v = kernels.var_recursion(lead, lags, u)
            out = np.column_stack([kernels.causal_filter(v[:, s], weights[s], burnin)
                                   for s in range(S)])
        else:
            # the AR recursion forgets its start after _var_warmup blocks, so the
            # integrated noise is only needed from there on
            first = max(0, burnin - _var_warmup(spec))
            w = np.column_stack([kernels.causal_filter(u[:, s], weights[s], first)
                                 for s in range(S)])
            out = kernels.var_recursion(lead, lags, w)[burnin - first:]

    values = np.ascontiguousarray(out.reshape(-1)[:T])
    values.setflags(write=False)
    return SeriesSample(values=values, S=S, seed=seed, model=spec.kind,
                        burnin=burnin, truncation=M)


def replicate_seeds(seed: int, reps: int) -> list[int]:
    """Independent per-replication seeds derived from one master seed."""
    children = np.random.SeedSequence(int(seed)).spawn(int(reps))
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def thread_count() -> int:
    """Worker cap from ``PERARFIMA_THREADS`` (default: CPU count)."""
    raw = os.environ.get("PERARFIMA_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logger.warning("ignoring non-integer PERARFIMA_THREADS=%r", raw)
    return os.cpu_count() or 1


def simulate_many(spec: PeriodicModelSpec, T: int, reps: int, seed: int = 1,
                  burnin: int = DEFAULT_BURNIN, M: int = DEFAULT_TRUNCATION,
                  func=None):
    """Run ``reps`` independent replications, optionally mapping ``func`` over them.

    Replication ``r`` uses ``replicate_seeds(seed, reps)[r]``; results come
    back in replication order whatever the number of worker threads.
    """
    seeds = replicate_seeds(seed, reps)

    def one(s):
        sample = simulate(spec, T, seed=s, burnin=burnin, M=M)
        return func(sample) if func is not None else sample

    workers = min(thread_count(), len(seeds))
    if workers <= 1:
        return [one(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, seeds))
