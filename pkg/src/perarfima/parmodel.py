"""
Periodic AR structure in stacked (S-variate) form.

A univariate season-dependent AR filter

    X_t = sum_{i=1}^{p} phi_{s(t), i} X_{t-i} + e_t

is rewritten for the vector X_tau = (X_{1,tau}, ..., X_{S,tau})' of one full
period as Phi0 X_tau - sum_{i=1}^{P} Phi_i X_{tau-i} = e_tau, with
P = floor((p + 1) / S) + 1. Seasons are numbered 1..S in docstrings and
0..S-1 in arrays.
"""
import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .exceptions import NonStationaryError, NumericalError, SpecError

__all__ = [
    "ModelKind",
    "PeriodicModelSpec",
    "CompanionForm",
    "PiSequence",
    "build_companion",
    "stationarity_roots",
    "is_stationary",
    "check_stationary",
    "pi_sequence",
    "pi_total",
]


class ModelKind(str, enum.Enum):
    """Which operator order the model uses.

    ``A``: seasonal fractional integration only (no AR part).
    ``B``: AR filter after fractional differencing (FIVAR stacked form).
    ``C``: AR filter driven by fractionally integrated noise (VARFI form).
    """

    A = "A"
    B = "B"
    C = "C"


@dataclass(frozen=True, eq=False)
class PeriodicModelSpec:
    """Full parameterisation of a model of kind A, B or C.

    Attributes
    ----------
    S : int
        Number of seasons.
    p : int
        AR order.
    phi : (S, p) ndarray
        ``phi[s-1, i-1]`` is the coefficient of season ``s`` on lag ``i``.
    D : (S,) ndarray
        Seasonal fractional orders, each in ``[0, 0.5)``.
    sigma2 : (S,) ndarray
        Innovation variances, all positive.
    kind : ModelKind
    """

    S: int
    p: int
    phi: np.ndarray
    D: np.ndarray
    sigma2: np.ndarray
    kind: ModelKind = ModelKind.B

    def __post_init__(self):
        S, p = int(self.S), int(self.p)
        if S < 1:
            raise SpecError("S must be >= 1")
        if p < 0:
            raise SpecError("p must be >= 0")
        phi = np.asarray(self.phi, dtype=np.float64)
        if phi.size == 0:
            phi = np.zeros((S, p))
        if phi.shape != (S, p):
            raise SpecError(f"phi must have shape (S, p) = ({S}, {p}), got {phi.shape}")
        D = np.asarray(self.D, dtype=np.float64).reshape(-1)
        sigma2 = np.asarray(self.sigma2, dtype=np.float64).reshape(-1)
        if D.shape != (S,) or sigma2.shape != (S,):
            raise SpecError("D and sigma2 must have one entry per season")
        if not (np.all(np.isfinite(phi)) and np.all(np.isfinite(D))):
            raise SpecError("phi and D must be finite")
        if np.any(D < 0.0) or np.any(D >= 0.5):
            raise NonStationaryError("D out of [0, 0.5)")
        if np.any(~(sigma2 > 0.0)):
            raise SpecError("sigma2 must be positive")
        kind = ModelKind(self.kind)
        if kind is ModelKind.A and p != 0:
            raise SpecError("model A has no AR part; p must be 0")
        for name, value in (("S", S), ("p", p), ("phi", phi), ("D", D),
                            ("sigma2", sigma2), ("kind", kind)):
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def omega(self) -> np.ndarray:
        """Innovation covariance ``diag(sigma2)`` of the stacked model."""
        return np.diag(self.sigma2)

    def replace(self, **changes) -> "PeriodicModelSpec":
        fields = dict(S=self.S, p=self.p, phi=self.phi, D=self.D,
                      sigma2=self.sigma2, kind=self.kind)
        fields.update(changes)
        return PeriodicModelSpec(**fields)

    # -- JSON ---------------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "S": self.S,
            "p": self.p,
            "phi": self.phi.tolist(),
            "D": self.D.tolist(),
            "sigma2": self.sigma2.tolist(),
            "kind": self.kind.value,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "PeriodicModelSpec":
        if not isinstance(obj, dict):
            raise SpecError("model spec must be a JSON object")
        missing = {"S", "D"} - set(obj)
        if missing:
            raise SpecError(f"model spec is missing {sorted(missing)}")
        S = int(obj["S"])
        p = int(obj.get("p", 0))
        try:
            kind = ModelKind(str(obj.get("kind", "A" if p == 0 else "B")))
        except ValueError as exc:
            raise SpecError(f"unknown model kind {obj.get('kind')!r}") from exc
        phi = obj.get("phi", [])
        if p == 0:
            phi = np.zeros((S, 0))
        sigma2 = obj.get("sigma2", [1.0] * S)
        return cls(S=S, p=p, phi=phi, D=obj["D"], sigma2=sigma2, kind=kind)

    @classmethod
    def from_json(cls, path) -> "PeriodicModelSpec":
        text = Path(path).read_text()
        if not text.strip():
            raise SpecError(f"spec file {path} is empty")
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec file {path} is not valid JSON: {exc}") from exc
        return cls.from_dict(obj)

    def to_json(self, path=None, indent=2) -> str:
        text = json.dumps(self.to_dict(), indent=indent)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text


@dataclass(frozen=True)
class CompanionForm:
    """Matrices ``Phi0`` (unit lower triangular) and ``Phi[0..P-1]`` = Phi_1..Phi_P."""

    S: int
    P: int
    Phi0: np.ndarray
    Phi: np.ndarray  # (P, S, S)

    @property
    def at_one(self) -> np.ndarray:
        """``Phi(1) = Phi0 - sum_i Phi_i``."""
        return self.Phi0 - self.Phi.sum(axis=0)

    def monic_lags(self) -> np.ndarray:
        """``Phi0^{-1} Phi_i`` for i = 1..P, shape (P, S, S)."""
        return np.linalg.solve(self.Phi0[None, :, :], self.Phi)


@dataclass(frozen=True)
class PiSequence:
    """Coefficients ``Pi_0..Pi_J`` of ``Phi(L)^{-1}``, shape (J + 1, S, S)."""

    matrices: np.ndarray

    @property
    def J(self) -> int:
        return self.matrices.shape[0] - 1

    def __getitem__(self, j):
        return self.matrices[j]

    def total(self) -> np.ndarray:
        return self.matrices.sum(axis=0)


def companion_order(S: int, p: int) -> int:
    """Number of lag matrices, ``floor((p + 1) / S) + 1``."""
    return (p + 1) // S + 1


def build_companion(spec: PeriodicModelSpec) -> CompanionForm:
    """Stack the periodic AR filter into its S-variate form.

    ``Phi0[s, j] = -phi[s, s-j]`` below the diagonal and
    ``Phi_i[s, j] = phi[s, i*S + s - j]`` whenever that lag lies in 1..p
    (1-based seasons and lags).
    """
    S, p = spec.S, spec.p
    P = companion_order(S, p)
    Phi0 = np.eye(S)
    Phi = np.zeros((P, S, S))
    for s in range(1, S + 1):
        for j in range(1, S + 1):
            if s > j and s - j <= p:
                Phi0[s - 1, j - 1] = -spec.phi[s - 1, s - j - 1]
            for i in range(1, P + 1):
                lag = i * S + s - j
                if 1 <= lag <= p:
                    Phi[i - 1, s - 1, j - 1] = spec.phi[s - 1, lag - 1]
    return CompanionForm(S=S, P=P, Phi0=Phi0, Phi=Phi)


def _as_companion(obj) -> CompanionForm:
    if isinstance(obj, CompanionForm):
        return obj
    if isinstance(obj, PeriodicModelSpec):
        return build_companion(obj)
    raise TypeError("expected a CompanionForm or PeriodicModelSpec")


def stationarity_roots(c) -> np.ndarray:
    """Moduli of the roots of ``det(I z^P - sum_i Phi0^{-1} Phi_i z^{P-i}) = 0``.

    Computed as eigenvalue moduli of the block companion matrix of the monic
    matrix polynomial; sorted in decreasing order (S * P values).
    """
    c = _as_companion(c)
    S, P = c.S, c.P
    block = np.zeros((S * P, S * P))
    block[:S, :] = np.concatenate(list(c.monic_lags()), axis=1)
    if P > 1:
        block[S:, :-S] = np.eye(S * (P - 1))
    moduli = np.abs(np.linalg.eigvals(block))
    return np.sort(moduli)[::-1]


def is_stationary(spec: PeriodicModelSpec) -> bool:
    """AR roots strictly inside the unit circle and every D in [0, 0.5)."""
    roots = stationarity_roots(spec)
    d_ok = bool(np.all((spec.D >= 0.0) & (spec.D < 0.5)))
    return bool(roots.size == 0 or roots[0] < 1.0) and d_ok


def check_stationary(spec: PeriodicModelSpec) -> None:
    """Raise :class:`NonStationaryError` unless ``is_stationary(spec)``."""
    if np.any(spec.D < 0.0) or np.any(spec.D >= 0.5):
        raise NonStationaryError("D out of [0, 0.5)")
    roots = stationarity_roots(spec)
    if roots.size and roots[0] >= 1.0:
        raise NonStationaryError(
            f"periodic AR part is not stationary (largest root modulus {roots[0]:.6g} >= 1)")


def pi_sequence(c, J: int) -> PiSequence:
    """First ``J + 1`` coefficients of ``[Phi(L)]^{-1}``.

    ``Pi_0 = Phi0^{-1}`` and ``Pi_j = Phi0^{-1} sum_{i=1}^{min(j,P)} Phi_i Pi_{j-i}``.
    """
    c = _as_companion(c)
    J = int(J)
    if J < 0:
        raise ValueError("J must be >= 0")
    roots = stationarity_roots(c)
    if roots.size and roots[0] >= 1.0:
        raise NonStationaryError(
            f"[Phi(L)]^-1 diverges: largest root modulus {roots[0]:.6g} >= 1")
    lags = c.monic_lags()
    out = np.zeros((J + 1, c.S, c.S))
    out[0] = np.linalg.inv(c.Phi0)
    for j in range(1, J + 1):
        for i in range(1, min(j, c.P) + 1):
            out[j] += lags[i - 1] @ out[j - i]
    return PiSequence(out)


def pi_total(c) -> np.ndarray:
    """``Pi = Phi(1)^{-1} = sum_j Pi_j`` by a direct linear solve."""
    c = _as_companion(c)
    at_one = c.at_one
    if np.linalg.cond(at_one) > 1e14:
        raise NumericalError("Phi(1) is singular: the AR part has a root at unity")
    return np.linalg.solve(at_one, np.eye(c.S))
