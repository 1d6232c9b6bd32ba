"""
Reference parameterisations: the four-season AR(1) models used for the
reproduction targets and the fractional-order sets of each figure target.
"""
from dataclasses import dataclass

import numpy as np

from .parmodel import ModelKind, PeriodicModelSpec

__all__ = ["REFERENCE_PHI", "FigureTarget", "FIGURE_TARGETS", "reference_spec"]

# season-wise AR(1) coefficients; the stacked AR root is their product 0.1344
REFERENCE_PHI = np.array([[0.7], [0.8], [0.6], [0.4]])

_D1 = (0.1, 0.2, 0.3, 0.4)
_D2 = (0.1, 0.2, 0.4, 0.4)
_D3 = (0.1, 0.4, 0.4, 0.4)
_D4 = (0.4, 0.4, 0.4, 0.4)


def reference_spec(kind, D=_D1) -> PeriodicModelSpec:
    """Four seasons, unit innovation variances, ``REFERENCE_PHI`` unless kind A."""
    kind = ModelKind(kind)
    if kind is ModelKind.A:
        return PeriodicModelSpec(S=4, p=0, phi=np.zeros((4, 0)), D=D,
                                 sigma2=np.ones(4), kind=kind)
    return PeriodicModelSpec(S=4, p=1, phi=REFERENCE_PHI, D=D,
                             sigma2=np.ones(4), kind=kind)


@dataclass(frozen=True)
class FigureTarget:
    name: str
    kinds: tuple
    D: tuple
    jmax: int


FIGURE_TARGETS = {t.name: t for t in (
    FigureTarget("fig1", ("A",), _D1, 25),
    FigureTarget("fig2", ("A",), _D2, 25),
    FigureTarget("fig3", ("A",), _D3, 25),
    FigureTarget("fig4", ("A",), _D4, 25),
    # gamma(4h + nu), nu = 0..3, h = 1..25
    FigureTarget("figB", ("B",), _D1, 103),
    FigureTarget("figC", ("C",), _D2, 100),
    FigureTarget("fig5", ("B", "C"), _D1, 100),
    FigureTarget("fig6", ("B", "C"), _D2, 100),
    FigureTarget("fig7", ("B", "C"), _D3, 100),
    FigureTarget("fig8", ("B", "C"), _D4, 100),
)}
