"""Configuration data model."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..gas import ConstantState, GasParams
from .curves import CoonsPatch, CurveKind, CurveSegment


@dataclass(frozen=True)
class Region:
    """Uniform region with its state label.

    Bounded regions carry a polygon (ccw or cw vertex array); every region
    carries one probe point known to lie inside it.
    """

    label: str
    state: str
    probe: np.ndarray
    polygon: Optional[np.ndarray] = None


@dataclass(frozen=True)
class SonicCircle:
    state: str
    center: np.ndarray
    radius: float


@dataclass(frozen=True)
class StraightShock:
    segment: CurveSegment
    upstream: str
    downstream: str


@dataclass(frozen=True)
class Configuration:
    """A full self-similar picture.

    ``boundary`` is the counterclockwise loop of segments around Omega; the
    entries of ``gamma_ext`` and ``gamma_int`` are the same objects, so the
    outer normal of Omega on each is the right normal of its tangent.
    Interior shocks carry ``meta["upstream"]`` (state label on the far side);
    sonic arcs carry ``meta["state"]``.
    """

    kind: str
    params: GasParams
    states: Dict[str, ConstantState]
    regions: List[Region]
    adjacency: List[Tuple[str, str]]
    points: Dict[str, np.ndarray]
    sonic_circles: List[SonicCircle]
    boundary: List[CurveSegment]
    gamma_ext: List[CurveSegment]
    gamma_int: List[CurveSegment]
    omega_sides: List[CurveSegment]
    straight_shocks: List[StraightShock] = field(default_factory=list)
    corner: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def inventory(self):
        return {"M": len(self.regions), "N1": len(self.gamma_ext), "N2": len(self.gamma_int)}

    @property
    def shock(self) -> CurveSegment:
        return self.gamma_int[0]

    @property
    def omega_patch(self) -> CoonsPatch:
        return CoonsPatch(self.omega_sides)

    def omega_polygon(self, n=128):
        return np.vstack([c.point(np.linspace(0, 1, n, endpoint=False)) for c in self.boundary])

    def is_curved(self, seg):
        return seg.kind == CurveKind.CURVED_SHOCK
