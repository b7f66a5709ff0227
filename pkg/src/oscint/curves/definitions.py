"""Registry of named reference curves."""

from __future__ import annotations

from dataclasses import dataclass

from oscint.curve import SupportCurve


@dataclass(frozen=True)
class ReferenceCurve:
    name: str
    curve: SupportCurve
    description: str
    constant_width: bool
    centrally_symmetric: bool


CURVE_REGISTRY: dict[str, ReferenceCurve] = {
    "disk": ReferenceCurve(
        name="disk",
        curve=SupportCurve.disk(1.0),
        description="unit disk centered at the origin",
        constant_width=True,
        centrally_symmetric=True,
    ),
    "ellipse": ReferenceCurve(
        name="ellipse",
        curve=SupportCurve.ellipse(1.5, 1.0),
        description="ellipse with semi-axes 1.5 and 1",
        constant_width=False,
        centrally_symmetric=True,
    ),
    "ellipse21": ReferenceCurve(
        name="ellipse21",
        curve=SupportCurve.ellipse(2.0, 1.0),
        description="ellipse with semi-axes 2 and 1",
        constant_width=False,
        centrally_symmetric=True,
    ),
    "reuleaux3": ReferenceCurve(
        name="reuleaux3",
        curve=SupportCurve.fourier(1.0, (0.0, 0.0, 0.05)),
        description="smooth Reuleaux-type curve h = 1 + 0.05 cos 3θ (width 2)",
        constant_width=True,
        centrally_symmetric=False,
    ),
    "oval2": ReferenceCurve(
        name="oval2",
        curve=SupportCurve.fourier(1.0, (0.0, 0.05)),
        description="centrally symmetric oval h = 1 + 0.05 cos 2θ",
        constant_width=False,
        centrally_symmetric=True,
    ),
}


def get_reference_curve(name: str) -> ReferenceCurve | None:
    """Look up a reference curve by (case-insensitive) name."""
    return CURVE_REGISTRY.get(name.strip().lower())


def list_reference_curves() -> list[ReferenceCurve]:
    return sorted(CURVE_REGISTRY.values(), key=lambda ref: ref.name)
