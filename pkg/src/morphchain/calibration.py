"""Experimental measurement ingestion and per-element activation angles.

Printed chains are characterized as a whole: the measured total rotation
of a multi-element chain is divided by the element count, and angle-vs-
strain measurements are interpolated at the programming strain actually
applied to the mechanism.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinematics import ActivationProfile


class ExtrapolationError(ValueError):
    """Queried strain lies outside the measured table."""


@dataclass(frozen=True)
class MeasurementTable:
    """Measured (strain, angle) samples for one element class."""

    rows: tuple[tuple[float, float], ...]
    element_class: str  # "bend" or "twist"

    def __post_init__(self):
        if self.element_class not in ("bend", "twist"):
            raise ValueError("element_class must be 'bend' or 'twist'")
        rows = tuple((float(s), float(a)) for s, a in self.rows)
        if len(rows) < 2:
            raise ValueError("need at least 2 rows to interpolate")
        strains = [s for s, _ in rows]
        if any(b <= a for a, b in zip(strains, strains[1:])):
            raise ValueError("strains must be strictly increasing")
        object.__setattr__(self, "rows", rows)

    @property
    def strains(self) -> np.ndarray:
        return np.array([s for s, _ in self.rows])

    @property
    def angles(self) -> np.ndarray:
        return np.array([a for _, a in self.rows])

    @classmethod
    def from_csv(cls, fileobj, element_class: str) -> "MeasurementTable":
        header = fileobj.readline().strip()
        if header != "strain,angle_deg":
            raise ValueError(f"unexpected measurement CSV header: {header!r}")
        rows = []
        for lineno, line in enumerate(fileobj, start=2):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 2 columns")
            rows.append((float(parts[0]), float(parts[1])))
        return cls(rows=tuple(rows), element_class=element_class)


def chain_average(total_angle: float, n_elements: int) -> float:
    """Per-element angle of a characterization chain measured end to end."""
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    return total_angle / n_elements


def strain_to_angle(table: MeasurementTable, strain: float) -> float:
    """Piecewise-linear interpolation of the measured angle at a strain."""
    strains, angles = table.strains, table.angles
    if strain < strains[0] or strain > strains[-1]:
        raise ExtrapolationError(
            f"strain {strain} outside measured range [{strains[0]}, {strains[-1]}]"
        )
    return float(np.interp(strain, strains, angles))


# Published anchor facts: the knot chains were programmed at 13% strain,
# giving 25 deg per bending element (interpolated from eight samples over
# 9-16% strain) and 4 deg per twisting element. Rotation angle is
# proportional to applied strain, which is how these two-point default
# tables are constructed around the anchors.
REFERENCE_STRAIN = 0.13

DEFAULT_BEND_TABLE = MeasurementTable(
    rows=((0.09, 25.0 * 0.09 / 0.13), (0.16, 25.0 * 0.16 / 0.13)),
    element_class="bend",
)
DEFAULT_TWIST_TABLE = MeasurementTable(
    rows=((0.09, 4.0 * 0.09 / 0.13), (0.16, 4.0 * 0.16 / 0.13)),
    element_class="twist",
)

# Finite-element predictions for the same elements, kept for reference
# only; measured values always drive the kinematics.
FEA_PREDICTED_ANGLES = {"bend": 33.0, "twist": 3.5}


def profile_from_tables(
    bend: MeasurementTable = DEFAULT_BEND_TABLE,
    twist: MeasurementTable = DEFAULT_TWIST_TABLE,
    strain: float = REFERENCE_STRAIN,
    base: ActivationProfile = ActivationProfile(),
) -> ActivationProfile:
    """Activation profile with angles interpolated at the given strain."""
    return ActivationProfile(
        element_length_L=base.element_length_L,
        bend_angle=strain_to_angle(bend, strain),
        twist_angle=strain_to_angle(twist, strain),
        bend_offset_axial=base.bend_offset_axial,
        bend_offset_lateral=base.bend_offset_lateral,
    )
