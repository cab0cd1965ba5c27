"""Material interpolation and the density-field -> printable-mesh pipeline.

A 2D grid of design densities rho in [0, 1] blends two materials; the
material interface is the isocontour of the bilinearly interpolated field
at rho = 0.5. Contours are extracted with marching squares, the active
region is extruded into a watertight triangle mesh, and the mesh exports
as binary STL.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np
import shapely
from shapely.geometry import LineString, Polygon, box
from shapely.geometry.polygon import orient
from shapely.ops import polygonize, unary_union


@dataclass(frozen=True)
class DensityField:
    """Grid of design variables; rho[iy, ix] with ny rows and nx columns.

    Grid node (ix, iy) sits at (ix * cell_size, iy * cell_size) mm.
    """

    rho: np.ndarray
    cell_size: float = 1.0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=float)
        if rho.ndim != 2 or rho.shape[0] < 2 or rho.shape[1] < 2:
            raise ValueError("rho must be a 2D grid with at least 2x2 nodes")
        if np.any(rho < 0) or np.any(rho > 1) or not np.all(np.isfinite(rho)):
            raise ValueError("all rho values must lie in [0, 1]")
        if not self.cell_size > 0:
            raise ValueError("cell_size must be positive")
        object.__setattr__(self, "rho", rho)

    @property
    def nx(self) -> int:
        return self.rho.shape[1]

    @property
    def ny(self) -> int:
        return self.rho.shape[0]

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (0.0, 0.0, (self.nx - 1) * self.cell_size, (self.ny - 1) * self.cell_size)

    @classmethod
    def from_csv(cls, fileobj, cell_size: float = 1.0) -> "DensityField":
        rho = np.loadtxt(fileobj, delimiter=",", ndmin=2)
        return cls(rho=rho, cell_size=cell_size)


@dataclass(frozen=True)
class MaterialPair:
    """Two material property values and the blending exponent.

    Penalization (p = 3) is used when interpolating elastic moduli to push
    designs toward pure phases; all other properties interpolate with p = 1.
    """

    psi1: float
    psi2: float
    penalization_p: float = 1.0

    def __post_init__(self):
        if self.penalization_p < 1:
            raise ValueError("penalization_p must be >= 1")


def interpolate_property(pair: MaterialPair, rho) -> np.ndarray | float:
    """Effective property psi1 + rho^p (psi2 - psi1)."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0) or np.any(rho > 1):
        raise ValueError("rho must lie in [0, 1]")
    out = pair.psi1 + rho**pair.penalization_p * (pair.psi2 - pair.psi1)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Marching squares
# ---------------------------------------------------------------------------

def _bilinear(rho: np.ndarray, x: float, y: float) -> float:
    ix = min(int(np.floor(x)), rho.shape[1] - 2)
    iy = min(int(np.floor(y)), rho.shape[0] - 2)
    fx, fy = x - ix, y - iy
    return float(
        rho[iy, ix] * (1 - fx) * (1 - fy)
        + rho[iy, ix + 1] * fx * (1 - fy)
        + rho[iy + 1, ix] * (1 - fx) * fy
        + rho[iy + 1, ix + 1] * fx * fy
    )


def _edge_crossing(v0: float, v1: float, level: float) -> float:
    """Interpolation parameter of the level crossing between two node values."""
    return (level - v0) / (v1 - v0)


# Unoriented segment table: for each 4-bit corner case (bit k set when corner
# k is >= level; corners ordered (0,0), (1,0), (1,1), (0,1) in cell coords)
# list the cell-edge pairs joined by a contour segment. Edges: 0 bottom,
# 1 right, 2 top, 3 left. Saddle cases 5 and 10 are resolved at runtime.
_CASE_SEGMENTS = {
    0: [],
    1: [(0, 3)],
    2: [(0, 1)],
    3: [(1, 3)],
    4: [(1, 2)],
    5: None,  # saddle
    6: [(0, 2)],
    7: [(2, 3)],
    8: [(2, 3)],
    9: [(0, 2)],
    10: None,  # saddle
    11: [(1, 2)],
    12: [(1, 3)],
    13: [(0, 1)],
    14: [(0, 3)],
    15: [],
}


def extract_interface(field: DensityField, level: float = 0.5) -> list[np.ndarray]:
    """Isocontour polylines of the bilinear density field at ``level``.

    Returns a list of (k, 2) arrays in mm. Closed contours repeat their
    first point at the end. Each polyline is oriented so the rho >= level
    side lies to the left of the direction of travel. Saddle cells are
    disambiguated by the cell-center average value.
    """
    rho = field.rho
    ny, nx = rho.shape
    segments: list[tuple[tuple, tuple]] = []
    for iy in range(ny - 1):
        for ix in range(nx - 1):
            v = (rho[iy, ix], rho[iy, ix + 1], rho[iy + 1, ix + 1], rho[iy + 1, ix])
            case = sum(1 << k for k in range(4) if v[k] >= level)
            if case in (0, 15):
                continue
            pairs = _CASE_SEGMENTS[case]
            if pairs is None:
                center_inside = (sum(v) / 4.0) >= level
                # bits 0 and 2 inside (case 5): center joins them when inside
                if case == 5:
                    pairs = [(0, 1), (2, 3)] if center_inside else [(0, 3), (1, 2)]
                else:  # case 10: bits 1 and 3 inside
                    pairs = [(0, 3), (1, 2)] if center_inside else [(0, 1), (2, 3)]
            # edge crossing coordinates in grid units
            pts = {}
            edge_nodes = {0: ((ix, iy), (ix + 1, iy)), 1: ((ix + 1, iy), (ix + 1, iy + 1)),
                          2: ((ix, iy + 1), (ix + 1, iy + 1)), 3: ((ix, iy), (ix, iy + 1))}
            for e in {e for pair in pairs for e in pair}:
                (x0, y0), (x1, y1) = edge_nodes[e]
                t = _edge_crossing(rho[y0, x0], rho[y1, x1], level)
                pts[e] = (x0 + t * (x1 - x0), y0 + t * (y1 - y0))
            for e0, e1 in pairs:
                p0, p1 = pts[e0], pts[e1]
                if p0 == p1:
                    continue  # degenerate crossing through a grid node
                segments.append(_orient_segment(rho, p0, p1, level))
    polylines = _chain_segments(segments)
    return [np.asarray(p, dtype=float) * field.cell_size for p in polylines]


def _orient_segment(rho, p0, p1, level):
    """Flip a segment if needed so the high side is on its left."""
    mx, my = (p0[0] + p1[0]) / 2.0, (p0[1] + p1[1]) / 2.0
    dx, dy = p1[0] - p0[0], p1[1] - p0[1]
    scale = np.hypot(dx, dy)
    eps = 1e-4 / max(scale, 1e-12)
    left = (mx - dy * eps * scale, my + dx * eps * scale)
    right = (mx + dy * eps * scale, my - dx * eps * scale)
    lx = min(max(left[0], 0.0), rho.shape[1] - 1.0)
    ly = min(max(left[1], 0.0), rho.shape[0] - 1.0)
    rx = min(max(right[0], 0.0), rho.shape[1] - 1.0)
    ry = min(max(right[1], 0.0), rho.shape[0] - 1.0)
    if _bilinear(rho, lx, ly) >= _bilinear(rho, rx, ry):
        return (p0, p1)
    return (p1, p0)


def _chain_segments(segments):
    """Join directed segments into maximal polylines (open ones first)."""
    if not segments:
        return []
    out_of = {}
    for i, (a, b) in enumerate(segments):
        out_of.setdefault(a, []).append(i)
    has_in = {b for _, b in segments}
    used = [False] * len(segments)
    polylines = []

    def trace(start_idx):
        a, b = segments[start_idx]
        used[start_idx] = True
        line = [a, b]
        while True:
            nxt = None
            for j in out_of.get(line[-1], []):
                if not used[j]:
                    nxt = j
                    break
            if nxt is None:
                break
            used[nxt] = True
            line.append(segments[nxt][1])
            if line[-1] == line[0]:
                break
        return line

    # open chains start at points with no incoming segment
    for i, (a, _) in enumerate(segments):
        if not used[i] and a not in has_in:
            polylines.append(trace(i))
    for i in range(len(segments)):
        if not used[i]:
            polylines.append(trace(i))
    return polylines


# ---------------------------------------------------------------------------
# Extrusion to a watertight mesh
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Mesh:
    """Indexed triangle surface mesh."""

    vertices: np.ndarray  # (V, 3) float
    faces: np.ndarray  # (F, 3) int

    def __post_init__(self):
        object.__setattr__(self, "vertices", np.asarray(self.vertices, float).reshape(-1, 3))
        object.__setattr__(self, "faces", np.asarray(self.faces, int).reshape(-1, 3))

    def signed_volume(self) -> float:
        v = self.vertices[self.faces]
        return float(np.sum(np.linalg.det(v)) / 6.0)

    def is_watertight(self) -> bool:
        """Every directed edge must appear exactly once (consistent
        orientation and no boundary)."""
        if len(self.faces) == 0:
            return True
        edges = set()
        for a, b, c in self.faces:
            for e in ((a, b), (b, c), (c, a)):
                if e in edges:
                    return False
                edges.add(e)
        return all((b, a) in edges for a, b in edges)


def _face_is_active(face: Polygon, directed_contour_edges: dict) -> bool | None:
    """Classify a subdivision face by matching its ring edges against the
    oriented contour edges (active region on the contour's left)."""
    verdicts = set()
    rings = [face.exterior, *face.interiors]
    for ring in rings:
        coords = list(ring.coords)
        for a, b in zip(coords[:-1], coords[1:]):
            key = (_quant(a), _quant(b))
            rkey = (key[1], key[0])
            if key in directed_contour_edges:
                verdicts.add(True)
            elif rkey in directed_contour_edges:
                verdicts.add(False)
    if not verdicts:
        return None
    if len(verdicts) > 1:
        raise ValueError("inconsistent contour orientations around a region face")
    return verdicts.pop()


def _quant(p, digits: int = 9):
    return (round(p[0], digits), round(p[1], digits))


def extrude_to_mesh(
    contours: list[np.ndarray],
    bounds: tuple[float, float, float, float],
    depth: float,
    default_active: bool = True,
) -> Mesh:
    """Extrude the active-material region along z into a closed mesh.

    The region is the part of the bounding rectangle lying to the left of
    the oriented contour polylines (as produced by extract_interface). With
    no contours at all, the whole rectangle is meshed when
    ``default_active`` is true, else the mesh is empty.
    """
    if not depth > 0:
        raise ValueError("depth must be positive")
    xmin, ymin, xmax, ymax = bounds
    rect = box(xmin, ymin, xmax, ymax)
    lines = []
    for c in contours:
        c = np.asarray(c, dtype=float)
        if len(c) < 2:
            continue
        if (
            c[:, 0].min() < xmin - 1e-9 or c[:, 0].max() > xmax + 1e-9
            or c[:, 1].min() < ymin - 1e-9 or c[:, 1].max() > ymax + 1e-9
        ):
            raise ValueError("contour extends outside the bounding rectangle")
        ls = LineString(c)
        if not ls.is_simple:
            raise ValueError("self-intersecting contour polyline")
        lines.append(ls)
    if not lines:
        if not default_active:
            return Mesh(vertices=np.zeros((0, 3)), faces=np.zeros((0, 3), int))
        polygons = [rect]
    else:
        directed = {}
        for c in contours:
            for a, b in zip(c[:-1], c[1:]):
                directed[(_quant(tuple(a)), _quant(tuple(b)))] = True
        faces = list(polygonize(unary_union([rect.boundary, *lines])))
        polygons = []
        for face in faces:
            face = orient(face, sign=1.0)
            active = _face_is_active(face, directed)
            if active is None:
                raise ValueError("region face touches no contour; cannot classify")
            if active:
                polygons.append(face)
        if not polygons:
            return Mesh(vertices=np.zeros((0, 3)), faces=np.zeros((0, 3), int))

    verts: list[tuple] = []
    vindex: dict[tuple, int] = {}

    def vid(x, y, z):
        key = (round(x, 12), round(y, 12), round(z, 12))
        if key not in vindex:
            vindex[key] = len(verts)
            verts.append((x, y, z))
        return vindex[key]

    tris: list[tuple[int, int, int]] = []
    for poly in polygons:
        cdt = shapely.constrained_delaunay_triangles(poly)
        for tri in cdt.geoms:
            (x0, y0), (x1, y1), (x2, y2) = list(tri.exterior.coords)[:3]
            # orient counterclockwise in the plane
            if (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0) < 0:
                (x1, y1), (x2, y2) = (x2, y2), (x1, y1)
            # top face (normal +z) and bottom face (normal -z)
            tris.append((vid(x0, y0, depth), vid(x1, y1, depth), vid(x2, y2, depth)))
            tris.append((vid(x0, y0, 0.0), vid(x2, y2, 0.0), vid(x1, y1, 0.0)))
        # side walls: ring edges traversed with the region on the left, so
        # the outward wall normal is to the right of travel
        for ring in [poly.exterior, *poly.interiors]:
            coords = list(ring.coords)
            for (ax, ay), (bx, by) in zip(coords[:-1], coords[1:]):
                a0, b0 = vid(ax, ay, 0.0), vid(bx, by, 0.0)
                a1, b1 = vid(ax, ay, depth), vid(bx, by, depth)
                tris.append((a0, b0, b1))
                tris.append((a0, b1, a1))
    return Mesh(vertices=np.array(verts), faces=np.array(tris, int))


def density_to_mesh(
    field: DensityField, depth: float, level: float = 0.5, phase: int = 2
) -> Mesh:
    """Full pipeline: extract the interface and extrude one material phase.

    phase 2 meshes the rho >= level side (material 2), phase 1 the other.
    """
    if phase not in (1, 2):
        raise ValueError("phase must be 1 or 2")
    contours = extract_interface(field, level)
    if phase == 1:
        contours = [c[::-1] for c in contours]
        default_active = bool(field.rho[0, 0] < level)
    else:
        default_active = bool(field.rho[0, 0] >= level)
    return extrude_to_mesh(contours, field.bounds, depth, default_active=default_active)


# ---------------------------------------------------------------------------
# Binary STL
# ---------------------------------------------------------------------------

_STL_HEADER = b"morphchain binary STL".ljust(80, b"\x00")


def export_stl(mesh: Mesh) -> bytes:
    """Serialize to binary STL (80-byte header, uint32 count, 50 bytes per
    triangle: float32 normal, three float32 vertices, uint16 attribute)."""
    if not np.all(np.isfinite(mesh.vertices)):
        raise ValueError("mesh has non-finite coordinates")
    out = bytearray(_STL_HEADER)
    out += struct.pack("<I", len(mesh.faces))
    for a, b, c in mesh.faces:
        va, vb, vc = mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]
        n = np.cross(vb - va, vc - va)
        norm = np.linalg.norm(n)
        n = n / norm if norm > 1e-30 else np.zeros(3)
        out += struct.pack("<12fH", *n, *va, *vb, *vc, 0)
    return bytes(out)


def parse_stl(data: bytes) -> np.ndarray:
    """Triangle vertices (F, 3, 3) from binary STL bytes."""
    if len(data) < 84:
        raise ValueError("truncated STL: missing header or count")
    (count,) = struct.unpack_from("<I", data, 80)
    if len(data) != 84 + 50 * count:
        raise ValueError(f"STL size mismatch: {len(data)} bytes for {count} triangles")
    tris = np.zeros((count, 3, 3), dtype=np.float32)
    for i in range(count):
        vals = struct.unpack_from("<12fH", data, 84 + 50 * i)
        tris[i] = np.array(vals[3:12], dtype=np.float32).reshape(3, 3)
    return tris
