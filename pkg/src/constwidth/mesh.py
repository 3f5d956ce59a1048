"""Labelled boundary meshes of U_3, the Meissner bodies and the ball.

The direction grid is a subdivided icosahedron turned 45 degrees about the
c-axis, so that the six edge-centre normals ``(0, 0, +-1)`` and
``(+-1, +-1, 0)/sqrt2`` are grid vertices from the first subdivision on.
Each grid vertex is mapped to the boundary point with that outer normal;
each triangle is labelled by the case region of its direction centroid.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .bodies import CaseRegion, case_codes, contact_point, support_function
from .volume import fd_spherical_gradient

MAX_SUBDIVISIONS = 8
FD_STEP = 1e-6
_LABEL_TAGS = [c.value for c in CaseRegion]


@dataclass
class TriangleMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.triangles = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        self.labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(self.labels) != len(self.triangles):
            raise ValueError("one label per triangle is required")

    def label_tags(self):
        return [_LABEL_TAGS[k] for k in self.labels]


def is_watertight(mesh: TriangleMesh) -> bool:
    """Every directed edge occurs once and its reverse occurs once."""
    t = mesh.triangles
    e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
    nv = max(len(mesh.vertices), 1)
    fwd = e[:, 0] * nv + e[:, 1]
    rev = e[:, 1] * nv + e[:, 0]
    if len(np.unique(fwd)) != len(fwd):
        return False
    return bool(np.array_equal(np.sort(fwd), np.sort(rev)))


def mesh_volume(mesh: TriangleMesh) -> float:
    """Divergence-theorem volume: signed tetrahedra against the origin."""
    if not is_watertight(mesh):
        raise ValueError("mesh is not watertight")
    v = mesh.vertices[mesh.triangles]
    return float(np.sum(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2]))) / 6.0)


# --------------------------------------------------------------------------
# direction grid


def _icosahedron():
    p = (1.0 + math.sqrt(5.0)) / 2.0
    v = np.array(
        [
            [-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
            [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
            [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1],
        ],
        dtype=float,
    )
    f = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ]
    )
    return v / np.linalg.norm(v, axis=1, keepdims=True), f


def _subdivide(v, f):
    """Split each triangle in four, sharing edge midpoints."""
    edges = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
    uniq, inv = np.unique(edges, axis=0, return_inverse=True)
    inv = inv.reshape(-1)
    mid = v[uniq[:, 0]] + v[uniq[:, 1]]
    mid /= np.linalg.norm(mid, axis=1, keepdims=True)
    m = len(f)
    ab, bc, ca = (len(v) + inv[:m], len(v) + inv[m : 2 * m], len(v) + inv[2 * m :])
    a, b, c = f[:, 0], f[:, 1], f[:, 2]
    nf = np.concatenate(
        [np.stack(t, axis=1) for t in ((a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca))]
    )
    return np.concatenate([v, mid]), nf


def direction_grid(subdivisions: int):
    """Unit directions and outward-oriented triangles of the turned icosphere."""
    if not 0 <= subdivisions <= MAX_SUBDIVISIONS:
        raise ValueError(f"subdivisions must be in [0, {MAX_SUBDIVISIONS}]")
    v, f = _icosahedron()
    for _ in range(subdivisions):
        v, f = _subdivide(v, f)
    s = math.sqrt(0.5)
    rot = np.array([[s, -s, 0.0], [s, s, 0.0], [0.0, 0.0, 1.0]])
    v = v @ rot.T
    tri = v[f]
    n = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    flip = np.einsum("ij,ij->i", n, tri.sum(axis=1)) < 0
    f[flip] = f[flip][:, [0, 2, 1]]
    return v, f


# --------------------------------------------------------------------------
# boundary points


def boundary_point(body, theta, method: str = "analytic"):
    """Boundary point with outer unit normal ``theta``.

    ``analytic`` uses the closed-form contact map of the body;
    ``fd`` uses ``h theta + grad_S h`` with central differences.
    """
    theta = np.asarray(theta, dtype=float)
    if method == "analytic":
        return contact_point(body, theta)
    if method == "fd":
        h = support_function(body)
        t = np.atleast_2d(theta)
        x = h(t)[:, None] * t + fd_spherical_gradient(h, t, FD_STEP)
        return x.reshape(theta.shape)
    raise ValueError(f"unknown method {method!r}")


def generate_mesh(body, subdivisions: int, method: str = "analytic") -> TriangleMesh:
    if body.dim != 3:
        raise ValueError("meshes are for bodies in R^3")
    dirs, faces = direction_grid(subdivisions)
    verts = boundary_point(body, dirs, method)
    centroid = dirs[faces].sum(axis=1)
    centroid /= np.linalg.norm(centroid, axis=1, keepdims=True)
    return TriangleMesh(verts, faces, case_codes(centroid))


def label_census(mesh: TriangleMesh) -> dict:
    """Number of edge-connected patches per label tag."""
    t = mesh.triangles
    m = len(t)
    edges = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    owner = np.tile(np.arange(m), 3)
    key = edges[:, 0] * max(len(mesh.vertices), 1) + edges[:, 1]
    order = np.argsort(key, kind="stable")
    k, o = key[order], owner[order]
    pair = k[:-1] == k[1:]
    i, j = o[:-1][pair], o[1:][pair]
    same = mesh.labels[i] == mesh.labels[j]
    graph = coo_matrix((np.ones(same.sum()), (i[same], j[same])), shape=(m, m))
    _, comp = connected_components(graph, directed=False)
    census = {}
    for code, tag in enumerate(_LABEL_TAGS):
        sel = mesh.labels == code
        census[tag] = int(len(np.unique(comp[sel]))) if sel.any() else 0
    return census


# --------------------------------------------------------------------------
# export and import


def _fmt(x) -> str:
    return format(float(x), ".17g")


def export_mesh(mesh: TriangleMesh, fmt: str, path) -> None:
    """Write ``mesh`` as ASCII OBJ or PLY with 17-digit floats."""
    fmt = fmt.lower()
    lines = []
    tags = mesh.label_tags()
    if fmt == "obj":
        lines += [f"v {_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in mesh.vertices]
        current = None
        for (a, b, c), tag in zip(mesh.triangles, tags):
            if tag != current:
                lines.append(f"usemtl region_{tag}")
                current = tag
            lines.append(f"f {a + 1} {b + 1} {c + 1}")
    elif fmt == "ply":
        lines += [
            "ply",
            "format ascii 1.0",
            "comment region codes: " + " ".join(f"{k}={t}" for k, t in enumerate(_LABEL_TAGS)),
            f"element vertex {len(mesh.vertices)}",
            "property double x",
            "property double y",
            "property double z",
            f"element face {len(mesh.triangles)}",
            "property list uchar int vertex_indices",
            "property int region",
            "end_header",
        ]
        lines += [f"{_fmt(x)} {_fmt(y)} {_fmt(z)}" for x, y, z in mesh.vertices]
        lines += [f"3 {a} {b} {c} {r}" for (a, b, c), r in zip(mesh.triangles, mesh.labels)]
    else:
        raise ValueError(f"unknown mesh format {fmt!r}")
    with open(os.fspath(path), "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _read_obj(fh) -> TriangleMesh:
    verts, faces, labels = [], [], []
    code = 0
    for line in fh:
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        if parts[0] == "v":
            verts.append([float(p) for p in parts[1:4]])
        elif parts[0] == "usemtl":
            code = _LABEL_TAGS.index(parts[1].removeprefix("region_"))
        elif parts[0] == "f":
            faces.append([int(p.split("/")[0]) - 1 for p in parts[1:4]])
            labels.append(code)
    return TriangleMesh(np.array(verts), np.array(faces), np.array(labels))


def _read_ply(fh) -> TriangleMesh:
    nv = nf = 0
    for line in fh:
        parts = line.split()
        if parts[:2] == ["element", "vertex"]:
            nv = int(parts[2])
        elif parts[:2] == ["element", "face"]:
            nf = int(parts[2])
        elif parts == ["end_header"]:
            break
    verts = [[float(p) for p in next(fh).split()] for _ in range(nv)]
    rows = [[int(p) for p in next(fh).split()] for _ in range(nf)]
    faces = [r[1:4] for r in rows]
    labels = [r[4] for r in rows]
    return TriangleMesh(np.array(verts), np.array(faces), np.array(labels))


def read_mesh(path, fmt: str | None = None) -> TriangleMesh:
    path = os.fspath(path)
    fmt = (fmt or os.path.splitext(path)[1].lstrip(".")).lower()
    with open(path, encoding="ascii") as fh:
        if fmt == "obj":
            return _read_obj(fh)
        if fmt == "ply":
            return _read_ply(fh)
    raise ValueError(f"unknown mesh format {fmt!r}")


def cube_mesh(half: float = 1.0) -> TriangleMesh:
    """The cube with vertices ``(+-half)^3`` as 12 outward triangles."""
    v = half * np.array(
        [[x, y, z] for x in (-1, 1) for y in (-1, 1) for z in (-1, 1)], dtype=float
    )
    quads = [(0, 1, 3, 2), (4, 6, 7, 5), (0, 4, 5, 1), (2, 3, 7, 6), (0, 2, 6, 4), (1, 5, 7, 3)]
    tris = []
    for a, b, c, d in quads:
        tris += [(a, b, c), (a, c, d)]
    return TriangleMesh(v, np.array(tris), np.zeros(len(tris), dtype=int))


def mesh_summary(mesh: TriangleMesh) -> dict:
    return {
        "vertices": int(len(mesh.vertices)),
        "triangles": int(len(mesh.triangles)),
        "watertight": is_watertight(mesh),
        "mesh_volume": mesh_volume(mesh),
        "label_census": label_census(mesh),
    }
