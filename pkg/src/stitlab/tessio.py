"""Tessellation persistence: the ``stit-tess/1`` JSON format and SVG output."""
from __future__ import annotations

import json

import numpy as np

from .engine import (
    CellRecord,
    InternalVertex,
    MaximalPolytopeRecord,
    SplitEvent,
    TessellationState,
)
from .geometry import Face3, Hyperplane, Polygon, Polyhedron, Segment

FORMAT_TAG = "stit-tess/1"


def state_to_dict(state: TessellationState) -> dict:
    doc = {
        "format": FORMAT_TAG,
        "dim": state.dim,
        "time": state.time,
        "window": _polytope_to_dict(state.window),
        "cells": [
            {
                "id": rec.id,
                "vertices": rec.polytope.vertices.tolist(),
                **({"faces": rec.polytope.faces} if state.dim == 3 else {}),
                "birth_time": rec.birth_time,
                "live": rec.id in state.live_ids,
            }
            for rec in sorted(state.cells.values(), key=lambda r: r.id)
        ],
        "maximal_faces": [
            {
                "id": rec.id,
                "vertices": np.asarray(rec.face.vertices).tolist(),
                "birth_time": rec.birth_time,
                "parent_cell_id": rec.parent_cell_id,
                "normal": rec.host_hyperplane.normal.tolist(),
                "offset": rec.host_hyperplane.offset,
                "endpoint_sources": (list(rec.endpoint_sources)
                                     if rec.endpoint_sources is not None else None),
                "internal_vertices": [
                    {"point": list(iv.point), "time": iv.time}
                    for iv in rec.internal_vertices
                ],
            }
            for rec in state.ledger
        ],
        "events": [
            {
                "time": ev.time,
                "cell_id": ev.cell_id,
                "normal": ev.hyperplane.normal.tolist(),
                "offset": ev.hyperplane.offset,
                "child_plus_id": ev.child_plus_id,
                "child_minus_id": ev.child_minus_id,
                "face_id": ev.face_id,
            }
            for ev in state.events
        ],
    }
    return doc


def _polytope_to_dict(p) -> dict:
    out = {"vertices": p.vertices.tolist()}
    if isinstance(p, Polyhedron):
        out["faces"] = p.faces
    return out


def _polytope_from_dict(d: dict, dim: int):
    if dim == 2:
        return Polygon(d["vertices"], validate=False)
    return Polyhedron(d["vertices"], d["faces"])


def state_from_dict(doc: dict) -> TessellationState:
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"unsupported tessellation format: {doc.get('format')!r}")
    dim = int(doc["dim"])
    state = TessellationState(_polytope_from_dict(doc["window"], dim), dim)
    state.time = float(doc["time"])
    for c in doc["cells"]:
        rec = CellRecord(int(c["id"]),
                         _polytope_from_dict(c, dim) if dim == 3 or len(c["vertices"]) >= 3
                         else None,
                         float(c["birth_time"]))
        state.cells[rec.id] = rec
        if c["live"]:
            state.live_ids.append(rec.id)
    state._next_cell_id = 1 + max((r.id for r in state.cells.values()), default=-1)
    for f in doc["maximal_faces"]:
        h = Hyperplane(np.asarray(f["normal"], dtype=float), float(f["offset"]))
        verts = np.asarray(f["vertices"], dtype=float)
        face = Segment(verts[0], verts[1]) if dim == 2 else Face3(verts, h)
        state.add_ledger_record(MaximalPolytopeRecord(
            id=int(f["id"]), face=face, host_hyperplane=h,
            birth_time=float(f["birth_time"]),
            parent_cell_id=int(f["parent_cell_id"]),
            internal_vertices=[InternalVertex(tuple(iv["point"]), float(iv["time"]))
                               for iv in f["internal_vertices"]],
            endpoint_sources=(tuple(f["endpoint_sources"])
                              if f.get("endpoint_sources") is not None else None)))
    for e in doc["events"]:
        h = Hyperplane(np.asarray(e["normal"], dtype=float), float(e["offset"]))
        ev = SplitEvent(float(e["time"]), int(e["cell_id"]), h,
                        int(e["child_plus_id"]), int(e["child_minus_id"]),
                        int(e["face_id"]))
        state.events.append(ev)
        state.split_time[ev.cell_id] = ev.time
    return state


def save_state(state: TessellationState, path) -> None:
    with open(path, "w") as fh:
        json.dump(state_to_dict(state), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_state(path) -> TessellationState:
    with open(path) as fh:
        return state_from_dict(json.load(fh))


def state_to_svg(state: TessellationState, size: int = 640) -> str:
    """SVG rendering of a planar state: faces as lines, opacity by birth time."""
    if state.dim != 2:
        raise ValueError("SVG output supports d=2 states only")
    lo, hi = state.window.bbox()
    span = float(max(hi - lo))
    scale = size / span

    def sx(p):
        return (p[0] - lo[0]) * scale

    def sy(p):
        return size - (p[1] - lo[1]) * scale  # flip y for SVG coordinates

    horizon = max(state.time, 1e-12)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
    ]
    wpts = " ".join(f"{sx(v):.2f},{sy(v):.2f}" for v in state.window.vertices)
    lines.append(f'<polygon points="{wpts}" fill="none" stroke="black" stroke-width="1.5"/>')
    for rec in state.ledger:
        opacity = 0.25 + 0.75 * (1.0 - rec.birth_time / horizon)
        a, b = rec.face.a, rec.face.b
        lines.append(
            f'<line x1="{sx(a):.2f}" y1="{sy(a):.2f}" x2="{sx(b):.2f}" y2="{sy(b):.2f}" '
            f'stroke="black" stroke-width="1" stroke-opacity="{opacity:.3f}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def save_svg(state: TessellationState, path, size: int = 640) -> None:
    with open(path, "w") as fh:
        fh.write(state_to_svg(state, size=size))
