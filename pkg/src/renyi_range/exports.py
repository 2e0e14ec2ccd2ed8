"""Serialisation of query results, curves and meshes.

CSV files carry a header row and floats with 17 significant digits, which
is enough to read every double back exactly.  JSON uses Python's shortest
round-trip float repr.  The SVG writer draws the two-order information
diagram; its output depends only on its inputs, byte for byte.
"""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence

import numpy as np

from .diagram2 import BoundResult, DiagramCurve
from .diagram3 import DiagramSurface
from .entropy import BASES, EntropyValue, UniformMixture

UNIT_NAMES = {"e": "nats", "2": "bits", "10": "hartleys"}


def fmt(x) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def in_base(values, base: str):
    """Convert nats to ``base`` units (identity for base e)."""
    if base == "e":
        return values
    return np.asarray(values, dtype=float) / math.log(BASES[base])


def from_base(values, base: str):
    if base == "e":
        return values
    return np.asarray(values, dtype=float) * math.log(BASES[base])


def write_csv(header: Sequence[str], rows: Iterable[Sequence], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    write_csv(header, rows, buf)
    return buf.getvalue()


def read_csv(text: str):
    """Header and rows of a CSV document; numeric cells come back as floats."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    rows = []
    for raw in reader:
        if not raw:
            continue
        row = []
        for cell in raw:
            try:
                row.append(float(cell))
            except ValueError:
                row.append(cell)
        rows.append(row)
    return header, rows


def label(parts) -> str:
    return "-".join(str(int(k)) for k in parts)


def parse_label(text: str) -> tuple:
    return tuple(int(k) for k in str(text).split("-"))


def curve_rows(curve: DiagramCurve, base: str = "e"):
    h = in_base(curve.vertices, base)
    header = ["h1", "h2", "segment_label"]
    rows = [[float(a), float(b), label(lab)] for (a, b), lab in zip(h, curve.segment_labels)]
    return header, rows


def curve_from_rows(header, rows, base: str = "e") -> DiagramCurve:
    if list(header[:3]) != ["h1", "h2", "segment_label"]:
        raise ValueError(f"not a curve table: header {header}")
    verts = from_base(np.array([[r[0], r[1]] for r in rows], dtype=float), base)
    verts = np.asarray(verts, dtype=float)
    verts.setflags(write=False)
    return DiagramCurve(verts, tuple(parse_label(r[2]) for r in rows), True)


def curve_json(curve: DiagramCurve, orders, n: int, base: str = "e") -> dict:
    return {
        "kind": "curve",
        "orders": [str(a) for a in orders],
        "n": n,
        "base": base,
        "closed": curve.closed,
        "vertices": np.asarray(in_base(curve.vertices, base), dtype=float).tolist(),
        "segment_labels": [list(lab) for lab in curve.segment_labels],
    }


def curve_from_json(doc: dict) -> DiagramCurve:
    verts = np.asarray(from_base(np.array(doc["vertices"], dtype=float), doc.get("base", "e")), dtype=float)
    verts.setflags(write=False)
    return DiagramCurve(verts, tuple(tuple(lab) for lab in doc["segment_labels"]), bool(doc["closed"]))


def surface_rows(surfaces: Sequence[DiagramSurface], base: str = "e"):
    header = ["h1", "h2", "h3", "segment_label", "kind"]
    rows = []
    for s in surfaces:
        labels = s.vertex_labels()
        for (a, b, c), lab in zip(in_base(s.vertices, base), labels):
            rows.append([float(a), float(b), float(c), label(lab), s.kind])
    return header, rows


def surface_json(surfaces: Sequence[DiagramSurface], orders, n: int, base: str = "e") -> dict:
    return {
        "kind": "surface",
        "orders": [str(a) for a in orders],
        "n": n,
        "base": base,
        "surfaces": [
            {
                "kind": s.kind,
                "simplices": [list(x) for x in s.simplices],
                "vertices": np.asarray(in_base(s.vertices, base), dtype=float).tolist(),
                "cells": [{"supports": list(c.supports), "barycentric": list(c.barycentric)} for c in s.cells],
                "triangles": s.triangles.tolist(),
                "triangle_simplex": [list(x) for x in s.triangle_simplex],
            }
            for s in surfaces
        ],
    }


def bound_record(result: BoundResult, side: str, orders, h, n, base: str = "e") -> dict:
    w = result.witness
    return {
        "side": side,
        "orders": [str(a) for a in orders],
        "h": [float(x) for x in h],
        "n": n,
        "base": base,
        "bound": float(EntropyValue(float(result.bound)).to(base)),
        "attained": bool(result.attained),
        "multiplicity": int(result.multiplicity),
        "witness": None if w is None else {"supports": list(w.supports), "weights": list(w.weights)},
    }


def bound_from_record(doc: dict) -> BoundResult:
    w = doc["witness"]
    witness = None if w is None else UniformMixture(tuple(w["supports"]), tuple(w["weights"]))
    value = EntropyValue(doc["bound"], doc.get("base", "e")).to("e")
    return BoundResult(value, witness, bool(doc["attained"]), int(doc.get("multiplicity", 1)))


BOUND_HEADER = ["side", "orders", "h", "n", "base", "bound", "attained", "multiplicity",
                "witness_supports", "witness_weights"]


def bound_rows(doc: dict):
    w = doc["witness"]
    row = [
        doc["side"],
        ";".join(doc["orders"]),
        ";".join(fmt(x) for x in doc["h"]),
        "" if doc["n"] is None else str(doc["n"]),
        doc["base"],
        float(doc["bound"]),
        "true" if doc["attained"] else "false",
        str(doc["multiplicity"]),
        "" if w is None else ";".join(str(k) for k in w["supports"]),
        "" if w is None else ";".join(fmt(x) for x in w["weights"]),
    ]
    return BOUND_HEADER, [row]


def bound_record_from_row(header, row) -> dict:
    cells = dict(zip(header, row))

    def floats(text):
        return [float(x) for x in str(text).split(";")] if str(text) != "" else []

    sup = str(cells["witness_supports"])
    return {
        "side": cells["side"],
        "orders": str(cells["orders"]).split(";"),
        "h": floats(cells["h"]),
        "n": None if cells["n"] == "" else int(cells["n"]),
        "base": str(cells["base"]),
        "bound": float(cells["bound"]),
        "attained": cells["attained"] == "true",
        "multiplicity": int(cells["multiplicity"]),
        "witness": None if sup == "" else {
            "supports": [int(float(k)) for k in sup.split(";")],
            "weights": floats(cells["witness_weights"]),
        },
    }


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=True) + "\n"


# SVG layout, in user units.
_SIZE = 400.0
_PAD = 60.0


def curve_svg(curve: DiagramCurve, orders, n: int, base: str = "e") -> str:
    """The closed two-order region with its diagonal, scaled to [0, log n] on both axes."""
    top = math.log(n)
    span = _SIZE

    def px(h1, h2):
        return _PAD + span * h1 / top, _PAD + span * (1.0 - h2 / top)

    pts = " ".join("{:.3f},{:.3f}".format(*px(a, b)) for a, b in curve.vertices)
    unit = UNIT_NAMES[base]
    a1, a2 = (str(a) for a in orders)
    scale = 1.0 if base == "e" else 1.0 / math.log(BASES[base])
    ticks = []
    for k in range(1, n + 1):
        x, y = px(math.log(k), math.log(k))
        ticks.append(
            f'<circle cx="{x:.3f}" cy="{y:.3f}" r="2.5" fill="black"/>'
            f'<text x="{x:.3f}" y="{_PAD + span + 16:.3f}" font-size="10" text-anchor="middle">'
            f"{math.log(k) * scale:.3f}</text>"
            f'<text x="{_PAD - 6:.3f}" y="{y + 3:.3f}" font-size="10" text-anchor="end">'
            f"{math.log(k) * scale:.3f}</text>"
        )
    x0, y0 = px(0.0, 0.0)
    x1, y1 = px(top, top)
    width = _SIZE + 2 * _PAD
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.0f}" height="{width:.0f}" '
        f'viewBox="0 0 {width:.0f} {width:.0f}">',
        f"<title>Range of (H_{a1}, H_{a2}) for n = {n}</title>",
        f'<rect x="{_PAD:.3f}" y="{_PAD:.3f}" width="{span:.3f}" height="{span:.3f}" fill="none" stroke="#999999"/>',
        f'<polygon points="{pts}" fill="#dde8f5" stroke="#1f4e8c" stroke-width="1.5"/>',
        f'<line x1="{x0:.3f}" y1="{y0:.3f}" x2="{x1:.3f}" y2="{y1:.3f}" stroke="black" stroke-dasharray="4,3"/>',
        *ticks,
        f'<text x="{_PAD + span / 2:.3f}" y="{_PAD + span + 40:.3f}" font-size="13" text-anchor="middle">'
        f"H_{a1} ({unit})</text>",
        f'<text x="{_PAD - 44:.3f}" y="{_PAD + span / 2:.3f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 {_PAD - 44:.3f} {_PAD + span / 2:.3f})">H_{a2} ({unit})</text>',
        "</svg>",
    ]
    return "\n".join(lines) + "\n"
