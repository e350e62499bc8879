"""Scene files: an initial superposition plus gadget placements.

Scene JSON:
    {
      "branches": [ {"re": r, "im": i, "cells": [[x,y,z], ...]}, ... ],
      "gadgets":  [ {"name": s, "anchor": [x,y,z], "orientation": r}, ... ],
      "clock": t0,
      "prune": eps
    }
All keys optional except that a scene must end up non-empty; unknown keys are
rejected so fixtures stay honest across versions.  A gadget placement rotates
the catalogue entry by rotation index `orientation` (about the origin block
centre) and translates it by the even vector `anchor`; scaffold cells are
merged into every branch and overlapping placements are an error.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .gadgets import Gadget, catalogue, transform_gadget
from .scattering import ScatteringOperator
from .state import Superposition, make_configuration

_SCENE_KEYS = {"branches", "gadgets", "clock", "prune"}
_GADGET_KEYS = {"name", "anchor", "orientation"}


class SceneError(ValueError):
    pass


@dataclass
class Scene:
    initial: Superposition
    clock_origin: int = 0
    prune_eps: float | None = None
    placements: tuple = ()
    scaffold: tuple = ()


def parse_scene(data: bytes | str | dict, op: ScatteringOperator) -> Scene:
    """Parse and validate a scene; strict about keys and placements."""
    if isinstance(data, (bytes, str)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as e:
            raise SceneError(f"malformed JSON: {e}") from e
    if not isinstance(data, dict):
        raise SceneError("scene must be a JSON object")
    unknown = set(data) - _SCENE_KEYS
    if unknown:
        raise SceneError(f"unknown scene keys: {sorted(unknown)}")

    clock = data.get("clock", 0)
    if not isinstance(clock, int):
        raise SceneError("clock must be an integer")
    prune_eps = data.get("prune")
    if prune_eps is not None and not (
        isinstance(prune_eps, (int, float)) and prune_eps >= 0
    ):
        raise SceneError("prune must be a non-negative number")

    scaffold_cells: set = set()
    placements = []
    cat = catalogue(op) if data.get("gadgets") else {}
    for entry in data.get("gadgets", ()):
        if not isinstance(entry, dict) or set(entry) - _GADGET_KEYS:
            raise SceneError(f"malformed gadget entry: {entry!r}")
        name = entry.get("name")
        if name not in cat:
            raise SceneError(f"unknown gadget {name!r}")
        anchor = tuple(entry.get("anchor", (0, 0, 0)))
        if len(anchor) != 3 or any(not isinstance(v, int) for v in anchor):
            raise SceneError(f"gadget anchor must be three integers: {anchor}")
        if any(v % 2 for v in anchor):
            raise SceneError(f"gadget anchor must be even per axis: {anchor}")
        orientation = entry.get("orientation", 0)
        if not isinstance(orientation, int) or not 0 <= orientation < 24:
            raise SceneError("gadget orientation must be a rotation index 0..23")
        placed = transform_gadget(cat[name], orientation, anchor, 0)
        overlap = scaffold_cells & set(placed.cells)
        if overlap:
            raise SceneError(f"placement collision at {sorted(overlap)[:4]}")
        scaffold_cells.update(placed.cells)
        placements.append((name, anchor, orientation))

    branches = []
    for b in data.get("branches", ()):
        if not isinstance(b, dict) or set(b) != {"re", "im", "cells"}:
            raise SceneError(f"malformed branch entry: {b!r}")
        amp = complex(float(b["re"]), float(b["im"]))
        if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
            raise SceneError("non-finite branch amplitude")
        cells = [tuple(c) for c in b["cells"]]
        if any(len(c) != 3 for c in cells):
            raise SceneError("branch cells must be [x, y, z] triples")
        branches.append((cells, amp))
    if not branches:
        branches = [((), 1.0 + 0j)]

    initial: Superposition = {}
    for cells, amp in branches:
        cellset = set(cells)
        if cellset & scaffold_cells:
            raise SceneError(
                f"placement collision: branch cells overlap a gadget at "
                f"{sorted(cellset & scaffold_cells)[:4]}"
            )
        config = make_configuration(cellset | scaffold_cells)
        initial[config] = initial.get(config, 0j) + amp
    initial = {k: a for k, a in initial.items() if a != 0}
    return Scene(
        initial=initial,
        clock_origin=clock,
        prune_eps=float(prune_eps) if prune_eps is not None else None,
        placements=tuple(placements),
        scaffold=tuple(sorted(scaffold_cells)),
    )
