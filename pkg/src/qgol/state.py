"""Finite configurations over Z^3 and their finite-support superpositions.

A configuration is the canonical form of a finite set of occupied cells: a
tuple of (x, y, z) integer triples sorted lexicographically.  All cells
outside the set are quiescent.  A superposition is a plain dict mapping
configurations to complex amplitudes; helpers here keep it canonical (merged
keys, no stray zero branches) and (de)serialize it bit-exactly.

Coordinates are signed 64-bit integers in principle; the evolution kernels
pack them into 21-bit fields, so |coordinate| must stay below 2**20, which
is plenty for any run bounded by occupied support.
"""
from __future__ import annotations

import json
import math

Cell = tuple[int, int, int]
Configuration = tuple[Cell, ...]
Superposition = dict[Configuration, complex]

COORD_LIMIT = 1 << 20


def make_configuration(cells) -> Configuration:
    """Canonical configuration from any iterable of cell triples."""
    out = tuple(sorted({(int(x), int(y), int(z)) for (x, y, z) in cells}))
    for c in out:
        if any(abs(v) >= COORD_LIMIT for v in c):
            raise ValueError(f"cell coordinate out of supported range: {c}")
    return out


def make_superposition(branches) -> Superposition:
    """Merge duplicate configurations, drop exact-zero amplitudes.

    Amplitudes for one configuration are summed in a canonical order, so any
    permutation of the branch list yields the bit-identical superposition.
    The result is not normalized; callers normalize explicitly.  Non-finite
    amplitudes are rejected.
    """
    terms: dict[Configuration, list[complex]] = {}
    for config, amp in branches:
        amp = complex(amp)
        if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
            raise ValueError(f"non-finite amplitude {amp!r}")
        terms.setdefault(make_configuration(config), []).append(amp)
    s: Superposition = {}
    for key, amps in terms.items():
        amps.sort(key=lambda a: (a.real, a.imag))
        acc = sum(amps, 0j)
        if acc != 0:
            s[key] = acc
    return s


def norm(s: Superposition) -> float:
    return math.sqrt(sum(abs(a) ** 2 for a in s.values()))


def normalize(s: Superposition) -> Superposition:
    n = norm(s)
    if n == 0:
        raise ValueError("cannot normalize the zero superposition")
    return {k: a / n for k, a in s.items()}


def prune(s: Superposition, eps: float) -> tuple[Superposition, float]:
    """Drop branches with |amplitude| <= eps; returns (pruned, removed mass)."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    if eps == 0:
        return dict(s), 0.0
    kept: Superposition = {}
    removed = 0.0
    for k, a in s.items():
        if abs(a) <= eps:
            removed += abs(a) ** 2
        else:
            kept[k] = a
    return kept, removed


def inner_product(a: Superposition, b: Superposition) -> complex:
    if len(b) < len(a):
        return inner_product(b, a).conjugate()
    return sum(amp.conjugate() * b[k] for k, amp in a.items() if k in b)


def translate(config: Configuration, v: Cell) -> Configuration:
    dx, dy, dz = v
    return tuple((x + dx, y + dy, z + dz) for (x, y, z) in config)


def translate_superposition(s: Superposition, v: Cell) -> Superposition:
    return {translate(k, v): a for k, a in s.items()}


# --- snapshot serialization -------------------------------------------------
# The snapshot layout is normative: cells sorted lexicographically inside a
# branch, branches sorted by their cell lists, compact separators.  Replays
# and server/CLI parity tests compare snapshots byte for byte.

def snapshot_dict(s: Superposition) -> dict:
    branches = []
    for config in sorted(s):
        amp = s[config]
        branches.append(
            {"re": amp.real, "im": amp.imag, "cells": [list(c) for c in config]}
        )
    return {"branches": branches}


def write_snapshot(s: Superposition) -> bytes:
    return json.dumps(snapshot_dict(s), separators=(",", ":")).encode()


def parse_snapshot(data: bytes | str | dict) -> Superposition:
    if isinstance(data, (bytes, str)):
        data = json.loads(data)
    if not isinstance(data, dict) or set(data) != {"branches"}:
        raise ValueError("snapshot must be an object with a single 'branches' key")
    out: Superposition = {}
    for b in data["branches"]:
        if set(b) != {"re", "im", "cells"}:
            raise ValueError(f"malformed branch keys: {sorted(b)}")
        amp = complex(float(b["re"]), float(b["im"]))
        if not (math.isfinite(amp.real) and math.isfinite(amp.imag)):
            raise ValueError("non-finite amplitude in snapshot")
        key = make_configuration(tuple(c) for c in b["cells"])
        if key in out:
            raise ValueError("duplicate branch configuration in snapshot")
        out[key] = amp
    return out
