"""Pure-Python step kernel.

Branches are keyed by packed cell arrays: each occupied cell is one 63-bit
non-negative integer ((x+B)<<42 | (y+B)<<21 | (z+B), B = 2**20) and a branch
key is the big-endian concatenation of its sorted packed cells, so byte
order equals lexicographic (x, y, z) order.  The kernel splits every branch
into blocks of the requested partition, applies the tabulated scattering
columns per block, expands Hadamard forks, and merges identical output
configurations by amplitude addition.

The compiled twin in _step_core.pyx implements the same contract; results
must agree to float round-off (they perform identical operations in the
same order).
"""
from __future__ import annotations

BIAS = 1 << 20
_MASK21 = (1 << 21) - 1

# Local cell offsets of each of the 256 masks, in bit order.
_LOCAL_CELLS = tuple(
    tuple((i & 1, (i >> 1) & 1, (i >> 2) & 1) for i in range(8) if m >> i & 1)
    for m in range(256)
)


def pack_cell(x: int, y: int, z: int) -> int:
    return ((x + BIAS) << 42) | ((y + BIAS) << 21) | (z + BIAS)


def unpack_cell(v: int) -> tuple[int, int, int]:
    return ((v >> 42) - BIAS, ((v >> 21) & _MASK21) - BIAS, (v & _MASK21) - BIAS)


def pack_key(cells) -> bytes:
    packed = sorted(pack_cell(x, y, z) for (x, y, z) in cells)
    return b"".join(v.to_bytes(8, "big") for v in packed)


def unpack_key(key: bytes):
    return tuple(
        unpack_cell(int.from_bytes(key[i : i + 8], "big"))
        for i in range(0, len(key), 8)
    )


def step_packed(branches, offset, counts, masks, amps, prune_eps):
    """One partition sweep over packed branches.

    offset is 0 for the aligned partition (block corners on even coordinates)
    and 1 for the shifted one.  Returns (result branches, removed mass).
    """
    out: dict[bytes, complex] = {}
    for key in sorted(branches):
        amp0 = branches[key]
        blocks: dict[tuple[int, int, int], int] = {}
        for i in range(0, len(key), 8):
            v = int.from_bytes(key[i : i + 8], "big")
            x = (v >> 42) - BIAS
            y = ((v >> 21) & _MASK21) - BIAS
            z = (v & _MASK21) - BIAS
            cx = ((x - offset) >> 1) * 2 + offset
            cy = ((y - offset) >> 1) * 2 + offset
            cz = ((z - offset) >> 1) * 2 + offset
            corner = (cx, cy, cz)
            bit = 1 << ((x - cx) + 2 * (y - cy) + 4 * (z - cz))
            blocks[corner] = blocks.get(corner, 0) | bit
        partials = [(amp0, [])]
        for corner, mask in sorted(blocks.items()):
            k = counts[mask]
            outs = []
            for j in range(k):
                omask = masks[mask, j]
                oamp = complex(amps[mask, j])
                cells = [
                    pack_cell(corner[0] + lx, corner[1] + ly, corner[2] + lz)
                    for (lx, ly, lz) in _LOCAL_CELLS[omask]
                ]
                outs.append((oamp, cells))
            if k == 1:
                oamp, cells = outs[0]
                for p in partials:
                    p[1].extend(cells)
                if oamp != 1.0:
                    partials = [(a * oamp, c) for a, c in partials]
            else:
                nxt = []
                for a, c in partials:
                    for oamp, cells in outs:
                        nxt.append((a * oamp, c + cells))
                partials = nxt
        for a, cells in partials:
            cells.sort()
            okey = b"".join(v.to_bytes(8, "big") for v in cells)
            acc = out.get(okey, 0j) + a
            if acc == 0:
                out.pop(okey, None)
            else:
                out[okey] = acc
    removed = 0.0
    if prune_eps > 0:
        kept = {}
        for k, a in out.items():
            if abs(a) <= prune_eps:
                removed += abs(a) ** 2
            else:
                kept[k] = a
        out = kept
    return out, removed
