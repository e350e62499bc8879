"""Dense tensor-network oracle for single partition sweeps.

This is the independent cross-check for the sparse engine.  The state over a
small region is held as a dense complex tensor with one two-dimensional axis
per cell; the scattering matrix is contracted into the tensor block by block
with numpy, never consulting the sparse column table or the dict-merge code
paths.  Blocks of the region with no occupied cell are skipped, which is
justified on the spot by checking that the dense matrix fixes the
all-quiescent column exactly.

Dense state size is the binding constraint: the tensor has 2**(8 * touched
blocks) entries, so the oracle refuses inputs whose occupied blocks exceed
`max_cells` cells (default 24, i.e. three blocks; a 16M-entry tensor).
"""
from __future__ import annotations

import numpy as np

from . import block_space as bs
from .evolution import parity_offset
from .scattering import ScatteringOperator
from .state import Superposition, make_configuration

DEFAULT_MAX_CELLS = 24
REGION_MARGIN = 2

Region = tuple[tuple[int, int, int], tuple[int, int, int]]


def _support(s: Superposition):
    cells = set()
    for config in s:
        cells.update(config)
    return cells


def _block_corner(cell, offset):
    return tuple(((c - offset) >> 1) * 2 + offset for c in cell)


def dense_oracle_step(
    s: Superposition,
    region: Region,
    parity: str,
    op: ScatteringOperator,
    max_cells: int = DEFAULT_MAX_CELLS,
) -> Superposition:
    """Apply one partition sweep with a dense per-region tensor contraction.

    region is ((x0,y0,z0), (x1,y1,z1)), half-open.  Every occupied cell of
    every branch must lie inside the region with a margin of at least two
    cells per face, which guarantees each touched block (and the sweep's
    image) stays inside the region.
    """
    lo, hi = region
    if any(h - l < 2 * REGION_MARGIN for l, h in zip(lo, hi)):
        raise ValueError("region too small for the required margin")
    support = _support(s)
    for cell in support:
        if any(
            c < l + REGION_MARGIN or c > h - 1 - REGION_MARGIN
            for c, l, h in zip(cell, lo, hi)
        ):
            raise ValueError(f"occupied cell {cell} violates the region margin")

    # Quiescence of the dense matrix justifies skipping untouched blocks.
    e0 = np.zeros(bs.N_STATES, dtype=complex)
    e0[0] = 1.0
    if not np.array_equal(op.matrix[:, 0], e0):
        raise ValueError("operator does not preserve quiescence exactly")

    offset = parity_offset(parity)
    corners = sorted({_block_corner(c, offset) for c in support})
    for corner in corners:
        if any(c < l or c + 2 > h for c, l, h in zip(corner, lo, hi)):
            raise ValueError(f"block at {corner} leaves the region")
    cells: list[tuple[int, int, int]] = []
    for corner in corners:
        for lx, ly, lz in bs.CELLS:
            cells.append((corner[0] + lx, corner[1] + ly, corner[2] + lz))
    n = len(cells)
    if n > max_cells:
        raise ValueError(f"region too large: {n} occupied-block cells > {max_cells}")
    if n == 0:
        return dict(s)
    axis_of = {c: i for i, c in enumerate(cells)}

    psi = np.zeros((2,) * n, dtype=complex)
    for config, amp in s.items():
        idx = [0] * n
        for cell in config:
            idx[axis_of[cell]] = 1
        psi[tuple(idx)] += amp

    # U reshaped to sixteen 2-axes in C order: axes 0..7 are output mask bits
    # 7..0, axes 8..15 are input mask bits 7..0.
    u_tensor = op.matrix.reshape((2,) * 16)
    for corner in corners:
        axes = [
            axis_of[(corner[0] + lx, corner[1] + ly, corner[2] + lz)]
            for (lx, ly, lz) in bs.CELLS
        ]
        psi = np.tensordot(psi, u_tensor, axes=(axes, [15 - i for i in range(8)]))
        # Uncontracted tensor axes kept their order, then the 8 output axes
        # were appended (group position g holds mask bit 7-g).  Restore the
        # original cell-axis layout.
        rest = [a for a in range(n) if a not in axes]
        cur_pos = [0] * n
        for pos, a in enumerate(rest):
            cur_pos[a] = pos
        for i, a in enumerate(axes):
            cur_pos[a] = len(rest) + (7 - i)
        psi = psi.transpose(cur_pos)

    flat = psi.reshape(-1)
    out: Superposition = {}
    for flat_idx in np.nonzero(flat)[0].tolist():
        config = make_configuration(
            cells[j] for j in range(n) if flat_idx >> (n - 1 - j) & 1
        )
        out[config] = complex(flat[flat_idx])
    return out
