"""Geometry of the 2x2x2 scattering block.

Cells of a block are indexed 0..7 with linear index x + 2*y + 4*z, each
coordinate in {0, 1}.  Axis convention throughout the package: x = width,
y = height, z = depth.  A block basis state is an 8-bit occupancy mask
(bit i set means cell i occupied), and the 256 basis states of the block
space are ordered by mask value.  That ordering is normative: it fixes the
operator serialization format and the checksum of the scattering operator.

Rotations are the 24 proper rotations of the cube, realized as permutations
of the 8 cells.  They are generated once, at import, from integer matrices;
no floating-point geometry happens at runtime.
"""
from __future__ import annotations

import hashlib

import numpy as np

N_CELLS = 8
N_STATES = 256


def cell_index(x: int, y: int, z: int) -> int:
    return x + 2 * y + 4 * z


def cell_coords(i: int) -> tuple[int, int, int]:
    return (i & 1, (i >> 1) & 1, (i >> 2) & 1)


CELLS = tuple(cell_coords(i) for i in range(N_CELLS))


def mask_of_cells(cells) -> int:
    """Occupancy mask of an iterable of local (x, y, z) cells."""
    m = 0
    for c in cells:
        m |= 1 << cell_index(*c)
    return m


def cells_of_mask(mask: int) -> tuple[tuple[int, int, int], ...]:
    return tuple(CELLS[i] for i in range(N_CELLS) if mask >> i & 1)


def popcount(mask: int) -> int:
    return bin(mask).count("1")


# --- proper rotation group of the cube ------------------------------------

_GENERATORS = (
    ((1, 0, 0), (0, 0, -1), (0, 1, 0)),   # quarter turn about +x
    ((0, 0, 1), (0, 1, 0), (-1, 0, 0)),   # quarter turn about +y
    ((0, -1, 0), (1, 0, 0), (0, 0, 1)),   # quarter turn about +z
)

_IDENTITY_MATRIX = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def _mat_mul(a, b):
    return tuple(
        tuple(sum(a[r][k] * b[k][c] for k in range(3)) for c in range(3))
        for r in range(3)
    )


def rotate_vector(matrix, v):
    """Apply an integer rotation matrix to an integer 3-vector."""
    return tuple(sum(matrix[r][k] * v[k] for k in range(3)) for r in range(3))


def _perm_of_matrix(m) -> tuple[int, ...]:
    # Cells live at centred coordinates (+-1/2)^3; doubled to stay integral.
    perm = []
    for i in range(N_CELLS):
        c = tuple(2 * v - 1 for v in cell_coords(i))
        c2 = rotate_vector(m, c)
        perm.append(cell_index(*((v + 1) // 2 for v in c2)))
    return tuple(perm)


def _generate_group():
    seen = {_IDENTITY_MATRIX}
    frontier = [_IDENTITY_MATRIX]
    while frontier:
        nxt = []
        for m in frontier:
            for g in _GENERATORS:
                p = _mat_mul(g, m)
                if p not in seen:
                    seen.add(p)
                    nxt.append(p)
        frontier = nxt
    mats = sorted(seen, key=_perm_of_matrix)
    return tuple(mats), tuple(_perm_of_matrix(m) for m in mats)


ROTATION_MATRICES, ROTATIONS = _generate_group()
IDENTITY_ROTATION = ROTATIONS.index(tuple(range(N_CELLS)))


def rotations() -> tuple[tuple[int, ...], ...]:
    """All 24 proper cube rotations as cell permutations, in a fixed order."""
    return ROTATIONS


def compose(r1, r2) -> tuple[int, ...]:
    """Permutation applying r2 first, then r1."""
    return tuple(r1[r2[i]] for i in range(N_CELLS))


def inverse(r) -> tuple[int, ...]:
    inv = [0] * N_CELLS
    for i, j in enumerate(r):
        inv[j] = i
    return tuple(inv)


def apply_rotation(r, mask: int) -> int:
    """Rotate a block state: cell i of the input lands on cell r[i]."""
    out = 0
    for i in range(N_CELLS):
        if mask >> i & 1:
            out |= 1 << r[i]
    return out


_INVERT_TABLE = tuple(
    mask_of_cells((1 - x, 1 - y, 1 - z) for (x, y, z) in cells_of_mask(m))
    for m in range(N_STATES)
)


def invert(mask: int) -> int:
    """Point inversion of a block state: (x,y,z) -> (1-x,1-y,1-z)."""
    return _INVERT_TABLE[mask]


# --- operator checks on the 256-dimensional block space --------------------

def permutation_matrix(r) -> np.ndarray:
    """256x256 permutation matrix of apply_rotation(r, .)."""
    p = np.zeros((N_STATES, N_STATES))
    for s in range(N_STATES):
        p[apply_rotation(r, s), s] = 1.0
    return p


_PERM_STATE = tuple(
    tuple(apply_rotation(r, s) for s in range(N_STATES)) for r in ROTATIONS
)


def rotate_state_by_index(rot_index: int, mask: int) -> int:
    return _PERM_STATE[rot_index][mask]


def operator_is_unitary(op: np.ndarray, tol: float) -> bool:
    """True iff the max-norm of op^dagger op - I is within tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    res = op.conj().T @ op - np.eye(op.shape[0])
    return float(np.abs(res).max()) <= tol


def operator_commutes_with(op: np.ndarray, r, tol: float) -> bool:
    if tol <= 0:
        raise ValueError("tol must be positive")
    p = permutation_matrix(r)
    res = op @ p - p @ op
    return float(np.abs(res).max()) <= tol


def unitarity_residual(op: np.ndarray) -> float:
    return float(np.abs(op.conj().T @ op - np.eye(op.shape[0])).max())


def covariance_residual(op: np.ndarray, r) -> float:
    p = permutation_matrix(r)
    return float(np.abs(op @ p - p @ op).max())


# --- operator serialization -------------------------------------------------

def export_operator(op: np.ndarray) -> str:
    """Nonzero entries as `row col re im` lines, sorted by (row, col).

    Rows and columns are block-state masks in the basis ordering above; the
    text is the exchange format for tests and the rule inspector, and its
    sha256 is the operator checksum stored in run manifests.
    """
    lines = []
    rows, cols = np.nonzero(op)
    for r, c in sorted(zip(rows.tolist(), cols.tolist())):
        v = complex(op[r, c])
        lines.append(f"{r} {c} {v.real!r} {v.imag!r}")
    return "\n".join(lines) + "\n"


def operator_checksum(op: np.ndarray) -> str:
    return hashlib.sha256(export_operator(op).encode()).hexdigest()
