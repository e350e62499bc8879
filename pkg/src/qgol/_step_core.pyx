# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled step kernel; contract identical to _step_py.step_packed.

Same packed-key encoding and the same deterministic iteration order (sorted
branch keys, blocks in corner order), so the two kernels produce the same
amplitudes up to nothing at all: the float operations are identical.
"""
from libc.stdint cimport int64_t, uint8_t

import numpy as np
cimport numpy as cnp

cnp.import_array()

DEF BIAS = 1048576  # 1 << 20
cdef int64_t MASK21 = (1 << 21) - 1

# local cell offsets per mask, flattened: offsets[m*24 + 3*j + axis]
cdef int[:] _LOCAL = np.array(
    [
        v
        for m in range(256)
        for i in range(8)
        if m >> i & 1
        for v in ((i & 1), (i >> 1) & 1, (i >> 2) & 1)
    ]
    + [0] * 3,
    dtype=np.intc,
)
cdef int[:] _LOCAL_START = np.array(
    np.concatenate(
        (
            [0],
            np.cumsum([3 * bin(m).count("1") for m in range(256)]),
        )
    ),
    dtype=np.intc,
)


def step_packed(dict branches, int offset, counts, masks, amps, double prune_eps):
    cdef cnp.ndarray[cnp.int8_t, ndim=1] cnt = np.ascontiguousarray(counts, dtype=np.int8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] msk = np.ascontiguousarray(masks, dtype=np.uint8)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] amp = np.ascontiguousarray(amps, dtype=np.complex128)

    cdef dict out = {}
    cdef dict blocks
    cdef list partials, nxt, cells, keys
    cdef bytes key, okey
    cdef double complex amp0, a, oamp, acc
    cdef int64_t v, x, y, z, cx, cy, cz, pv
    cdef object corner
    cdef int i, j, k, bit, omask, s0, ncell, ci
    cdef double removed = 0.0

    keys = sorted(branches)
    for key in keys:
        amp0 = branches[key]
        blocks = {}
        for i in range(0, len(key), 8):
            v = int.from_bytes(key[i : i + 8], "big")
            x = (v >> 42) - BIAS
            y = ((v >> 21) & MASK21) - BIAS
            z = (v & MASK21) - BIAS
            cx = ((x - offset) >> 1) * 2 + offset
            cy = ((y - offset) >> 1) * 2 + offset
            cz = ((z - offset) >> 1) * 2 + offset
            corner = (cx, cy, cz)
            bit = 1 << ((x - cx) + 2 * (y - cy) + 4 * (z - cz))
            if corner in blocks:
                blocks[corner] = blocks[corner] | bit
            else:
                blocks[corner] = bit
        partials = [[amp0, []]]
        for corner, mask_obj in sorted(blocks.items()):
            bit = mask_obj  # reuse as the input mask
            k = cnt[bit]
            cx, cy, cz = corner
            if k == 1:
                omask = msk[bit, 0]
                oamp = amp[bit, 0]
                s0 = _LOCAL_START[omask]
                ncell = (_LOCAL_START[omask + 1] - s0) // 3
                cells = []
                for ci in range(ncell):
                    pv = (
                        ((cx + _LOCAL[s0 + 3 * ci] + BIAS) << 42)
                        | ((cy + _LOCAL[s0 + 3 * ci + 1] + BIAS) << 21)
                        | (cz + _LOCAL[s0 + 3 * ci + 2] + BIAS)
                    )
                    cells.append(pv)
                for p in partials:
                    (<list> p)[1] = (<list> (<list> p)[1]) + cells
                if oamp != 1.0:
                    for p in partials:
                        (<list> p)[0] = <double complex> (<list> p)[0] * oamp
            else:
                nxt = []
                for p in partials:
                    a = (<list> p)[0]
                    for j in range(k):
                        omask = msk[bit, j]
                        oamp = amp[bit, j]
                        s0 = _LOCAL_START[omask]
                        ncell = (_LOCAL_START[omask + 1] - s0) // 3
                        cells = list((<list> p)[1])
                        for ci in range(ncell):
                            pv = (
                                ((cx + _LOCAL[s0 + 3 * ci] + BIAS) << 42)
                                | ((cy + _LOCAL[s0 + 3 * ci + 1] + BIAS) << 21)
                                | (cz + _LOCAL[s0 + 3 * ci + 2] + BIAS)
                            )
                            cells.append(pv)
                        nxt.append([a * oamp, cells])
                partials = nxt
        for p in partials:
            a = (<list> p)[0]
            cells = (<list> p)[1]
            cells.sort()
            okey = b"".join([(<object> pv_).to_bytes(8, "big") for pv_ in cells])
            if okey in out:
                acc = <double complex> out[okey] + a
                if acc == 0:
                    del out[okey]
                else:
                    out[okey] = acc
            else:
                if a != 0:
                    out[okey] = a
    cdef dict kept
    if prune_eps > 0:
        kept = {}
        for okey, amp_obj in out.items():
            a = amp_obj
            if abs(a) <= prune_eps:
                removed += (a.real * a.real + a.imag * a.imag)
            else:
                kept[okey] = a
        out = kept
    return out, removed
