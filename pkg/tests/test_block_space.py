"""Block geometry: rotation group, inversion, operator checks, export."""
import numpy as np
import pytest

from qgol import block_space as bs


def test_cell_indexing_is_a_bijection():
    seen = {bs.cell_index(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)}
    assert seen == set(range(8))
    for i in range(8):
        assert bs.cell_index(*bs.cell_coords(i)) == i


def test_rotations_identity_and_cardinality():
    rots = bs.rotations()
    assert tuple(range(8)) in rots
    assert len(rots) == 24
    assert len(set(rots)) == 24


def test_rotations_closed_under_composition_and_inverse():
    rots = set(bs.rotations())
    for a in rots:
        assert bs.inverse(a) in rots
        for b in rots:
            assert bs.compose(a, b) in rots


def test_apply_rotation_identity_and_empty():
    ident = tuple(range(8))
    for s in range(256):
        assert bs.apply_rotation(ident, s) == s
    for r in bs.rotations():
        assert bs.apply_rotation(r, 0) == 0


def test_quarter_turn_about_z_matches_the_matrix():
    # Oracle: act on centred coordinates with the explicit matrix.
    mat = ((0, -1, 0), (1, 0, 0), (0, 0, 1))
    perm = None
    for r, m in zip(bs.ROTATIONS, bs.ROTATION_MATRICES):
        if m == mat:
            perm = r
    assert perm is not None
    origin = 1 << bs.cell_index(0, 0, 0)
    image = bs.apply_rotation(perm, origin)
    # (0,0,0) has centred coords (-1,-1,-1); the matrix sends them to (1,-1,-1),
    # i.e. cell (1,0,0).  Must agree with the permutation table.
    assert image == 1 << bs.cell_index(1, 0, 0)


def test_rotation_preserves_popcount_and_face_adjacency():
    cells = [bs.cell_coords(i) for i in range(8)]
    adjacent = {
        (i, j)
        for i in range(8)
        for j in range(8)
        if sum(a != b for a, b in zip(cells[i], cells[j])) == 1
    }
    for r in bs.rotations():
        for s in range(256):
            assert bs.popcount(bs.apply_rotation(r, s)) == bs.popcount(s)
        for i, j in adjacent:
            assert (r[i], r[j]) in adjacent


def test_invert_examples_and_involution():
    assert bs.invert(1 << bs.cell_index(0, 0, 0)) == 1 << bs.cell_index(1, 1, 1)
    assert bs.invert(0) == 0
    for s in range(256):
        assert bs.invert(bs.invert(s)) == s


def test_invert_commutes_with_every_rotation():
    for r in bs.rotations():
        for s in range(256):
            assert bs.apply_rotation(r, bs.invert(s)) == bs.invert(
                bs.apply_rotation(r, s)
            )


def test_operator_is_unitary():
    ident = np.eye(256, dtype=complex)
    assert bs.operator_is_unitary(ident, 1e-12)
    broken = ident.copy()
    broken[7, :] = 0.0
    assert not bs.operator_is_unitary(broken, 1e-12)
    with pytest.raises(ValueError):
        bs.operator_is_unitary(ident, 0.0)


def test_built_operator_is_unitary(op):
    assert bs.operator_is_unitary(op.matrix, 1e-12)


def test_operator_commutes_with_rotations(op):
    ident = np.eye(256, dtype=complex)
    for r in bs.rotations():
        assert bs.operator_commutes_with(ident, r, 1e-12)
        assert bs.operator_commutes_with(op.matrix, r, 1e-12)


def test_asymmetric_transposition_breaks_covariance():
    # Swapping one non-central pair of basis states cannot commute with the
    # whole rotation group.
    t = np.eye(256, dtype=complex)
    a, b = 1, 3  # a lone signal and a two-cell state
    t[[a, b]] = t[[b, a]]
    assert any(
        not bs.operator_commutes_with(t, r, 1e-12) for r in bs.rotations()
    )


def test_export_round_trip(op):
    text = bs.export_operator(op.matrix)
    rebuilt = np.zeros_like(op.matrix)
    rows = []
    for line in text.strip().splitlines():
        r, c, re, im = line.split()
        rows.append((int(r), int(c)))
        rebuilt[int(r), int(c)] = float(re) + 1j * float(im)
    assert rows == sorted(rows)
    assert np.array_equal(rebuilt, op.matrix)
    assert bs.operator_checksum(op.matrix) == op.checksum
