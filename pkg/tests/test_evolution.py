"""Global dynamics: sparse sweeps, the dense oracle, kernels, invariants."""
import math
import random

import pytest

from qgol import _step_py, block_space as bs, evolution as ev, state as st
from qgol.oracle import dense_oracle_step
from qgol.scattering import FROZEN_HADAMARD_GEOMETRY, ScatteringOperator

SQ2 = 1 / math.sqrt(2)


def one(cells):
    return {st.make_configuration(cells): 1.0 + 0j}


def test_empty_superposition_stays_empty(op):
    assert ev.step({}, ev.ALIGNED, op) == {}
    quiescent = one([])
    assert ev.step(quiescent, ev.ALIGNED, op) == quiescent


def test_single_signal_moves_diagonally(op):
    out = ev.step(one([(0, 0, 0)]), ev.ALIGNED, op)
    assert out == {st.make_configuration([(1, 1, 1)]): 1.0 + 0j}


def test_hadamard_block_step_amplitudes(op):
    g = FROZEN_HADAMARD_GEOMETRY
    for mask, sign in ((g.input0, 1.0), (g.input1, -1.0)):
        out = ev.step(one(bs.cells_of_mask(mask)), ev.ALIGNED, op)
        amp0 = out[st.make_configuration(bs.cells_of_mask(g.output0))]
        amp1 = out[st.make_configuration(bs.cells_of_mask(g.output1))]
        assert abs(amp0 - SQ2) < 1e-15
        assert abs(amp1 - sign * SQ2) < 1e-15


def test_run_zero_steps_is_identity(op):
    s = one([(3, 4, 5)])
    clock = ev.SimClock(0)
    assert ev.run(s, 0, clock, op) == s
    assert clock.t == 0


def test_ballistic_signal_with_stepwise_oracle(op):
    # Induction base: every single step matches the dense oracle; the closed
    # form (n, n, n) follows and is asserted up to n = 50.
    s = one([(0, 0, 0)])
    clock = ev.SimClock(0)
    for n in range(1, 7):
        region = ((-8, -8, -8), (16, 16, 16))
        expected = dense_oracle_step(s, region, clock.parity, op)
        s = ev.step(s, clock.parity, op)
        clock.t += 1
        assert set(s) == set(expected)
        assert all(abs(s[k] - expected[k]) < 1e-12 for k in s)
        assert s == {st.make_configuration([(n, n, n)]): 1.0 + 0j}
    s = one([(0, 0, 0)])
    out = ev.run(s, 50, ev.SimClock(0), op)
    assert out == {st.make_configuration([(50, 50, 50)]): 1.0 + 0j}


def test_lone_barrier_survives_one_step_then_scatters(op):
    barrier = one([(0, 0, 0), (1, 0, 0)])
    s1 = ev.step(barrier, ev.ALIGNED, op)
    assert s1 == barrier
    s2 = ev.step(s1, ev.SHIFTED, op)
    (config,) = s2
    assert config == st.make_configuration([(-1, -1, -1), (2, -1, -1)])
    # the two pieces keep flying apart
    s3 = ev.step(s2, ev.ALIGNED, op)
    (config3,) = s3
    assert config3 == st.make_configuration([(-2, -2, -2), (3, -2, -2)])


def test_stable_slab_is_invariant_for_many_steps(op):
    slab = one([(1, 0, 0), (2, 0, 0), (1, 1, 0), (2, 1, 0)])
    out = ev.run(slab, 12, ev.SimClock(0), op)
    assert out == slab


def test_norm_is_preserved(op):
    g = FROZEN_HADAMARD_GEOMETRY
    s = st.make_superposition(
        [
            (st.make_configuration(bs.cells_of_mask(g.input0)), 0.8),
            (st.make_configuration([(10, 0, 0), (11, 0, 0), (10, 1, 0), (11, 1, 0)]), 0.6j),
        ]
    )
    n0 = st.norm(s)
    out = ev.run(s, 40, ev.SimClock(0), op)
    assert abs(st.norm(out) - n0) <= 1e-9


def test_lightcone_locality(op):
    # A one-cell perturbation can influence at most Chebyshev distance 2 per
    # step (its own block radius).
    base = one([(4, 4, 4)])
    pert = one([(4, 4, 4), (0, 0, 0)])
    for steps in (1, 2, 3):
        a = ev.run(dict(base), steps, ev.SimClock(0), op)
        b = ev.run(dict(pert), steps, ev.SimClock(0), op)
        diff_cells = set()
        for s in (a, b):
            for config in s:
                diff_cells.update(config)
        moved_base = set(next(iter(a)))
        extra = diff_cells - moved_base
        assert all(
            max(abs(c - 0) for c in cell) <= 2 * steps for cell in extra
        )


def test_translation_covariance_for_even_offsets(op):
    random.seed(3)
    cells = [(random.randrange(4), random.randrange(4), random.randrange(4)) for _ in range(5)]
    s = one(cells)
    v = (4, -2, 6)
    left = ev.run(st.make_superposition([(st.translate(next(iter(s)), v), 1.0)]), 5, ev.SimClock(0), op)
    right = {
        st.make_configuration(st.translate(k, v)): a
        for k, a in ev.run(s, 5, ev.SimClock(0), op).items()
    }
    assert set(left) == set(right)
    assert all(abs(left[k] - right[k]) < 1e-12 for k in left)


def test_uncertified_operator_rejected(op):
    fake = ScatteringOperator(
        matrix=op.matrix,
        geometry=op.geometry,
        crossing_phase=op.crossing_phase,
        report=None,
        checksum=op.checksum,
        out_counts=op.out_counts,
        out_masks=op.out_masks,
        out_amps=op.out_amps,
    )
    with pytest.raises(ValueError):
        ev.step(one([(0, 0, 0)]), ev.ALIGNED, fake)


def test_branch_budget_warning(op, caplog):
    g = FROZEN_HADAMARD_GEOMETRY
    cells = list(bs.cells_of_mask(g.input0))
    with caplog.at_level("WARNING", logger="qgol"):
        ev.step(one(cells), ev.ALIGNED, op, branch_budget=1)
    assert any("branch count" in r.message for r in caplog.records)


def test_kernels_agree(op):
    pytest.importorskip("qgol._step_core")
    from qgol import _step_core

    random.seed(11)
    for _ in range(25):
        branches = {}
        for _ in range(random.randint(1, 4)):
            cells = {
                (random.randrange(-6, 6), random.randrange(-6, 6), random.randrange(-6, 6))
                for _ in range(random.randint(1, 8))
            }
            key = _step_py.pack_key(cells)
            branches[key] = complex(random.random() - 0.5, random.random() - 0.5)
        for offset in (0, 1):
            a, ra = _step_py.step_packed(
                dict(branches), offset, op.out_counts, op.out_masks, op.out_amps, 1e-12
            )
            b, rb = _step_core.step_packed(
                dict(branches), offset, op.out_counts, op.out_masks, op.out_amps, 1e-12
            )
            assert set(a) == set(b)
            assert all(a[k] == b[k] for k in a)
            assert ra == rb


def test_threaded_step_matches_serial(op, monkeypatch):
    random.seed(5)
    branches = []
    for i in range(40):
        cells = {(i * 4 + d, d, -d) for d in range(3)}
        branches.append((st.make_configuration(cells), complex(1, i)))
    s = st.normalize(st.make_superposition(branches))
    serial = ev.step(s, ev.ALIGNED, op)
    monkeypatch.setenv("QGOL_THREADS", "4")
    threaded = ev.step(s, ev.ALIGNED, op)
    assert set(serial) == set(threaded)
    assert all(abs(serial[k] - threaded[k]) < 1e-14 for k in serial)


# --- dense oracle -------------------------------------------------------------

def _random_compact_scene(rng, max_cells=6):
    cells = [(rng.randrange(4), rng.randrange(4), rng.randrange(4))]
    while len(cells) < max_cells and rng.random() < 0.7:
        base = rng.choice(cells)
        cells.append(
            tuple(
                min(3, max(0, b + rng.choice((-1, 0, 1)))) for b in base
            )
        )
    branches = []
    for _ in range(rng.randint(1, 3)):
        k = rng.randint(1, len(cells))
        branches.append(
            (
                st.make_configuration(rng.sample(cells, k)),
                complex(rng.random() - 0.5, rng.random() - 0.5),
            )
        )
    s = st.make_superposition(branches)
    return st.normalize(s) if s else None


def _touched_blocks(s, offset):
    corners = set()
    for config in s:
        for cell in config:
            corners.add(tuple(((c - offset) >> 1) * 2 + offset for c in cell))
    return corners


def test_oracle_equivalence_on_random_scenes(op):
    rng = random.Random(20240901)
    region = ((-4, -4, -4), (8, 8, 8))
    checked = 0
    while checked < 30:
        s = _random_compact_scene(rng)
        if s is None:
            continue
        if any(len(_touched_blocks(s, o)) > 3 for o in (0, 1)):
            continue
        for parity in (ev.ALIGNED, ev.SHIFTED):
            expected = dense_oracle_step(s, region, parity, op)
            got = ev.step(s, parity, op, prune_eps=0.0)
            keys = set(expected) | set(got)
            assert all(
                abs(expected.get(k, 0j) - got.get(k, 0j)) <= 1e-12 for k in keys
            )
        checked += 1


def test_oracle_margin_and_size_guards(op):
    s = one([(0, 0, 0)])
    with pytest.raises(ValueError, match="margin"):
        dense_oracle_step(s, ((0, 0, 0), (4, 4, 4)), ev.ALIGNED, op)
    spread = one([(0, 0, 0), (4, 4, 4), (-4, -4, 4), (4, -4, -4)])
    with pytest.raises(ValueError, match="region too large"):
        dense_oracle_step(spread, ((-8, -8, -8), (16, 16, 16)), ev.ALIGNED, op)


def test_oracle_hadamard_block(op):
    g = FROZEN_HADAMARD_GEOMETRY
    s = one(bs.cells_of_mask(g.input0))
    region = ((-4, -4, -4), (8, 8, 8))
    expected = dense_oracle_step(s, region, ev.ALIGNED, op)
    got = ev.step(s, ev.ALIGNED, op)
    assert set(expected) == set(got)
    assert all(abs(expected[k] - got[k]) < 1e-12 for k in got)
