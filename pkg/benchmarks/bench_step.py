"""Benchmark the compiled step kernel against the pure-Python twin.

Builds a workload dominated by the per-branch block expansion: many free
signals plus several Hadamard scatter blocks, so the branch count grows into
the hundreds and every step decomposes hundreds of cells into blocks.

Usage: python3 benchmarks/bench_step.py [steps] [signals]
"""
import sys
import time

from qgol import _step_py, block_space as bs
from qgol.evolution import to_packed
from qgol.scattering import FROZEN_HADAMARD_GEOMETRY, build_scattering_unitary
from qgol.state import make_configuration, make_superposition, normalize

try:
    from qgol import _step_core
except ImportError:
    _step_core = None


def build_workload(n_signals: int):
    cells = []
    for i in range(n_signals):
        cells.append((20 + 6 * i, -4 * i, 8 * (i % 7)))
    # Hadamard scatter blocks fork branches on the first sweep.
    for k in range(6):
        base = (-40 - 8 * k, 40 + 8 * k, 0)
        for c in bs.cells_of_mask(FROZEN_HADAMARD_GEOMETRY.input0):
            cells.append((base[0] + c[0], base[1] + c[1], base[2] + c[2]))
    s = normalize(make_superposition([(make_configuration(cells), 1.0)]))
    return to_packed(s)


def run(kernel, packed, op, steps: int):
    t0 = time.perf_counter()
    state = packed
    for t in range(steps):
        state, _ = kernel.step_packed(
            state, t & 1, op.out_counts, op.out_masks, op.out_amps, 1e-12
        )
    dt = time.perf_counter() - t0
    return dt, len(state)


def main():
    steps = int(sys.argv[1]) if len(sys.argv) > 1 else 12
    signals = int(sys.argv[2]) if len(sys.argv) > 2 else 120
    op = build_scattering_unitary()
    packed = build_workload(signals)
    print(f"workload: {signals} signals + 6 scatter blocks, {steps} steps")
    results = {}
    for name, kernel in (("pure", _step_py), ("compiled", _step_core)):
        if kernel is None:
            print(f"{name:>9}: extension not built, skipped")
            continue
        dt, branches = run(kernel, packed, op, steps)
        results[name] = dt
        print(f"{name:>9}: {dt:8.3f} s  ({steps / dt:6.1f} steps/s, {branches} branches at end)")
    if len(results) == 2:
        print(f"  speedup: {results['pure'] / results['compiled']:.2f}x")


if __name__ == "__main__":
    main()
