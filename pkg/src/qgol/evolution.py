"""Global dynamics: blockwise scattering on alternating partitions.

The step going from time t to t+1 applies the scattering unitary
independently to every block of the aligned partition (corners in 2Z^3) when
t is even, and of the shifted partition (corners in 2Z^3 + (1,1,1)) when t
is odd.  Blocks containing no occupied cell are untouched, which is exactly
quiescence preservation of the certified operator.

The kernel is selected at import: the compiled extension when available,
the pure-Python twin otherwise (or when QGOL_FORCE_PURE is set).  Worker
parallelism over branches is capped by QGOL_THREADS; the final merge is
associative so results do not depend on the split.
"""
from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from . import _step_py
from .scattering import ScatteringOperator
from .state import Superposition, make_configuration

log = logging.getLogger("qgol")

ALIGNED = "aligned"
SHIFTED = "shifted"

DEFAULT_PRUNE_EPS = 1e-12
DEFAULT_BRANCH_BUDGET = 1 << 20

if os.environ.get("QGOL_FORCE_PURE"):
    _kernel = _step_py
    KERNEL_NAME = "pure"
else:
    try:
        from . import _step_core as _kernel  # type: ignore

        KERNEL_NAME = "compiled"
    except ImportError:
        _kernel = _step_py
        KERNEL_NAME = "pure"


def parity_for_step(t: int) -> str:
    return ALIGNED if t % 2 == 0 else SHIFTED


def parity_offset(parity: str) -> int:
    if parity == ALIGNED:
        return 0
    if parity == SHIFTED:
        return 1
    raise ValueError(f"unknown parity {parity!r}")


@dataclass
class SimClock:
    t: int = 0

    @property
    def parity(self) -> str:
        return parity_for_step(self.t)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("QGOL_THREADS", "1")))
    except ValueError:
        return 1


def to_packed(s: Superposition) -> dict[bytes, complex]:
    return {_step_py.pack_key(config): amp for config, amp in s.items()}


def from_packed(packed: dict[bytes, complex]) -> Superposition:
    return {
        make_configuration(_step_py.unpack_key(key)): amp
        for key, amp in packed.items()
    }


def _check_certified(op: ScatteringOperator) -> None:
    if not isinstance(op, ScatteringOperator) or not op.certified:
        raise ValueError("scattering operator is not certified; build it via "
                         "build_scattering_unitary")


def step_packed(
    packed: dict[bytes, complex],
    parity: str,
    op: ScatteringOperator,
    prune_eps: float = DEFAULT_PRUNE_EPS,
    branch_budget: int = DEFAULT_BRANCH_BUDGET,
) -> tuple[dict[bytes, complex], float]:
    offset = parity_offset(parity)
    nthreads = _threads()
    if nthreads > 1 and len(packed) >= 4 * nthreads:
        keys = sorted(packed)
        chunk = (len(keys) + nthreads - 1) // nthreads
        parts = [
            {k: packed[k] for k in keys[i : i + chunk]}
            for i in range(0, len(keys), chunk)
        ]
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            results = list(
                pool.map(
                    lambda p: _kernel.step_packed(
                        p, offset, op.out_counts, op.out_masks, op.out_amps, 0.0
                    ),
                    parts,
                )
            )
        merged: dict[bytes, complex] = {}
        for part, _ in results:
            for k, a in part.items():
                acc = merged.get(k, 0j) + a
                if acc == 0:
                    merged.pop(k, None)
                else:
                    merged[k] = acc
        removed = 0.0
        if prune_eps > 0:
            kept = {}
            for k, a in merged.items():
                if abs(a) <= prune_eps:
                    removed += abs(a) ** 2
                else:
                    kept[k] = a
            merged = kept
        result = merged
    else:
        result, removed = _kernel.step_packed(
            packed, offset, op.out_counts, op.out_masks, op.out_amps, prune_eps
        )
    if len(result) > branch_budget:
        log.warning(
            "branch count %d exceeds budget %d; no truncation beyond the "
            "amplitude prune threshold is applied",
            len(result),
            branch_budget,
        )
    return result, removed


def step(
    s: Superposition,
    parity: str,
    op: ScatteringOperator,
    prune_eps: float = DEFAULT_PRUNE_EPS,
    branch_budget: int = DEFAULT_BRANCH_BUDGET,
) -> Superposition:
    """One sweep of the given partition over a superposition."""
    _check_certified(op)
    packed, _ = step_packed(to_packed(s), parity, op, prune_eps, branch_budget)
    return from_packed(packed)


def run(
    s: Superposition,
    n: int,
    clock: SimClock,
    op: ScatteringOperator,
    prune_eps: float = DEFAULT_PRUNE_EPS,
    branch_budget: int = DEFAULT_BRANCH_BUDGET,
) -> Superposition:
    """n successive steps with alternating parity starting at clock.t."""
    if n < 0:
        raise ValueError("step count must be non-negative")
    _check_certified(op)
    packed = to_packed(s)
    for _ in range(n):
        packed, _ = step_packed(
            packed, parity_for_step(clock.t), op, prune_eps, branch_budget
        )
        clock.t += 1
    return from_packed(packed)
