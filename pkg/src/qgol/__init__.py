"""Sparse simulator for a minimal 3D partitioned quantum cellular automaton.

Binary cells on Z^3 evolve by a single 256x256 scattering unitary applied to
2x2x2 blocks, on partitions that alternate alignment every step.  Lone
occupied cells propagate diagonally, face-adjacent pairs are static,
diagonal crossings add a phase, and a three-cell pattern scatters as a
Hadamard, which together support a universal gate set built from frozen
gadget geometries.
"""
from .block_space import (
    apply_rotation,
    invert,
    operator_commutes_with,
    operator_is_unitary,
    rotations,
)
from .evolution import ALIGNED, SHIFTED, SimClock, run, step
from .oracle import dense_oracle_step
from .scattering import (
    FROZEN_HADAMARD_GEOMETRY,
    HadamardGeometry,
    RuleClass,
    ScatteringOperator,
    build_scattering_unitary,
    classify,
    synthesize_hadamard_geometry,
    verify_scattering_unitary,
)
from .state import (
    inner_product,
    make_configuration,
    make_superposition,
    norm,
    normalize,
    parse_snapshot,
    prune,
    translate,
    write_snapshot,
)

__version__ = "0.1.0"

__all__ = [
    "ALIGNED",
    "SHIFTED",
    "FROZEN_HADAMARD_GEOMETRY",
    "HadamardGeometry",
    "RuleClass",
    "ScatteringOperator",
    "SimClock",
    "apply_rotation",
    "build_scattering_unitary",
    "classify",
    "dense_oracle_step",
    "inner_product",
    "invert",
    "make_configuration",
    "make_superposition",
    "norm",
    "normalize",
    "operator_commutes_with",
    "operator_is_unitary",
    "parse_snapshot",
    "prune",
    "rotations",
    "run",
    "step",
    "synthesize_hadamard_geometry",
    "translate",
    "verify_scattering_unitary",
    "write_snapshot",
]
