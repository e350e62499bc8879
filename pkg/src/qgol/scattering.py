"""Rule classes and construction of the 256x256 block scattering unitary.

Every block basis state falls into exactly one rule class.  The classes with
an explicit published behaviour are: empty block, lone signal, static barrier,
diagonally crossing pair (which picks up the exp(i*pi/4) phase), antipodal
pair, wall, wall plus face signal (the bounce), and the two Hadamard input
patterns.  Every remaining state evolves by point inversion, i.e. as a set of
non-interacting signals passing through each other; that completion keeps the
operator a signed permutation outside the Hadamard orbit and makes walls
demolishable.

The Hadamard output geometry is under-determined by prose alone, so it is
synthesized by exhaustive search under the constraints stated in
`synthesize_hadamard_geometry` and then frozen as FROZEN_HADAMARD_GEOMETRY.
"""
from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import block_space as bs

log = logging.getLogger("qgol")

CROSSING_PHASE = cmath.exp(1j * math.pi / 4)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)
HADAMARD_AMPLITUDES = np.array(
    [[_INV_SQRT2, _INV_SQRT2], [_INV_SQRT2, -_INV_SQRT2]], dtype=complex
)
OPERATOR_TOL = 1e-12


class RuleClass(Enum):
    EMPTY = "empty"
    LONE_SIGNAL = "lone_signal"
    BARRIER = "barrier"
    FACE_DIAGONAL_PAIR = "face_diagonal_pair"
    ANTIPODAL_PAIR = "antipodal_pair"
    WALL = "wall"
    WALL_WITH_FACE_SIGNAL = "wall_with_face_signal"
    HADAMARD_ZERO_INPUT = "hadamard_zero_input"
    HADAMARD_ONE_INPUT = "hadamard_one_input"
    DEFAULT = "default"


_FACE_MASKS = tuple(
    bs.mask_of_cells(c for c in bs.CELLS if c[axis] == value)
    for axis in range(3)
    for value in (0, 1)
)


def _face_of_mask(mask: int):
    """(axis, value) of the full face contained in mask, if any."""
    for axis in range(3):
        for value in (0, 1):
            fm = _FACE_MASKS[2 * axis + value]
            if mask & fm == fm:
                return axis, value
    return None


@dataclass(frozen=True)
class HadamardGeometry:
    """Canonical Hadamard patterns as block-state masks plus the 2x2 table.

    input0: barrier plus a third cell on the same face (an "L").
    input1: the same barrier plus a lone cell on the opposite face, adjacent
    to neither barrier cell (the dislocated "L").  Outputs keep the barrier
    and move the signal; the amplitude table maps input column b to output
    row a with weight amplitudes[a][b].
    """

    input0: int
    input1: int
    output0: int
    output1: int
    amplitudes: tuple = (
        (_INV_SQRT2, _INV_SQRT2),
        (_INV_SQRT2, -_INV_SQRT2),
    )

    @property
    def barrier(self) -> int:
        return self.input0 & self.input1

    def masks(self):
        return (self.input0, self.input1, self.output0, self.output1)


_CANONICAL_BARRIER = bs.mask_of_cells([(0, 0, 0), (1, 0, 0)])
_CANONICAL_INPUT0 = _CANONICAL_BARRIER | 1 << bs.cell_index(0, 1, 0)
_CANONICAL_INPUT1 = _CANONICAL_BARRIER | 1 << bs.cell_index(0, 1, 1)

# Frozen result of synthesize_hadamard_geometry(); asserted equal by tests.
FROZEN_HADAMARD_GEOMETRY = HadamardGeometry(
    input0=_CANONICAL_INPUT0,
    input1=_CANONICAL_INPUT1,
    output0=_CANONICAL_BARRIER | 1 << bs.cell_index(1, 0, 1),
    output1=_CANONICAL_BARRIER | 1 << bs.cell_index(1, 1, 1),
)


def _orbit_with_witnesses(mask: int) -> dict[int, int]:
    """Map each state of the rotation orbit of mask to a witness rotation index."""
    orbit = {}
    for ri, r in enumerate(bs.ROTATIONS):
        s = bs.apply_rotation(r, mask)
        orbit.setdefault(s, ri)
    return orbit


class Classifier:
    """Total, rotation-invariant classification of the 256 block states."""

    def __init__(self, geometry: HadamardGeometry = FROZEN_HADAMARD_GEOMETRY):
        self.geometry = geometry
        self._orbit0 = _orbit_with_witnesses(geometry.input0)
        self._orbit1 = _orbit_with_witnesses(geometry.input1)
        if set(self._orbit0) & set(self._orbit1):
            raise ValueError("Hadamard input orbits overlap; geometry invalid")

    def classify(self, mask: int) -> tuple[RuleClass, int | None]:
        """Rule class of a state, plus the orientation witness for orbit classes.

        The witness is the index of a rotation carrying the canonical pattern
        onto the state; it is None for classes defined geometrically.
        """
        n = bs.popcount(mask)
        if n == 0:
            return RuleClass.EMPTY, None
        if n == 1:
            return RuleClass.LONE_SIGNAL, None
        if n == 2:
            a, b = bs.cells_of_mask(mask)
            ndiff = sum(1 for k in range(3) if a[k] != b[k])
            if ndiff == 1:
                return RuleClass.BARRIER, None
            if ndiff == 2:
                return RuleClass.FACE_DIAGONAL_PAIR, None
            return RuleClass.ANTIPODAL_PAIR, None
        if n == 3:
            if mask in self._orbit0:
                return RuleClass.HADAMARD_ZERO_INPUT, self._orbit0[mask]
            if mask in self._orbit1:
                return RuleClass.HADAMARD_ONE_INPUT, self._orbit1[mask]
            return RuleClass.DEFAULT, None
        if n == 4:
            if _face_of_mask(mask) is not None and mask in _FACE_MASKS:
                return RuleClass.WALL, None
            return RuleClass.DEFAULT, None
        if n == 5:
            if _face_of_mask(mask) is not None:
                return RuleClass.WALL_WITH_FACE_SIGNAL, None
            return RuleClass.DEFAULT, None
        return RuleClass.DEFAULT, None

    def class_populations(self) -> dict[RuleClass, int]:
        pops: dict[RuleClass, int] = {c: 0 for c in RuleClass}
        for m in range(bs.N_STATES):
            pops[self.classify(m)[0]] += 1
        return pops


_DEFAULT_CLASSIFIER: Classifier | None = None


def default_classifier() -> Classifier:
    global _DEFAULT_CLASSIFIER
    if _DEFAULT_CLASSIFIER is None:
        _DEFAULT_CLASSIFIER = Classifier()
    return _DEFAULT_CLASSIFIER


def classify(mask: int) -> tuple[RuleClass, int | None]:
    return default_classifier().classify(mask)


def _bounce_target(mask: int) -> int:
    """Wall fixed; the face signal moves diagonally within its own layer."""
    axis, value = _face_of_mask(mask)
    wall = _FACE_MASKS[2 * axis + value]
    signal = bs.cells_of_mask(mask & ~wall)[0]
    moved = tuple(
        signal[k] if k == axis else 1 - signal[k] for k in range(3)
    )
    return wall | 1 << bs.cell_index(*moved)


def _build_matrix(
    classifier: Classifier, crossing_phase: complex, amplitudes
) -> np.ndarray:
    g = classifier.geometry
    amp = np.asarray(amplitudes, dtype=complex)
    u = np.zeros((bs.N_STATES, bs.N_STATES), dtype=complex)
    for m in range(bs.N_STATES):
        cls, witness = classifier.classify(m)
        if cls in (
            RuleClass.EMPTY,
            RuleClass.BARRIER,
            RuleClass.ANTIPODAL_PAIR,
            RuleClass.WALL,
        ):
            u[m, m] = 1.0
        elif cls in (RuleClass.LONE_SIGNAL, RuleClass.DEFAULT):
            u[bs.invert(m), m] = 1.0
        elif cls is RuleClass.FACE_DIAGONAL_PAIR:
            u[bs.invert(m), m] = crossing_phase
        elif cls is RuleClass.WALL_WITH_FACE_SIGNAL:
            u[_bounce_target(m), m] = 1.0
        else:
            col = 0 if cls is RuleClass.HADAMARD_ZERO_INPUT else 1
            r = bs.ROTATIONS[witness]
            u[bs.apply_rotation(r, g.output0), m] += amp[0][col]
            u[bs.apply_rotation(r, g.output1), m] += amp[1][col]
    return u


@dataclass
class VerificationReport:
    unitarity_residual: float
    covariance_residual_max: float
    quiescent_fixed: bool
    class_closure: dict[RuleClass, tuple[RuleClass, ...]]
    class_closure_violations: int
    lone_signal_moves: bool
    crossing_phase: complex
    hadamard_orbit_sizes: tuple[int, int]
    tol: float = OPERATOR_TOL

    @property
    def passed(self) -> bool:
        return (
            self.unitarity_residual <= self.tol
            and self.covariance_residual_max <= self.tol
            and self.quiescent_fixed
            and self.class_closure_violations == 0
        )

    def to_text(self) -> str:
        lines = [
            f"unitarity_residual {self.unitarity_residual!r}",
            f"covariance_residual_max {self.covariance_residual_max!r}",
            f"quiescent_fixed {str(self.quiescent_fixed).lower()}",
            f"class_closure_violations {self.class_closure_violations}",
            f"lone_signal_moves {str(self.lone_signal_moves).lower()}",
            f"crossing_phase {self.crossing_phase.real!r} {self.crossing_phase.imag!r}",
            "hadamard_orbit_sizes "
            f"{self.hadamard_orbit_sizes[0]} {self.hadamard_orbit_sizes[1]}",
            f"passed {str(self.passed).lower()}",
        ]
        for cls in RuleClass:
            images = ",".join(c.value for c in self.class_closure[cls])
            lines.append(f"closure.{cls.value} {images}")
        return "\n".join(lines) + "\n"


# Image classes each rule class is allowed to reach (the closure contract).
_ALLOWED_CLOSURE = {
    RuleClass.EMPTY: {RuleClass.EMPTY},
    RuleClass.LONE_SIGNAL: {RuleClass.LONE_SIGNAL},
    RuleClass.BARRIER: {RuleClass.BARRIER},
    RuleClass.FACE_DIAGONAL_PAIR: {RuleClass.FACE_DIAGONAL_PAIR},
    RuleClass.ANTIPODAL_PAIR: {RuleClass.ANTIPODAL_PAIR},
    RuleClass.WALL: {RuleClass.WALL},
    RuleClass.WALL_WITH_FACE_SIGNAL: {RuleClass.WALL_WITH_FACE_SIGNAL},
    RuleClass.HADAMARD_ZERO_INPUT: {
        RuleClass.HADAMARD_ZERO_INPUT,
        RuleClass.HADAMARD_ONE_INPUT,
    },
    RuleClass.HADAMARD_ONE_INPUT: {
        RuleClass.HADAMARD_ZERO_INPUT,
        RuleClass.HADAMARD_ONE_INPUT,
    },
    RuleClass.DEFAULT: {RuleClass.DEFAULT},
}


def verify_matrix(u: np.ndarray, classifier: Classifier) -> VerificationReport:
    unit = bs.unitarity_residual(u)
    cov = max(bs.covariance_residual(u, r) for r in bs.ROTATIONS)
    quiescent = u[0, 0] == 1.0 and not u[1:, 0].any() and not u[0, 1:].any()
    closure: dict[RuleClass, set[RuleClass]] = {c: set() for c in RuleClass}
    violations = 0
    for m in range(bs.N_STATES):
        cls = classifier.classify(m)[0]
        for out in np.nonzero(u[:, m])[0]:
            ocls = classifier.classify(int(out))[0]
            closure[cls].add(ocls)
            if ocls not in _ALLOWED_CLOSURE[cls]:
                violations += 1
    lone = 1 << bs.cell_index(0, 0, 0)
    moved = 1 << bs.cell_index(1, 1, 1)
    lone_ok = abs(u[moved, lone]) > 0.5 and abs(u[lone, lone]) < 0.5
    fd = bs.mask_of_cells([(0, 0, 0), (1, 1, 0)])
    phase = complex(u[bs.invert(fd), fd])
    return VerificationReport(
        unitarity_residual=unit,
        covariance_residual_max=cov,
        quiescent_fixed=bool(quiescent),
        class_closure={c: tuple(sorted(v, key=lambda x: x.value)) for c, v in closure.items()},
        class_closure_violations=violations,
        lone_signal_moves=bool(lone_ok),
        crossing_phase=phase,
        hadamard_orbit_sizes=(
            len(classifier._orbit0),
            len(classifier._orbit1),
        ),
    )


@dataclass
class ScatteringOperator:
    """Certified block unitary plus its sparse column table.

    The table holds, for every input mask, the output masks and amplitudes of
    the nonzero column entries (at most two, the Hadamard branches).  The
    checksum is the sha256 of the canonical text export and identifies the
    rule table in manifests and snapshots.
    """

    matrix: np.ndarray
    geometry: HadamardGeometry
    crossing_phase: complex
    report: VerificationReport
    checksum: str
    out_counts: np.ndarray = field(repr=False, default=None)
    out_masks: np.ndarray = field(repr=False, default=None)
    out_amps: np.ndarray = field(repr=False, default=None)

    @property
    def certified(self) -> bool:
        return self.report is not None and self.report.passed

    def column(self, mask: int):
        k = int(self.out_counts[mask])
        return [
            (int(self.out_masks[mask, j]), complex(self.out_amps[mask, j]))
            for j in range(k)
        ]


def _tabulate(u: np.ndarray):
    counts = np.zeros(bs.N_STATES, dtype=np.int8)
    masks = np.zeros((bs.N_STATES, 2), dtype=np.uint8)
    amps = np.zeros((bs.N_STATES, 2), dtype=np.complex128)
    for m in range(bs.N_STATES):
        outs = np.nonzero(u[:, m])[0]
        if len(outs) > 2:
            raise ValueError(f"column {m} has {len(outs)} entries; table expects <= 2")
        counts[m] = len(outs)
        for j, o in enumerate(outs):
            masks[m, j] = o
            amps[m, j] = u[o, m]
    return counts, masks, amps


def build_scattering_unitary(
    geometry: HadamardGeometry = FROZEN_HADAMARD_GEOMETRY,
    crossing_phase: complex = CROSSING_PHASE,
    amplitudes=None,
) -> ScatteringOperator:
    """Construct and certify the scattering unitary for a Hadamard geometry.

    Raises ValueError with a diagnostic if the result is not unitary or not
    rotation covariant at 1e-12, which indicates a bad geometry or a
    classifier bug rather than a recoverable condition.
    """
    classifier = Classifier(geometry)
    for mask in (geometry.input0, geometry.input1):
        stab = [r for r in bs.ROTATIONS if bs.apply_rotation(r, mask) == mask]
        if len(stab) != 1:
            raise ValueError(
                "canonical Hadamard pattern has a nontrivial rotation stabilizer; "
                "orbit extension would be ambiguous"
            )
    amp = geometry.amplitudes if amplitudes is None else amplitudes
    u = _build_matrix(classifier, crossing_phase, amp)
    report = verify_matrix(u, classifier)
    if report.unitarity_residual > OPERATOR_TOL:
        raise ValueError(
            f"scattering operator not unitary: residual {report.unitarity_residual:g}"
        )
    if report.covariance_residual_max > OPERATOR_TOL:
        raise ValueError(
            "scattering operator not rotation covariant: residual "
            f"{report.covariance_residual_max:g}"
        )
    counts, masks, amps_tab = _tabulate(u)
    return ScatteringOperator(
        matrix=u,
        geometry=geometry,
        crossing_phase=crossing_phase,
        report=report,
        checksum=bs.operator_checksum(u),
        out_counts=counts,
        out_masks=masks,
        out_amps=amps_tab,
    )


def verify_scattering_unitary(op: ScatteringOperator | np.ndarray) -> VerificationReport:
    """Re-run the whole-matrix certification of an operator."""
    u = op.matrix if isinstance(op, ScatteringOperator) else op
    classifier = (
        Classifier(op.geometry)
        if isinstance(op, ScatteringOperator)
        else default_classifier()
    )
    return verify_matrix(u, classifier)


def synthesize_hadamard_geometry() -> HadamardGeometry:
    """Search the Hadamard output assignment satisfying all constraints.

    The canonical inputs are fixed: the barrier along the bottom of the
    closest face with the signal at the top left, on the closest face for
    input 0 and on the furthest face for input 1.  Output candidates are all
    pairs of distinct non-barrier cells.  An assignment is valid when
    (a) outputs are distinct, (b) the orbit-extended operator is unitary,
    (c) it is rotation covariant (the trivial-stabilizer check makes the
    orbit extension well defined), and (d) both output signals sit on the
    far side of the block along the barrier axis, opposite the input
    signals' entry side, so the surrounding walls can route them onward.
    Returns the lexicographically least valid assignment; all valid ones are
    logged.
    """
    barrier_cells = bs.cells_of_mask(_CANONICAL_BARRIER)
    barrier_axis = next(
        k for k in range(3) if barrier_cells[0][k] != barrier_cells[1][k]
    )
    in0_cell = bs.cells_of_mask(_CANONICAL_INPUT0 & ~_CANONICAL_BARRIER)[0]
    in1_cell = bs.cells_of_mask(_CANONICAL_INPUT1 & ~_CANONICAL_BARRIER)[0]
    if in0_cell[barrier_axis] != in1_cell[barrier_axis]:
        raise ValueError("canonical inputs do not share an entry side")
    exit_value = 1 - in0_cell[barrier_axis]

    candidates = [c for c in bs.CELLS if not _CANONICAL_BARRIER >> bs.cell_index(*c) & 1]
    valid: list[HadamardGeometry] = []
    for c0 in sorted(candidates):
        for c1 in sorted(candidates):
            if c0 == c1:
                continue
            if c0[barrier_axis] != exit_value or c1[barrier_axis] != exit_value:
                continue
            geom = HadamardGeometry(
                input0=_CANONICAL_INPUT0,
                input1=_CANONICAL_INPUT1,
                output0=_CANONICAL_BARRIER | 1 << bs.cell_index(*c0),
                output1=_CANONICAL_BARRIER | 1 << bs.cell_index(*c1),
            )
            try:
                classifier = Classifier(geom)
            except ValueError:
                continue
            u = _build_matrix(classifier, CROSSING_PHASE, geom.amplitudes)
            if bs.unitarity_residual(u) > OPERATOR_TOL:
                continue
            if any(
                bs.covariance_residual(u, r) > OPERATOR_TOL for r in bs.ROTATIONS
            ):
                continue
            valid.append(geom)
    if not valid:
        raise ValueError(
            "no Hadamard output assignment satisfies the constraints; "
            "classifier conventions need revisiting"
        )
    for g in valid:
        log.info(
            "valid Hadamard geometry: out0=%s out1=%s",
            bs.cells_of_mask(g.output0 & ~_CANONICAL_BARRIER),
            bs.cells_of_mask(g.output1 & ~_CANONICAL_BARRIER),
        )
    key = lambda g: (
        bs.cells_of_mask(g.output0 & ~_CANONICAL_BARRIER)[0],
        bs.cells_of_mask(g.output1 & ~_CANONICAL_BARRIER)[0],
    )
    return sorted(valid, key=key)[0]
