"""Command-line surface: verify, run, gate-test, oracle-diff, serve.

Exit codes: 0 pass, 1 verification or test failure, 2 usage or parse error.
Outputs are deterministic: fixed orderings, no timestamps, and the manifest
records the operator checksum so replays with a mismatched rule table are
detectable.  QGOL_THREADS caps worker parallelism inside the engine.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import block_space as bs
from .evolution import (
    DEFAULT_PRUNE_EPS,
    KERNEL_NAME,
    SimClock,
    parity_for_step,
    step,
)
from .gadgets import (
    REFERENCE_GATES,
    catalogue,
    catalogue_json,
    extract_gate_matrix,
    gate_distance,
)
from .oracle import dense_oracle_step
from .scattering import (
    FROZEN_HADAMARD_GEOMETRY,
    build_scattering_unitary,
    synthesize_hadamard_geometry,
    verify_scattering_unitary,
)
from .scene import SceneError, parse_scene
from .state import prune, write_snapshot

PARITY_CONVENTION = (
    "step t->t+1 applies the aligned partition (corners in 2Z^3) for even t "
    "and the shifted partition (corners in 2Z^3+(1,1,1)) for odd t"
)


def _build_operator():
    geometry = synthesize_hadamard_geometry()
    if geometry != FROZEN_HADAMARD_GEOMETRY:
        print("synthesized Hadamard geometry disagrees with the frozen constant",
              file=sys.stderr)
        return None
    return build_scattering_unitary(geometry)


def cmd_verify(args) -> int:
    op = _build_operator()
    if op is None:
        return 1
    report = verify_scattering_unitary(op)
    sys.stdout.write(report.to_text())
    if args.export:
        Path(args.export).write_text(bs.export_operator(op.matrix))
    return 0 if report.passed else 1


def cmd_run(args) -> int:
    op = build_scattering_unitary()
    try:
        scene = parse_scene(Path(args.scene).read_bytes(), op)
    except (OSError, SceneError) as e:
        print(f"scene error: {e}", file=sys.stderr)
        return 2
    prune_eps = scene.prune_eps if scene.prune_eps is not None else DEFAULT_PRUNE_EPS
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    every = args.snapshot_every

    clock = SimClock(scene.clock_origin)
    s = scene.initial
    (out_dir / f"step_{clock.t:06d}.json").write_bytes(write_snapshot(s))
    written = [clock.t]
    for k in range(args.steps):
        s = step(s, parity_for_step(clock.t), op, prune_eps=prune_eps)
        clock.t += 1
        if (k + 1) % every == 0 or k + 1 == args.steps:
            path = out_dir / f"step_{clock.t:06d}.json"
            path.write_bytes(write_snapshot(s))
            written.append(clock.t)
    manifest = {
        "steps": args.steps,
        "clock_origin": scene.clock_origin,
        "parity_convention": PARITY_CONVENTION,
        "prune": prune_eps,
        "u_checksum": op.checksum,
        "snapshot_every": every,
        "snapshots": written,
        "kernel": KERNEL_NAME,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    print(f"wrote {len(written)} snapshots to {out_dir}")
    return 0


def cmd_gate_test(args) -> int:
    op = build_scattering_unitary()
    cat = catalogue(op)
    gadget = cat[args.gate]
    matrix = extract_gate_matrix(gadget, op)
    residual = gate_distance(matrix, REFERENCE_GATES[args.gate])
    print(f"gate {args.gate}: residual {residual:.3e} (tolerance {args.tol:g})")
    with np.printoptions(precision=6, suppress=True):
        print(matrix)
    return 0 if residual <= args.tol else 1


def cmd_oracle_diff(args) -> int:
    op = build_scattering_unitary()
    try:
        scene = parse_scene(Path(args.scene).read_bytes(), op)
    except (OSError, SceneError) as e:
        print(f"scene error: {e}", file=sys.stderr)
        return 2
    rx, ry, rz = args.region
    region = ((-rx, -ry, -rz), (rx, ry, rz))
    clock = SimClock(scene.clock_origin)
    s = scene.initial
    worst = 0.0
    for _ in range(args.steps):
        parity = parity_for_step(clock.t)
        try:
            expected = dense_oracle_step(s, region, parity, op)
        except ValueError as e:
            print(f"oracle refused at t={clock.t}: {e}", file=sys.stderr)
            return 2
        s = step(s, parity, op, prune_eps=0.0)
        keys = set(expected) | set(s)
        diff = max(
            (abs(expected.get(k, 0j) - s.get(k, 0j)) for k in keys), default=0.0
        )
        worst = max(worst, diff)
        clock.t += 1
        s, _ = prune(s, DEFAULT_PRUNE_EPS)
    print(f"max sparse-vs-dense deviation over {args.steps} steps: {worst:.3e}")
    return 0 if worst <= 1e-12 else 1


def cmd_gadgets(args) -> int:
    op = build_scattering_unitary()
    sys.stdout.write(catalogue_json(op) + "\n")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qgol",
        description="Simulator for a minimal 3D partitioned quantum cellular automaton",
    )
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="build and certify the scattering unitary")
    v.add_argument("--export", help="write the operator entries to this path")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", help="simulate a scene and write snapshots")
    r.add_argument("--scene", required=True)
    r.add_argument("--steps", type=int, required=True)
    r.add_argument("--snapshot-every", type=int, default=1)
    r.add_argument("--out", default="out")
    r.set_defaults(func=cmd_run)

    g = sub.add_parser("gate-test", help="extract a gadget's gate matrix and compare")
    g.add_argument("gate", choices=["hadamard", "cphase", "cz", "cnot"])
    g.add_argument("--tol", type=float, default=1e-9)
    g.set_defaults(func=cmd_gate_test)

    o = sub.add_parser("oracle-diff", help="differential-test sparse step vs dense oracle")
    o.add_argument("--scene", required=True)
    o.add_argument("--steps", type=int, required=True)
    o.add_argument("--region", type=int, nargs=3, metavar=("X", "Y", "Z"),
                   required=True,
                   help="half-extents of the oracle region about the origin")
    o.set_defaults(func=cmd_oracle_diff)

    c = sub.add_parser("gadgets", help="print the gadget catalogue as JSON")
    c.set_defaults(func=cmd_gadgets)

    s = sub.add_parser("serve", help="start the session server")
    s.add_argument("--port", type=int, default=8000)
    s.add_argument("--host", default="127.0.0.1")
    s.set_defaults(func=cmd_serve)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
