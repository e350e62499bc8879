/**
 * Voxel scene construction with three.js: occupied cells of one branch as
 * instanced unit cubes, plus the partition grid of the current parity as
 * line segments.  Everything here builds scene-graph objects only, so it
 * runs headless; the WebGL renderer lives in main.ts.
 */
import * as THREE from "three";
import { Cell, Frame } from "./types.js";

export const VOXEL_COLOR = 0x4caf9e;
export const GRID_COLOR_ALIGNED = 0x5577aa;
export const GRID_COLOR_SHIFTED = 0xaa7755;

export function boundsOf(cells: Cell[]): { lo: Cell; hi: Cell } {
  if (cells.length === 0) {
    return { lo: [-2, -2, -2], hi: [2, 2, 2] };
  }
  const lo: Cell = [...cells[0]];
  const hi: Cell = [...cells[0]];
  for (const c of cells) {
    for (let k = 0; k < 3; k++) {
      lo[k] = Math.min(lo[k], c[k]);
      hi[k] = Math.max(hi[k], c[k]);
    }
  }
  return { lo, hi };
}

export function buildVoxels(cells: Cell[]): THREE.InstancedMesh {
  const geometry = new THREE.BoxGeometry(0.92, 0.92, 0.92);
  const material = new THREE.MeshLambertMaterial({ color: VOXEL_COLOR });
  const mesh = new THREE.InstancedMesh(geometry, material, Math.max(cells.length, 1));
  const m = new THREE.Matrix4();
  cells.forEach((c, i) => {
    // cell (x,y,z) occupies the unit cube with corner at (x,y,z)
    m.makeTranslation(c[0] + 0.5, c[1] + 0.5, c[2] + 0.5);
    mesh.setMatrixAt(i, m);
  });
  mesh.count = cells.length;
  mesh.instanceMatrix.needsUpdate = true;
  return mesh;
}

/**
 * Partition grid lines for the given parity over the bounding region of the
 * branch: planes at even coordinates for the aligned grid, odd for shifted.
 */
export function buildParityGrid(cells: Cell[], parity: "aligned" | "shifted"): THREE.LineSegments {
  const { lo, hi } = boundsOf(cells);
  const offset = parity === "aligned" ? 0 : 1;
  const pad = 2;
  const start: Cell = [0, 0, 0];
  const end: Cell = [0, 0, 0];
  for (let k = 0; k < 3; k++) {
    start[k] = 2 * Math.floor((lo[k] - pad - offset) / 2) + offset;
    end[k] = 2 * Math.ceil((hi[k] + 1 + pad - offset) / 2) + offset;
  }
  const positions: number[] = [];
  for (let axis = 0; axis < 3; axis++) {
    const u = (axis + 1) % 3;
    const v = (axis + 2) % 3;
    for (let a = start[axis]; a <= end[axis]; a += 2) {
      for (let b = start[u]; b <= end[u]; b += 2) {
        const p0: Cell = [0, 0, 0];
        const p1: Cell = [0, 0, 0];
        p0[axis] = a;
        p1[axis] = a;
        p0[u] = b;
        p1[u] = b;
        p0[v] = start[v];
        p1[v] = end[v];
        positions.push(...p0, ...p1);
      }
    }
  }
  const geometry = new THREE.BufferGeometry();
  geometry.setAttribute("position", new THREE.Float32BufferAttribute(positions, 3));
  const color = parity === "aligned" ? GRID_COLOR_ALIGNED : GRID_COLOR_SHIFTED;
  const material = new THREE.LineBasicMaterial({
    color,
    transparent: true,
    opacity: 0.35,
  });
  return new THREE.LineSegments(geometry, material);
}

export interface SceneModel {
  scene: THREE.Scene;
  voxels: THREE.InstancedMesh;
  grid: THREE.LineSegments | null;
  center: THREE.Vector3;
}

/** The displayed scene is exactly one branch of the server snapshot. */
export function buildScene(
  frame: Frame,
  branchIndex: number,
  showGrid: boolean
): SceneModel {
  const scene = new THREE.Scene();
  scene.background = new THREE.Color(0x10141a);
  const branch = frame.branches[branchIndex];
  const cells = branch ? branch.cells : [];
  const voxels = buildVoxels(cells);
  scene.add(voxels);
  let grid: THREE.LineSegments | null = null;
  if (showGrid) {
    grid = buildParityGrid(cells, frame.parity);
    scene.add(grid);
  }
  const ambient = new THREE.AmbientLight(0xffffff, 0.7);
  const sun = new THREE.DirectionalLight(0xffffff, 1.2);
  sun.position.set(8, 14, 6);
  scene.add(ambient, sun);
  const { lo, hi } = boundsOf(cells);
  const center = new THREE.Vector3(
    (lo[0] + hi[0] + 1) / 2,
    (lo[1] + hi[1] + 1) / 2,
    (lo[2] + hi[2] + 1) / 2
  );
  return { scene, voxels, grid, center };
}

/** Screen pick -> lattice cell, for the cell-toggle edit tool. */
export function pickCell(
  raycaster: THREE.Raycaster,
  model: SceneModel
): Cell | null {
  const hits = raycaster.intersectObject(model.voxels);
  if (hits.length === 0) return null;
  const p = hits[0].point;
  return [Math.floor(p.x), Math.floor(p.y), Math.floor(p.z)];
}
