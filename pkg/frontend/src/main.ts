/**
 * Viewer bootstrap: create a session from the bundled demo scene, connect
 * the step stream, render the selected branch, and wire the controls.
 */
import * as THREE from "three";
import { SessionClient, fetchCatalogue } from "./api.js";
import { SceneModel, buildScene, pickCell } from "./render.js";
import {
  ViewState,
  initialViewState,
  intervalMs,
  selectBranch,
  withFrame,
} from "./state.js";
import { connectStream } from "./stream.js";
import { Frame } from "./types.js";
import { Controls, renderPalette, renderSidebar, renderTransport } from "./ui.js";

const SERVER = (window as { QGOL_SERVER?: string }).QGOL_SERVER ?? "http://127.0.0.1:8000";

async function loadDemoScene(): Promise<unknown> {
  const resp = await fetch("./fixtures/hadamard_demo.scene.json");
  return resp.json();
}

async function start(): Promise<void> {
  const canvasHost = document.getElementById("scene")!;
  const sidebar = document.getElementById("sidebar")!;
  const transport = document.getElementById("transport")!;
  const palette = document.getElementById("palette")!;

  const client = await SessionClient.create(SERVER, await loadDemoScene());
  let state: ViewState = initialViewState(client.sessionId);
  let model: SceneModel | null = null;
  let playTimer: number | null = null;

  const renderer = new THREE.WebGLRenderer({ antialias: true });
  renderer.setSize(canvasHost.clientWidth || 900, canvasHost.clientHeight || 600);
  canvasHost.appendChild(renderer.domElement);
  const camera = new THREE.PerspectiveCamera(50, 1.5, 0.1, 500);

  function draw(): void {
    if (!state.frame) return;
    model = buildScene(state.frame, state.selectedBranch, state.showParityGrid);
    camera.position.set(
      model.center.x + 14,
      model.center.y + 10,
      model.center.z + 14
    );
    camera.lookAt(model.center);
    renderer.render(model.scene, camera);
    renderSidebar(sidebar, state.frame, state.selectedBranch, controls);
    renderTransport(transport, state, controls);
  }

  function apply(frame: Frame): void {
    state = withFrame(state, frame);
    draw();
  }

  const controls: Controls = {
    onSelectBranch(index) {
      state = selectBranch(state, index);
      draw();
    },
    onPlayPause() {
      state = { ...state, playing: !state.playing };
      if (state.playing) {
        const tick = async () => {
          if (!state.playing) return;
          apply(await client.advance(1));
          playTimer = window.setTimeout(tick, intervalMs(state));
        };
        void tick();
      } else if (playTimer !== null) {
        window.clearTimeout(playTimer);
        playTimer = null;
      }
      draw();
    },
    async onStepOnce() {
      apply(await client.advance(1));
    },
    async onReset() {
      state = { ...state, playing: false };
      apply(await client.reset());
    },
    onToolChange(tool) {
      state = { ...state, tool };
    },
    onToggleGrid() {
      state = { ...state, showParityGrid: !state.showParityGrid };
      draw();
    },
  };

  renderer.domElement.addEventListener("click", async (event) => {
    if (!model || !state.frame) return;
    const rect = renderer.domElement.getBoundingClientRect();
    const ndc = new THREE.Vector2(
      ((event.clientX - rect.left) / rect.width) * 2 - 1,
      -((event.clientY - rect.top) / rect.height) * 2 + 1
    );
    const raycaster = new THREE.Raycaster();
    raycaster.setFromCamera(ndc, camera);
    const cell = pickCell(raycaster, model);
    if (cell === null) return;
    try {
      if (state.tool.kind === "toggle-cell") {
        const branch = state.frame.branches[state.selectedBranch];
        const present = branch.cells.some(
          (c) => c[0] === cell[0] && c[1] === cell[1] && c[2] === cell[2]
        );
        apply(
          await client.mutate(
            present ? { remove: [cell] } : { add: [cell] }
          )
        );
      } else {
        const anchor: [number, number, number] = [
          2 * Math.round(cell[0] / 2),
          2 * Math.round(cell[1] / 2),
          2 * Math.round(cell[2] / 2),
        ];
        apply(
          await client.mutate({
            place_gadget: {
              name: state.tool.name,
              anchor,
              orientation: state.tool.orientation,
            },
          })
        );
      }
    } catch (err) {
      console.warn("edit rejected:", err);
    }
  });

  connectStream(client.streamUrl(), apply, () => console.warn("stream closed"));
  apply(await client.snapshot());
  renderPalette(palette, await fetchCatalogue(SERVER), controls);
}

start().catch((err) => {
  document.body.textContent = `viewer failed to start: ${err}`;
  console.error(err);
});
