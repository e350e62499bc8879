/**
 * DOM layer: probability sidebar, playback controls, edit tools, gadget
 * palette.  Renders the models computed in state.ts; no simulation logic.
 */
import { Catalogue, Frame } from "./types.js";
import {
  SidebarEntry,
  ViewState,
  probabilitiesLookNormalized,
  sidebarEntries,
} from "./state.js";

export interface Controls {
  onSelectBranch(index: number): void;
  onPlayPause(): void;
  onStepOnce(): void;
  onReset(): void;
  onToolChange(tool: ViewState["tool"]): void;
  onToggleGrid(): void;
}

export function renderSidebar(
  container: HTMLElement,
  frame: Frame,
  selected: number,
  controls: Controls
): void {
  container.replaceChildren();
  const header = document.createElement("div");
  header.className = "sidebar-header";
  header.textContent = `t = ${frame.t}  (${frame.parity} partition)`;
  container.appendChild(header);
  const entries: SidebarEntry[] = sidebarEntries(frame);
  for (const entry of entries) {
    const row = document.createElement("button");
    row.className = "branch-row" + (entry.index === selected ? " selected" : "");
    row.dataset.probability = entry.label;
    row.textContent = `branch ${entry.index}: p = ${entry.label} (${entry.cellCount} cells)`;
    row.onclick = () => controls.onSelectBranch(entry.index);
    container.appendChild(row);
  }
  if (!probabilitiesLookNormalized(frame)) {
    const warn = document.createElement("div");
    warn.className = "warning";
    warn.textContent = "probabilities do not sum to 1 at display precision";
    container.appendChild(warn);
  }
}

export function renderPalette(
  container: HTMLElement,
  catalogue: Catalogue,
  controls: Controls
): void {
  container.replaceChildren();
  const toggle = document.createElement("button");
  toggle.textContent = "toggle cell";
  toggle.onclick = () => controls.onToolChange({ kind: "toggle-cell" });
  container.appendChild(toggle);
  for (const g of catalogue.gadgets) {
    const btn = document.createElement("button");
    btn.textContent = `stamp ${g.name}`;
    btn.onclick = () =>
      controls.onToolChange({ kind: "stamp-gadget", name: g.name, orientation: 0 });
    container.appendChild(btn);
  }
}

export function renderTransport(
  container: HTMLElement,
  state: ViewState,
  controls: Controls
): void {
  container.replaceChildren();
  const play = document.createElement("button");
  play.textContent = state.playing ? "pause" : "play";
  play.onclick = () => controls.onPlayPause();
  const stepBtn = document.createElement("button");
  stepBtn.textContent = "step";
  stepBtn.onclick = () => controls.onStepOnce();
  const reset = document.createElement("button");
  reset.textContent = "reset";
  reset.onclick = () => controls.onReset();
  const grid = document.createElement("button");
  grid.textContent = state.showParityGrid ? "hide grid" : "show grid";
  grid.onclick = () => controls.onToggleGrid();
  container.append(play, stepBtn, reset, grid);
}
