// Application wiring: session setup, 1s polling, click-to-place, advisor
// panel, and playback over the frames this client has seen.

import { ApiError, SessionApi } from "./api.js";
import { describeRow, describeTactic, sortRowsDescending, tendencyBars } from "./advisor.js";
import { cssColor, nationColor } from "./palette.js";
import { MapRenderer } from "./renderer.js";
import type { Cell } from "./types.js";
import { SessionViewModel } from "./viewmodel.js";

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

const DEFAULT_COUPLING = {
  n: 7,
  edges: [[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [5, 6]],
};

const banner = $("banner");
const canvas = $<HTMLCanvasElement>("map");
const hoverInfo = $("hover-info");
const legend = $("legend");
const advisorPanel = $("advisor");
const slider = $<HTMLInputElement>("playback");
const advanceBtn = $<HTMLButtonElement>("advance");
const statusLine = $("status");
const chart = $<HTMLCanvasElement>("area-chart");

let api = new SessionApi("");
const vm = new SessionViewModel();
const renderer = new MapRenderer(canvas);
let pollTimer: number | null = null;
let hoverCell: [number, number] | null = null;

function showError(message: string): void {
  banner.textContent = message;
  banner.style.display = "block";
}

function clearError(): void {
  banner.style.display = "none";
}

function selectedRound(): number {
  return Number(slider.value);
}

function redraw(): void {
  const frame = vm.frameAt(selectedRound()) ?? vm.latestFrame();
  if (!frame) return;
  try {
    renderer.draw(frame, vm.side, hoverCell);
  } catch (err) {
    showError(`render failed: ${(err as Error).message}`);
  }
}

function updateStatus(): void {
  const awaiting = vm.awaiting.length ? ` — waiting for ${vm.awaiting.join(", ")}` : "";
  statusLine.textContent = `round ${vm.round}/${vm.rounds} — ${vm.phase}${awaiting}`;
  advanceBtn.disabled = vm.phase !== "advancing";
  slider.max = String(vm.round);
  if (Number(slider.value) >= vm.round - 1) {
    slider.value = String(vm.round);
  }
}

function updateLegend(): void {
  legend.innerHTML = "";
  vm.groups.forEach((group, nation) => {
    const row = document.createElement("div");
    row.className = "legend-row";
    const swatch = document.createElement("span");
    swatch.className = "swatch";
    swatch.style.background = cssColor(nationColor(nation));
    const label = document.createElement("span");
    label.textContent = ` nation ${nation} (${group}) — area ${vm.areas[nation] ?? 0}`;
    row.append(swatch, label);
    row.onclick = () => {
      vm.selectedNation = nation;
      void refreshAdvisor();
    };
    legend.append(row);
  });
}

function drawAreaChart(): void {
  const ctx = chart.getContext("2d");
  if (!ctx || !vm.areaSeries.length) return;
  ctx.clearRect(0, 0, chart.width, chart.height);
  const rounds = Math.max(1, ...vm.areaSeries.map((s) => s.length));
  const peak = Math.max(1, ...vm.areaSeries.flat());
  vm.areaSeries.forEach((series, nation) => {
    ctx.strokeStyle = cssColor(nationColor(nation));
    ctx.beginPath();
    series.forEach((area, i) => {
      const x = (i / Math.max(1, rounds - 1)) * (chart.width - 8) + 4;
      const y = chart.height - 4 - (area / peak) * (chart.height - 8);
      i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y);
    });
    ctx.stroke();
  });
}

async function refreshAdvisor(): Promise<void> {
  if (vm.selectedNation === null || !vm.sessionId) return;
  try {
    const advisor = await api.getAdvisor(vm.sessionId, vm.selectedNation);
    advisorPanel.innerHTML = "";
    const title = document.createElement("h3");
    title.textContent = `advisor — nation ${advisor.nation}`;
    advisorPanel.append(title);
    if (advisor.eliminated) {
      const note = document.createElement("p");
      note.textContent = "eliminated: no cities remain";
      advisorPanel.append(note);
      return;
    }
    const suggestion = document.createElement("p");
    const cell = advisor.suggested_cell;
    suggestion.textContent =
      `suggests: ${describeTactic(advisor.suggested_tactic)}` +
      (cell ? ` at (${cell[0]}, ${cell[1]})` : "");
    advisorPanel.append(suggestion);
    for (const bar of tendencyBars(advisor)) {
      const row = document.createElement("div");
      row.className = "bar-row";
      const label = document.createElement("span");
      label.textContent = bar.label;
      const track = document.createElement("div");
      track.className = "bar-track";
      const fill = document.createElement("div");
      fill.className = "bar-fill";
      fill.style.width = `${Math.round(bar.value * 100)}%`;
      track.append(fill);
      row.append(label, track);
      advisorPanel.append(row);
    }
    const list = document.createElement("ul");
    for (const row of sortRowsDescending(advisor.rows)) {
      const item = document.createElement("li");
      item.textContent = describeRow(row);
      list.append(item);
    }
    advisorPanel.append(list);
  } catch (err) {
    showError(`advisor fetch failed: ${(err as Error).message}`);
  }
}

async function refreshState(): Promise<void> {
  if (!vm.sessionId) return;
  try {
    const state = await api.getState(vm.sessionId);
    vm.applyState(state);
    clearError();
    updateStatus();
    updateLegend();
    redraw();
  } catch (err) {
    showError(
      err instanceof ApiError
        ? `server error ${err.status}: ${err.message}`
        : `state decode failed: ${(err as Error).message}`,
    );
  }
}

function startPolling(): void {
  if (pollTimer !== null) window.clearInterval(pollTimer);
  pollTimer = window.setInterval(() => {
    if (vm.phase !== "finished") void refreshState();
  }, 1000);
}

canvas.addEventListener("mousemove", (event) => {
  if (!vm.side) return;
  hoverCell = renderer.cellAt(event.offsetX, event.offsetY);
  const frame = vm.frameAt(selectedRound()) ?? vm.latestFrame();
  if (!frame) return;
  const [row, col] = hoverCell;
  const owner = frame.grid[row * vm.side + col];
  const city = frame.cities.find((c) => c.cell[0] === row && c.cell[1] === col);
  const ruin = frame.ruins.some(([r, c]) => r === row && c === col);
  hoverInfo.textContent =
    `(${row}, ${col}) ` +
    (ruin ? "ruin" : owner < 0 ? "unclaimed" : `nation ${owner}`) +
    (city ? ` — ${city.capital ? "capital" : "city"} of nation ${city.owner}` : "");
  redraw();
});

canvas.addEventListener("click", async (event) => {
  if (!vm.sessionId || vm.phase === "finished") return;
  const humans = vm.humanNations();
  const nation = vm.selectedNation !== null && humans.includes(vm.selectedNation)
    ? vm.selectedNation
    : humans[0];
  if (nation === undefined) return;
  const cell = renderer.cellAt(event.offsetX, event.offsetY) as Cell;
  try {
    await api.postPlacement(vm.sessionId, nation, cell);
    hoverInfo.textContent = `nation ${nation} will found a city at (${cell[0]}, ${cell[1]})`;
    await refreshState();
  } catch (err) {
    if (err instanceof ApiError) {
      hoverInfo.textContent = `placement rejected: ${err.message}`;
    } else {
      showError((err as Error).message);
    }
  }
});

advanceBtn.addEventListener("click", async () => {
  try {
    const { record } = await api.advance(vm.sessionId);
    vm.applyRecord(record);
    await refreshState();
    drawAreaChart();
    await refreshAdvisor();
  } catch (err) {
    if (err instanceof ApiError && err.status === 409) {
      showError(`cannot advance: ${err.message}`);
    } else {
      showError((err as Error).message);
    }
  }
});

slider.addEventListener("input", redraw);

$("create").addEventListener("click", async () => {
  try {
    api = new SessionApi(($("server") as HTMLInputElement).value.replace(/\/$/, ""));
    const couplingText = ($("coupling") as HTMLTextAreaElement).value.trim();
    const humansText = ($("humans") as HTMLInputElement).value.trim();
    const request = {
      coupling: couplingText ? JSON.parse(couplingText) : DEFAULT_COUPLING,
      rounds: Number(($("rounds") as HTMLInputElement).value) || 20,
      seed: Number(($("seed") as HTMLInputElement).value) || 0,
      human_nations: humansText
        ? humansText.split(",").map((tok) => Number(tok.trim()))
        : [],
    };
    const { session_id, state } = await api.createSession(request);
    vm.sessionId = session_id;
    vm.frames.length = 0;
    vm.areaSeries.length = 0;
    vm.applyState(state);
    vm.selectedNation = vm.humanNations()[0] ?? 0;
    renderer.fit(vm.side);
    clearError();
    updateStatus();
    updateLegend();
    redraw();
    drawAreaChart();
    await refreshAdvisor();
    startPolling();
  } catch (err) {
    showError(
      err instanceof ApiError
        ? `session rejected: ${err.message}`
        : `setup failed: ${(err as Error).message}`,
    );
  }
});

($("coupling") as HTMLTextAreaElement).value = JSON.stringify(DEFAULT_COUPLING);
