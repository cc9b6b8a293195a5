// Client-side session state: a mirror of what the server sent, plus the
// frame ring used by the playback slider. Every number shown in the UI
// comes from a server payload; the view model only decodes and files them.

import { rleDecode } from "./grid.js";
import type { Cell, CityInfo, Group, RenderModel, RoundRecord } from "./types.js";

export interface Frame {
  round: number;
  grid: Int32Array;
  cities: CityInfo[];
  ruins: Cell[];
}

export class SessionViewModel {
  sessionId = "";
  side = 0;
  radius = 0;
  round = 0;
  rounds = 0;
  phase: RenderModel["phase"] = "advancing";
  awaiting: number[] = [];
  groups: Group[] = [];
  areas: number[] = [];
  pending: Record<string, Cell> = {};
  frames: Frame[] = [];
  /** per-nation area after each recorded round, straight from server stats */
  areaSeries: number[][] = [];
  selectedNation: number | null = null;

  applyState(state: RenderModel): Frame {
    this.sessionId = state.session_id;
    this.side = state.L;
    this.radius = state.r;
    this.round = state.round;
    this.rounds = state.rounds;
    this.phase = state.phase;
    this.awaiting = state.awaiting;
    this.groups = state.groups;
    this.areas = state.areas;
    this.pending = state.pending;
    const frame: Frame = {
      round: state.round,
      grid: rleDecode(state.grid_rle, state.L),
      cities: state.cities,
      ruins: state.ruins,
    };
    const existing = this.frames.findIndex((f) => f.round === frame.round);
    if (existing >= 0) {
      this.frames[existing] = frame;
    } else {
      this.frames.push(frame);
      this.frames.sort((a, b) => a.round - b.round);
    }
    if (this.groups.length && !this.areaSeries.length) {
      this.areaSeries = this.groups.map(() => []);
    }
    return frame;
  }

  applyRecord(record: RoundRecord): void {
    if (!this.areaSeries.length) {
      this.areaSeries = record.stats.map(() => []);
    }
    record.stats.forEach((stats, nation) => {
      this.areaSeries[nation][record.round - 1] = stats.area;
    });
  }

  frameAt(round: number): Frame | undefined {
    return this.frames.find((f) => f.round === round);
  }

  latestFrame(): Frame | undefined {
    return this.frames[this.frames.length - 1];
  }

  humanNations(): number[] {
    return this.groups
      .map((group, nation) => (group === "human" ? nation : -1))
      .filter((nation) => nation >= 0);
  }
}
