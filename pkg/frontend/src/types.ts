// Wire types for the /v1 session API (see docs/api_schema.json in the repo
// root). The client displays these values verbatim and never re-derives
// game rules from them.

export type Cell = [number, number];

export interface CouplingMap {
  n: number;
  edges: Cell[];
}

export interface SessionRequest {
  coupling: CouplingMap;
  map?: { L?: number; r?: number };
  rounds?: number;
  seed?: number;
  tomography_mode?: "exact" | "sampled";
  shots?: number;
  opponent_coloring?: "none" | "colorA" | "colorB";
  human_nations?: number[];
  initial_layout?: Cell[] | null;
}

export interface CityInfo {
  owner: number;
  cell: Cell;
  capital: boolean;
  placed_round: number;
}

export interface NationStatsInfo {
  area: number;
  frontier: number;
  lost: number;
  gained: number;
}

export type Group = "standard" | "opponent" | "human";
export type Phase = "awaiting-input" | "advancing" | "finished";

export interface RenderModel {
  session_id: string;
  round: number;
  rounds: number;
  phase: Phase;
  awaiting: number[];
  L: number;
  r: number;
  grid_rle: [number, number][];
  cities: CityInfo[];
  ruins: Cell[];
  areas: number[];
  stats: NationStatsInfo[] | null;
  groups: Group[];
  pending: Record<string, Cell>;
  palette: [number, number, number][];
}

export interface TacticInfo {
  kind: "defend" | "attack" | "explore" | "human";
  target: number | null;
}

export type AdvisorRow = [number, number | null, "X" | "Y" | "Z", number];

export interface Advisor {
  nation: number;
  eliminated: boolean;
  rows: AdvisorRow[];
  suggested_tactic: TacticInfo | null;
  suggested_cell: Cell | null;
  bloch: [number, number, number];
}

export interface RoundRecord {
  round: number;
  tactics: (TacticInfo | null)[];
  placements: { nation: number; cell: Cell; razed: Cell[] }[];
  transfers: { cell: Cell; from: number; to: number; gate: string }[];
  stats: NationStatsInfo[];
  bloch: [number, number, number][];
  gates: Record<string, unknown>[];
}

export interface HistoryDoc {
  format_version: number;
  config: Record<string, unknown> & { capitals: Cell[]; opponents: number[] };
  rounds: RoundRecord[];
}
