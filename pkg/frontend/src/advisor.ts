// Advisor panel helpers: row ordering and label formatting for the payoff
// table, suggestion, and policy-tendency bars. Pure functions; DOM assembly
// lives in main.ts.

import type { Advisor, AdvisorRow, TacticInfo } from "./types.js";

export const AXIS_TENDENCY: Record<"X" | "Y" | "Z", string> = {
  X: "defend",
  Y: "explore",
  Z: "attack",
};

/** Rows for display: highest payoff first, stable on ties. */
export function sortRowsDescending(rows: AdvisorRow[]): AdvisorRow[] {
  return rows
    .slice()
    .sort((a, b) => b[3] - a[3] || a[2].localeCompare(b[2]) || (a[1] ?? -1) - (b[1] ?? -1));
}

export function describeRow(row: AdvisorRow): string {
  const [, neighbour, axis, value] = row;
  const action = AXIS_TENDENCY[axis];
  const versus = neighbour === null ? "" : ` vs nation ${neighbour}`;
  return `${action}${versus}: ${value.toFixed(3)}`;
}

export function describeTactic(tactic: TacticInfo | null): string {
  if (!tactic) {
    return "no feasible action";
  }
  if (tactic.kind === "explore") {
    return "explore the frontier";
  }
  if (tactic.kind === "human") {
    return "player controlled";
  }
  return `${tactic.kind} nation ${tactic.target}`;
}

/** Tendency bars: the Bloch triple mapped to (defend, explore, attack),
 * clamped to the displayable [0, 1] range the advisor uses. */
export function tendencyBars(advisor: Advisor): { label: string; value: number }[] {
  const [x, y, z] = advisor.bloch;
  return [
    { label: "defend", value: Math.max(0, Math.min(1, x)) },
    { label: "explore", value: Math.max(0, Math.min(1, y)) },
    { label: "attack", value: Math.max(0, Math.min(1, z)) },
  ];
}
