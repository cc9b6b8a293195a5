import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { cityColor, nationColor, PALETTE } from "../src/palette.js";

const engineTable: [number, number, number][] = JSON.parse(
  readFileSync(new URL("./fixtures/palette.json", import.meta.url), "utf-8"),
);

describe("palette", () => {
  it("matches the engine's fixed 53-color table exactly", () => {
    expect(PALETTE.length).toBe(53);
    expect(PALETTE).toEqual(engineTable);
  });

  it("wraps owners beyond the table", () => {
    expect(nationColor(53)).toEqual(PALETTE[0]);
    expect(nationColor(54)).toEqual(PALETTE[1]);
  });

  it("darkens city markers like the image export", () => {
    const [r, g, b] = nationColor(3);
    expect(cityColor(3)).toEqual([
      Math.floor(r * 0.3),
      Math.floor(g * 0.3),
      Math.floor(b * 0.3),
    ]);
  });
});
