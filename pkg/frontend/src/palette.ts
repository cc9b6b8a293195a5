// Nation palette, identical to the engine's image export.
// Generated from the engine palette table; do not edit by hand.

export type Rgb = [number, number, number];

export const PALETTE: Rgb[] = [
  [242, 109, 109],
  [54, 90, 178],
  [157, 242, 36],
  [178, 80, 166],
  [73, 242, 214],
  [178, 109, 27],
  [142, 109, 242],
  [59, 178, 54],
  [242, 36, 105],
  [80, 142, 178],
  [228, 242, 73],
  [147, 27, 178],
  [109, 242, 175],
  [178, 79, 54],
  [36, 54, 242],
  [117, 178, 80],
  [242, 73, 186],
  [27, 173, 178],
  [242, 209, 109],
  [111, 54, 178],
  [36, 242, 70],
  [178, 80, 93],
  [73, 144, 242],
  [135, 178, 27],
  [242, 109, 242],
  [54, 178, 142],
  [242, 121, 36],
  [92, 80, 178],
  [102, 242, 73],
  [178, 27, 97],
  [109, 209, 242],
  [178, 173, 54],
  [173, 36, 242],
  [80, 178, 117],
  [242, 86, 73],
  [27, 59, 178],
  [176, 242, 109],
  [178, 54, 153],
  [36, 242, 224],
  [178, 141, 80],
  [128, 73, 242],
  [27, 178, 32],
  [242, 109, 143],
  [54, 122, 178],
  [209, 242, 36],
  [166, 80, 178],
  [73, 242, 171],
  [178, 70, 27],
  [109, 110, 242],
  [91, 178, 54],
  [242, 36, 158],
  [80, 167, 178],
  [242, 213, 73],
];

export const UNCLAIMED_COLOR: Rgb = [0, 0, 0];
export const RUIN_COLOR: Rgb = [255, 255, 255];
export const CITY_DARKEN = 0.3;

export function nationColor(owner: number): Rgb {
  return PALETTE[((owner % PALETTE.length) + PALETTE.length) % PALETTE.length];
}

export function cityColor(owner: number): Rgb {
  const [r, g, b] = nationColor(owner);
  return [Math.floor(r * CITY_DARKEN), Math.floor(g * CITY_DARKEN), Math.floor(b * CITY_DARKEN)];
}

export function cssColor(rgb: Rgb): string {
  return `rgb(${rgb[0]}, ${rgb[1]}, ${rgb[2]})`;
}
