// Canvas renderer: integer-scaled cell grid with city and ruin overlays,
// identical palette to the engine's image export.

import { cityColor, nationColor, RUIN_COLOR, UNCLAIMED_COLOR } from "./palette.js";
import type { Frame } from "./viewmodel.js";

export class MapRenderer {
  private scale = 2;

  constructor(private canvas: HTMLCanvasElement) {}

  /** Pixels per cell, chosen so the map fits the viewport. */
  fit(side: number, maxPixels = 768): number {
    this.scale = Math.max(1, Math.floor(maxPixels / side));
    this.canvas.width = side * this.scale;
    this.canvas.height = side * this.scale;
    return this.scale;
  }

  cellAt(offsetX: number, offsetY: number): [number, number] {
    return [Math.floor(offsetY / this.scale), Math.floor(offsetX / this.scale)];
  }

  draw(frame: Frame, side: number, highlight?: [number, number] | null): void {
    const ctx = this.canvas.getContext("2d");
    if (!ctx) {
      throw new Error("canvas 2d context unavailable");
    }
    const image = ctx.createImageData(side, side);
    const data = image.data;
    for (let i = 0; i < side * side; i++) {
      const owner = frame.grid[i];
      const rgb = owner < 0 ? UNCLAIMED_COLOR : nationColor(owner);
      data[i * 4] = rgb[0];
      data[i * 4 + 1] = rgb[1];
      data[i * 4 + 2] = rgb[2];
      data[i * 4 + 3] = 255;
    }
    for (const [row, col] of frame.ruins) {
      const i = row * side + col;
      data[i * 4] = RUIN_COLOR[0];
      data[i * 4 + 1] = RUIN_COLOR[1];
      data[i * 4 + 2] = RUIN_COLOR[2];
    }
    for (const city of frame.cities) {
      const [row, col] = city.cell;
      const i = row * side + col;
      const rgb = cityColor(city.owner);
      data[i * 4] = rgb[0];
      data[i * 4 + 1] = rgb[1];
      data[i * 4 + 2] = rgb[2];
    }
    // draw unscaled, then blow up with nearest-neighbour scaling
    const off = new OffscreenCanvas(side, side);
    const offCtx = off.getContext("2d")!;
    offCtx.putImageData(image, 0, 0);
    ctx.imageSmoothingEnabled = false;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.drawImage(off, 0, 0, this.canvas.width, this.canvas.height);

    if (highlight) {
      const [row, col] = highlight;
      ctx.strokeStyle = "#ffffff";
      ctx.lineWidth = 1;
      ctx.strokeRect(col * this.scale + 0.5, row * this.scale + 0.5, this.scale - 1, this.scale - 1);
    }
  }
}
