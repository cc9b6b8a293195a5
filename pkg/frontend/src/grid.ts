// Ownership grid decoding. The server sends a row-major run-length encoded
// int grid (-1 = unclaimed); decoding is the only transformation the client
// performs on it.

export function rleDecode(runs: [number, number][], side: number): Int32Array {
  const total = side * side;
  const grid = new Int32Array(total);
  let pos = 0;
  for (const [value, run] of runs) {
    if (run < 0) {
      throw new Error(`negative run length ${run}`);
    }
    grid.fill(value, pos, pos + run);
    pos += run;
  }
  if (pos !== total) {
    throw new Error(`run lengths cover ${pos} cells, expected ${total}`);
  }
  return grid;
}

export function cellValue(grid: Int32Array, side: number, row: number, col: number): number {
  return grid[row * side + col];
}
