/** Client-side canvas state, composed purely from engine tile diffs.
 *
 * The UI never mutates pixels on its own: the displayed buffer is the
 * loaded image plus every received tile diff, which keeps the engine
 * the single source of truth.
 */

import { TileDiffMsg, b64ToBytes } from "./protocol.js";

export class TileCompositor {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;
  private warnings = 0;

  constructor(width: number, height: number, initial?: Uint8Array) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8Array(width * height * 4);
    if (initial) {
      if (initial.length !== this.pixels.length) {
        throw new Error("initial pixel buffer has the wrong size");
      }
      this.pixels.set(initial);
    }
  }

  /** Apply one diff; out-of-bounds tiles are logged and skipped. */
  applyDiff(diff: TileDiffMsg): number {
    let applied = 0;
    for (const tile of diff.tiles) {
      if (
        tile.x < 0 ||
        tile.y < 0 ||
        tile.x + tile.w > this.width ||
        tile.y + tile.h > this.height
      ) {
        this.warnings++;
        console.warn(`skipping out-of-bounds tile at ${tile.x},${tile.y}`);
        continue;
      }
      const data = b64ToBytes(tile.pixels);
      if (data.length !== tile.w * tile.h * 4) {
        this.warnings++;
        console.warn(`skipping malformed tile payload at ${tile.x},${tile.y}`);
        continue;
      }
      for (let row = 0; row < tile.h; row++) {
        const src = row * tile.w * 4;
        const dst = ((tile.y + row) * this.width + tile.x) * 4;
        this.pixels.set(data.subarray(src, src + tile.w * 4), dst);
      }
      applied++;
    }
    return applied;
  }

  get skippedTiles(): number {
    return this.warnings;
  }

  equals(other: Uint8Array): boolean {
    if (other.length !== this.pixels.length) return false;
    for (let i = 0; i < other.length; i++) {
      if (other[i] !== this.pixels[i]) return false;
    }
    return true;
  }
}
