/** Selection overlay: tint the currently selected regions.
 *
 * Tinted ids always equal the latest selection response from the
 * engine; the label grid comes from the segment response.
 */

import { SelectionMsg } from "./protocol.js";

export type OverlayMode = "none" | "selected" | "covered";

const TINT: [number, number, number, number] = [64, 200, 255, 110];

export class OverlayState {
  labels: Uint16Array | null = null;
  width = 0;
  height = 0;
  selection: SelectionMsg | null = null;
  mode: OverlayMode = "selected";

  setLabels(labels: Uint16Array, width: number, height: number): void {
    this.labels = labels;
    this.width = width;
    this.height = height;
  }

  update(selection: SelectionMsg): void {
    this.selection = selection;
  }

  tintedIds(): number[] {
    if (!this.selection || this.mode === "none") return [];
    return this.mode === "covered" ? this.selection.covered : this.selection.selected;
  }

  /** RGBA overlay plane (transparent outside tinted regions). */
  render(): Uint8Array {
    const out = new Uint8Array(this.width * this.height * 4);
    if (!this.labels) return out;
    const ids = new Set(this.tintedIds());
    if (ids.size === 0) return out;
    for (let i = 0; i < this.labels.length; i++) {
      if (ids.has(this.labels[i])) {
        out.set(TINT, i * 4);
      }
    }
    return out;
  }
}
