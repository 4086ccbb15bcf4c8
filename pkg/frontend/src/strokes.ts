/** Pointer-to-sample mapping and stroke script accumulation. */

import { SampleMsg, Tool } from "./protocol.js";

export interface ViewTransform {
  zoom: number;
  panX: number;
  panY: number;
}

/** Screen coordinates to canvas coordinates under zoom/pan. */
export function screenToCanvas(
  t: ViewTransform,
  screenX: number,
  screenY: number,
): { x: number; y: number } {
  return { x: (screenX - t.panX) / t.zoom, y: (screenY - t.panY) / t.zoom };
}

export interface ScriptStroke {
  tool: Tool;
  samples: SampleMsg[];
}

export interface StrokeScript {
  canvas: string;
  strokes: ScriptStroke[];
  params: Record<string, number>;
}

/** Accumulates the samples actually sent to the engine, so the exported
 * script replays to the same canvas byte for byte. */
export class StrokeRecorder {
  private strokes: ScriptStroke[] = [];
  private current: ScriptStroke | null = null;
  private t0: number | null = null;

  get active(): boolean {
    return this.current !== null;
  }

  begin(tool: Tool, x: number, y: number, timeMs: number, pressure?: number): SampleMsg {
    if (this.current) throw new Error("stroke already active");
    this.t0 = timeMs;
    const sample: SampleMsg = { x, y, t_ms: 0, ...(pressure !== undefined ? { pressure } : {}) };
    this.current = { tool, samples: [sample] };
    return sample;
  }

  move(x: number, y: number, timeMs: number, pressure?: number): SampleMsg | null {
    if (!this.current || this.t0 === null) return null; // events after pointer-up are dropped
    const sample: SampleMsg = {
      x,
      y,
      t_ms: timeMs - this.t0,
      ...(pressure !== undefined ? { pressure } : {}),
    };
    this.current.samples.push(sample);
    return sample;
  }

  end(): ScriptStroke | null {
    if (!this.current) return null;
    const value = this.current;
    this.strokes.push(value);
    this.current = null;
    this.t0 = null;
    return value;
  }

  /** Drop the latest completed stroke (engine undo succeeded). */
  dropLast(): void {
    this.strokes.pop();
  }

  exportScript(canvasPath: string, params: Record<string, number>): StrokeScript {
    return { canvas: canvasPath, strokes: [...this.strokes], params: { ...params } };
  }
}
