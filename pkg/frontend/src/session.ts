/** Typed client around the engine session protocol. */

import {
  AckMsg,
  RequestMsg,
  ResponseMsg,
  SampleMsg,
  SelectionMsg,
  TileDiffMsg,
  Tool,
  b64ToBytes,
} from "./protocol.js";
import { Transport } from "./transport.js";

export class EngineError extends Error {}

export interface CanvasInfo {
  width: number;
  height: number;
  pixels: Uint8Array; // raw RGBA
}

export interface SegmentInfo {
  regions: number;
  labels: Uint16Array; // row-major region ids
  repColors: number[][];
}

export interface AdvanceInfo {
  diff: TileDiffMsg;
  selection: SelectionMsg;
}

function firstOfKind<T extends ResponseMsg>(msgs: ResponseMsg[], kind: string): T {
  for (const m of msgs) {
    if (m.kind === "error") throw new EngineError((m as { message: string }).message);
    if (m.kind === kind) return m as T;
  }
  throw new EngineError(`expected a ${kind} response`);
}

export class SessionClient {
  constructor(private transport: Transport) {}

  private async call(msg: RequestMsg): Promise<ResponseMsg[]> {
    const msgs = await this.transport.request(msg);
    const err = msgs.find((m) => m.kind === "error");
    if (err) throw new EngineError((err as { message: string }).message);
    return msgs;
  }

  async openCanvas(path: string): Promise<CanvasInfo> {
    const msgs = await this.call({ kind: "open_canvas", path });
    const ack = firstOfKind<AckMsg>(msgs, "ack");
    return {
      width: ack.width as number,
      height: ack.height as number,
      pixels: b64ToBytes(ack.pixels_b64 as string),
    };
  }

  async segment(
    method: "flat" | "meanshift" = "flat",
    opts: { spatial_bandwidth?: number; color_bandwidth?: number; min_region?: number } = {},
  ): Promise<SegmentInfo> {
    const msgs = await this.call({ kind: "segment", method, ...opts });
    const ack = firstOfKind<AckMsg>(msgs, "ack");
    const raw = b64ToBytes(ack.labels_b64 as string);
    return {
      regions: ack.regions as number,
      labels: new Uint16Array(raw.buffer, raw.byteOffset, raw.byteLength / 2),
      repColors: ack.rep_colors as number[][],
    };
  }

  async setParams(params: Record<string, number>): Promise<void> {
    await this.call({ kind: "set_params", params });
  }

  async beginStroke(tool: Tool, sample: SampleMsg): Promise<SelectionMsg> {
    const msgs = await this.call({ kind: "begin_stroke", tool, sample });
    return firstOfKind<SelectionMsg>(msgs, "selection");
  }

  async strokeSample(sample: SampleMsg): Promise<AdvanceInfo> {
    const msgs = await this.call({ kind: "stroke_sample", ...sample });
    return {
      diff: firstOfKind<TileDiffMsg>(msgs, "tile_diff"),
      selection: firstOfKind<SelectionMsg>(msgs, "selection"),
    };
  }

  async endStroke(): Promise<AckMsg> {
    const msgs = await this.call({ kind: "end_stroke" });
    return firstOfKind<AckMsg>(msgs, "ack");
  }

  async undo(): Promise<{ undone: boolean; diff: TileDiffMsg }> {
    const msgs = await this.call({ kind: "undo" });
    return {
      undone: firstOfKind<AckMsg>(msgs, "ack").undone as boolean,
      diff: firstOfKind<TileDiffMsg>(msgs, "tile_diff"),
    };
  }

  async exportPng(path: string): Promise<string> {
    const msgs = await this.call({ kind: "export", path });
    return firstOfKind<AckMsg>(msgs, "ack").path as string;
  }

  async getOverlay(): Promise<SelectionMsg> {
    const msgs = await this.call({ kind: "get_overlay" });
    return firstOfKind<SelectionMsg>(msgs, "selection");
  }

  async close(): Promise<void> {
    await this.transport.close();
  }
}
