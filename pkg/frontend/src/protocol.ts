/** Engine session protocol: message types and length-prefixed framing.
 *
 * Wire format: 4-byte big-endian payload length, then UTF-8 JSON.
 * Every request's response sequence ends with exactly one `ack` or
 * `error` frame.
 */

export type Tool = "ss" | "bs" | "ts";

export interface SampleMsg {
  x: number;
  y: number;
  t_ms: number;
  pressure?: number;
}

export interface TileMsg {
  x: number;
  y: number;
  w: number;
  h: number;
  /** base64 raw RGBA, row-major */
  pixels: string;
}

export interface TileDiffMsg {
  kind: "tile_diff";
  tiles: TileMsg[];
  clamped: boolean;
}

export interface SelectionMsg {
  kind: "selection";
  t: number;
  covered: number[];
  base: number[];
  selected: number[];
  scores: Record<string, number>;
}

export interface AckMsg {
  kind: "ack";
  [key: string]: unknown;
}

export interface ErrorMsg {
  kind: "error";
  message: string;
}

export type ResponseMsg = TileDiffMsg | SelectionMsg | AckMsg | ErrorMsg;

export type RequestMsg =
  | { kind: "open_canvas"; path: string }
  | { kind: "segment"; method: "flat" | "meanshift"; spatial_bandwidth?: number; color_bandwidth?: number; min_region?: number }
  | { kind: "set_params"; params: Record<string, number> }
  | { kind: "begin_stroke"; tool: Tool; sample: SampleMsg }
  | ({ kind: "stroke_sample" } & SampleMsg)
  | { kind: "end_stroke" }
  | { kind: "undo" }
  | { kind: "export"; path: string }
  | { kind: "get_overlay" };

export function isTerminator(msg: ResponseMsg): boolean {
  return msg.kind === "ack" || msg.kind === "error";
}

export function encodeFrame(msg: unknown): Uint8Array {
  const payload = new TextEncoder().encode(JSON.stringify(msg));
  const out = new Uint8Array(4 + payload.length);
  new DataView(out.buffer).setUint32(0, payload.length, false);
  out.set(payload, 4);
  return out;
}

/** Incremental frame parser over a growing byte stream. */
export class FrameDecoder {
  private buf = new Uint8Array(0);

  push(chunk: Uint8Array): ResponseMsg[] {
    const joined = new Uint8Array(this.buf.length + chunk.length);
    joined.set(this.buf, 0);
    joined.set(chunk, this.buf.length);
    this.buf = joined;
    const out: ResponseMsg[] = [];
    for (;;) {
      if (this.buf.length < 4) break;
      const len = new DataView(this.buf.buffer, this.buf.byteOffset).getUint32(0, false);
      if (this.buf.length < 4 + len) break;
      const body = this.buf.subarray(4, 4 + len);
      out.push(JSON.parse(new TextDecoder().decode(body)) as ResponseMsg);
      this.buf = this.buf.slice(4 + len);
    }
    return out;
  }
}

export function b64ToBytes(b64: string): Uint8Array {
  if (typeof atob === "function") {
    const bin = atob(b64);
    const out = new Uint8Array(bin.length);
    for (let i = 0; i < bin.length; i++) out[i] = bin.charCodeAt(i);
    return out;
  }
  // Node path
  return new Uint8Array(Buffer.from(b64, "base64"));
}
