/** End-to-end: the overlay's tinted ids must equal the engine's
 * selection trace at every timestamp, and the composed tile diffs must
 * equal the engine's canvas. */

import { copyFile, mkdtemp, readFile, writeFile } from "node:fs/promises";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { OverlayState } from "../src/overlay.js";
import { SessionClient } from "../src/session.js";
import { StrokeRecorder } from "../src/strokes.js";
import { TileCompositor } from "../src/tiles.js";
import { TcpTransport } from "../src/transport.js";
import { Engine, REPO_ROOT, runCli, startEngine } from "./engine.js";

let engine: Engine;

beforeAll(async () => {
  engine = await startEngine();
}, 60_000);

afterAll(async () => {
  await engine?.stop();
});

describe("overlay fidelity and tile composition", () => {
  it("tinted ids follow the engine trace; composed tiles equal the canvas", async () => {
    const dir = await mkdtemp(join(tmpdir(), "smudge-ui-"));
    await copyFile(
      join(REPO_ROOT, "tests", "fixtures", "cross_band", "canvas.png"),
      join(dir, "canvas.png"),
    );
    const params = { stroke_width: 40, theta: 12 };
    const transport = await TcpTransport.connect(engine.host, engine.port);
    const client = new SessionClient(transport);
    await client.setParams(params);
    const info = await client.openCanvas(join(dir, "canvas.png"));
    const seg = await client.segment("flat");
    expect(seg.regions).toBe(3);

    const overlay = new OverlayState();
    overlay.setLabels(seg.labels, info.width, info.height);
    const compositor = new TileCompositor(info.width, info.height, info.pixels);
    const recorder = new StrokeRecorder();

    const path: Array<[number, number]> = [];
    for (let i = 0; i < 27; i++) path.push([40 + 8 * i, 128]);

    const tintedPerT: number[][] = [];
    const sel0 = await client.beginStroke("ss", recorder.begin("ss", path[0][0], path[0][1], 0));
    overlay.update(sel0);
    tintedPerT.push([...overlay.tintedIds()]);
    for (let i = 1; i < path.length; i++) {
      const sample = recorder.move(path[i][0], path[i][1], i * 8);
      const res = await client.strokeSample(sample!);
      compositor.applyDiff(res.diff);
      overlay.update(res.selection);
      tintedPerT.push([...overlay.tintedIds()]);
      // the live overlay endpoint agrees with the last selection push
      const now = await client.getOverlay();
      expect(now.selected).toEqual(res.selection.selected);
    }
    recorder.end();
    await client.endStroke();

    // composed diffs equal the engine's canvas: round-trip via export
    const exported = join(dir, "ui_export.png");
    await client.exportPng(exported);
    const check = await client.openCanvas(exported);
    expect(compositor.equals(check.pixels)).toBe(true);

    // replay the exported script and compare the per-timestamp trace
    const script = recorder.exportScript("canvas.png", params);
    await writeFile(join(dir, "script.json"), JSON.stringify(script, null, 1));
    const trace = join(dir, "trace.jsonl");
    const res = await runCli([
      "replay", join(dir, "script.json"), "--out", join(dir, "cli.png"), "--trace", trace,
    ]);
    expect(res.code, res.stderr).toBe(0);
    const lines = (await readFile(trace, "utf-8"))
      .trim()
      .split("\n")
      .map((l) => JSON.parse(l) as { t: number; selected: number[] });
    expect(lines).toHaveLength(tintedPerT.length);
    lines.forEach((entry, t) => {
      expect(tintedPerT[t], `timestamp ${t}`).toEqual(entry.selected);
    });
    await client.close();
  }, 120_000);

  it("undo restores the composed view to the pre-stroke state", async () => {
    const dir = await mkdtemp(join(tmpdir(), "smudge-ui-"));
    await copyFile(
      join(REPO_ROOT, "tests", "fixtures", "boundary_follow", "canvas.png"),
      join(dir, "canvas.png"),
    );
    const transport = await TcpTransport.connect(engine.host, engine.port);
    const client = new SessionClient(transport);
    await client.setParams({ stroke_width: 30, theta: 10 });
    const info = await client.openCanvas(join(dir, "canvas.png"));
    const compositor = new TileCompositor(info.width, info.height, info.pixels);
    const before = Uint8Array.from(compositor.pixels);

    await client.beginStroke("bs", { x: 116, y: 60, t_ms: 0 });
    for (let i = 1; i < 8; i++) {
      const res = await client.strokeSample({ x: 116 + ((i % 2) * 24 - 12), y: 60 + i * 6, t_ms: i * 8 });
      compositor.applyDiff(res.diff);
    }
    await client.endStroke();
    expect(compositor.equals(before)).toBe(false);

    const undo = await client.undo();
    expect(undo.undone).toBe(true);
    compositor.applyDiff(undo.diff);
    expect(compositor.equals(before)).toBe(true);
    await client.close();
  }, 120_000);

  it("engine rejects parameter changes mid-stroke", async () => {
    const dir = await mkdtemp(join(tmpdir(), "smudge-ui-"));
    await copyFile(
      join(REPO_ROOT, "tests", "fixtures", "boundary_follow", "canvas.png"),
      join(dir, "canvas.png"),
    );
    const transport = await TcpTransport.connect(engine.host, engine.port);
    const client = new SessionClient(transport);
    await client.openCanvas(join(dir, "canvas.png"));
    await client.beginStroke("ss", { x: 20, y: 20, t_ms: 0 });
    await expect(client.setParams({ theta: 25 })).rejects.toThrow(/active stroke/);
    await client.endStroke();
    await client.setParams({ theta: 25 });
    await client.close();
  }, 120_000);
});
