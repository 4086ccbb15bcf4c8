/** Browser painting app.
 *
 * All pixel changes come from engine tile diffs; the UI only queues
 * pointer samples, composes diffs, and paints. Tool and parameter edits
 * apply at the next stroke (the engine rejects mid-stroke changes).
 */

import { OverlayState, OverlayMode } from "./overlay.js";
import { SampleMsg, Tool } from "./protocol.js";
import { SessionClient } from "./session.js";
import { StrokeRecorder, screenToCanvas } from "./strokes.js";
import { TileCompositor } from "./tiles.js";
import { HttpTransport } from "./transport.js";

const PARAM_FIELDS = ["alpha", "beta", "gamma", "theta", "strength", "stroke_width", "stroke_length"];

class App {
  client = new SessionClient(new HttpTransport(""));
  compositor: TileCompositor | null = null;
  overlay = new OverlayState();
  recorder = new StrokeRecorder();
  tool: Tool = "ss";
  params: Record<string, number> = {};
  canvasPath = "";
  transform = { zoom: 1, panX: 0, panY: 0 };
  pointerActive = false;
  queue: Promise<unknown> = Promise.resolve();

  el<T extends HTMLElement>(id: string): T {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node as T;
  }

  get viewCanvas(): HTMLCanvasElement {
    return this.el<HTMLCanvasElement>("view");
  }

  async open(path: string): Promise<void> {
    this.canvasPath = path;
    const info = await this.client.openCanvas(path);
    this.compositor = new TileCompositor(info.width, info.height, info.pixels);
    const seg = await this.client.segment("flat");
    this.overlay.setLabels(seg.labels, info.width, info.height);
    const view = this.viewCanvas;
    view.width = info.width;
    view.height = info.height;
    this.paint();
    this.status(`${path}: ${info.width}x${info.height}, ${seg.regions} regions`);
  }

  paint(): void {
    if (!this.compositor) return;
    const ctx = this.viewCanvas.getContext("2d");
    if (!ctx) return;
    const { width, height, pixels } = this.compositor;
    const frame = new Uint8ClampedArray(pixels); // copy: ImageData owns its buffer
    const image = new ImageData(frame, width, height);
    ctx.putImageData(image, 0, 0);
    const plane = this.overlay.render();
    if (plane.some((v) => v !== 0)) {
      const overlayImage = new ImageData(new Uint8ClampedArray(plane), width, height);
      const off = new OffscreenCanvas(width, height);
      const octx = off.getContext("2d");
      if (octx) {
        octx.putImageData(overlayImage, 0, 0);
        ctx.drawImage(off, 0, 0);
      }
    }
  }

  /** Serialize engine calls so samples arrive in order. */
  enqueue(task: () => Promise<void>): void {
    this.queue = this.queue.then(task).catch((err) => this.status(String(err)));
  }

  onPointerDown(ev: PointerEvent): void {
    if (!this.compositor || this.recorder.active) return;
    this.pointerActive = true;
    this.viewCanvas.setPointerCapture(ev.pointerId);
    const rect = this.viewCanvas.getBoundingClientRect();
    const pos = screenToCanvas(this.transform, ev.clientX - rect.left, ev.clientY - rect.top);
    const pressure = ev.pressure > 0 ? ev.pressure : undefined;
    const sample = this.recorder.begin(this.tool, pos.x, pos.y, ev.timeStamp, pressure);
    const tool = this.tool;
    this.enqueue(async () => {
      const sel = await this.client.beginStroke(tool, sample);
      this.overlay.update(sel);
      this.paint();
    });
  }

  onPointerMove(ev: PointerEvent): void {
    if (!this.pointerActive) return; // events after pointer-up are discarded
    const rect = this.viewCanvas.getBoundingClientRect();
    const pos = screenToCanvas(this.transform, ev.clientX - rect.left, ev.clientY - rect.top);
    const pressure = ev.pressure > 0 ? ev.pressure : undefined;
    const sample = this.recorder.move(pos.x, pos.y, ev.timeStamp, pressure);
    if (!sample) return;
    this.enqueue(async () => {
      const res = await this.client.strokeSample(sample);
      this.compositor?.applyDiff(res.diff);
      this.overlay.update(res.selection);
      this.paint();
    });
  }

  onPointerUp(): void {
    if (!this.pointerActive) return;
    this.pointerActive = false;
    this.recorder.end();
    this.enqueue(async () => {
      await this.client.endStroke();
    });
  }

  undo(): void {
    if (this.recorder.active) return;
    this.enqueue(async () => {
      const res = await this.client.undo();
      if (res.undone) {
        this.compositor?.applyDiff(res.diff);
        this.recorder.dropLast();
        this.paint();
        this.status("undone");
      }
    });
  }

  exportScript(): void {
    const script = this.recorder.exportScript(this.canvasPath, this.params);
    const blob = new Blob([JSON.stringify(script, null, 1)], { type: "application/json" });
    const a = document.createElement("a");
    a.href = URL.createObjectURL(blob);
    a.download = "strokes.json";
    a.click();
  }

  exportPng(): void {
    const path = prompt("export PNG to path", "export.png");
    if (!path) return;
    this.enqueue(async () => {
      await this.client.exportPng(path);
      this.status(`exported ${path}`);
    });
  }

  applyParams(): void {
    if (this.recorder.active) {
      this.status("finish the stroke before changing parameters");
      return;
    }
    const params: Record<string, number> = {};
    for (const name of PARAM_FIELDS) {
      const input = this.el<HTMLInputElement>(`param-${name}`);
      if (input.value !== "") params[name] = Number(input.value);
    }
    this.params = params;
    this.enqueue(async () => {
      await this.client.setParams(params);
      this.status("parameters applied");
    });
  }

  status(text: string): void {
    this.el<HTMLElement>("status").textContent = text;
  }

  wire(): void {
    const view = this.viewCanvas;
    view.addEventListener("pointerdown", (e) => this.onPointerDown(e));
    view.addEventListener("pointermove", (e) => this.onPointerMove(e));
    view.addEventListener("pointerup", () => this.onPointerUp());
    view.addEventListener("pointercancel", () => this.onPointerUp());
    this.el<HTMLButtonElement>("open").addEventListener("click", () => {
      const path = this.el<HTMLInputElement>("canvas-path").value;
      this.enqueue(() => this.open(path));
    });
    for (const tool of ["ss", "bs", "ts"] as Tool[]) {
      this.el<HTMLButtonElement>(`tool-${tool}`).addEventListener("click", () => {
        if (this.recorder.active) return;
        this.tool = tool;
        this.status(`tool: ${tool}`);
      });
    }
    this.el<HTMLButtonElement>("undo").addEventListener("click", () => this.undo());
    this.el<HTMLButtonElement>("apply-params").addEventListener("click", () => this.applyParams());
    this.el<HTMLButtonElement>("export-script").addEventListener("click", () => this.exportScript());
    this.el<HTMLButtonElement>("export-png").addEventListener("click", () => this.exportPng());
    this.el<HTMLSelectElement>("overlay-mode").addEventListener("change", (e) => {
      this.overlay.mode = (e.target as HTMLSelectElement).value as OverlayMode;
      this.paint();
    });
    window.addEventListener("keydown", (e) => {
      if ((e.ctrlKey || e.metaKey) && e.key === "z") {
        e.preventDefault();
        this.undo();
      } else if (e.key === "1") this.tool = "ss";
      else if (e.key === "2") this.tool = "bs";
      else if (e.key === "3") this.tool = "ts";
    });
  }
}

const app = new App();
app.wire();
(window as unknown as { app: App }).app = app;
