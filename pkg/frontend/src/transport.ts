/** Transports that carry protocol messages to the engine.
 *
 * TcpTransport speaks the canonical length-prefixed channel (Node only;
 * used by the test suite and the static-server bridge). HttpTransport
 * lets the browser app POST messages to the bridge, which forwards them
 * over TCP; the payloads are the same JSON objects.
 */

import {
  FrameDecoder,
  RequestMsg,
  ResponseMsg,
  encodeFrame,
  isTerminator,
} from "./protocol.js";

export interface Transport {
  /** Send one request; resolve with its full response sequence. */
  request(msg: RequestMsg): Promise<ResponseMsg[]>;
  close(): Promise<void>;
}

export class TcpTransport implements Transport {
  private socket: import("node:net").Socket | null = null;
  private decoder = new FrameDecoder();
  private pending: ResponseMsg[] = [];
  private waiter: ((msgs: ResponseMsg[]) => void) | null = null;
  private failure: ((err: Error) => void) | null = null;
  private queue: Promise<unknown> = Promise.resolve();

  private constructor() {}

  static async connect(host: string, port: number): Promise<TcpTransport> {
    const net = await import("node:net");
    const t = new TcpTransport();
    await new Promise<void>((resolve, reject) => {
      const sock = net.createConnection({ host, port }, () => resolve());
      sock.on("error", (err) => {
        if (t.failure) t.failure(err as Error);
        reject(err);
      });
      sock.on("data", (chunk: Buffer) => t.onData(new Uint8Array(chunk)));
      t.socket = sock;
    });
    return t;
  }

  private onData(chunk: Uint8Array) {
    for (const msg of this.decoder.push(chunk)) {
      this.pending.push(msg);
      if (isTerminator(msg) && this.waiter) {
        const w = this.waiter;
        const msgs = this.pending;
        this.waiter = null;
        this.failure = null;
        this.pending = [];
        w(msgs);
      }
    }
  }

  request(msg: RequestMsg): Promise<ResponseMsg[]> {
    // serialize requests: the engine answers strictly in order
    const run = this.queue.then(
      () =>
        new Promise<ResponseMsg[]>((resolve, reject) => {
          if (!this.socket) {
            reject(new Error("transport closed"));
            return;
          }
          this.waiter = resolve;
          this.failure = reject;
          this.socket.write(encodeFrame(msg));
        }),
    );
    this.queue = run.catch(() => undefined);
    return run;
  }

  async close(): Promise<void> {
    this.socket?.end();
    this.socket?.destroy();
    this.socket = null;
  }
}

export class HttpTransport implements Transport {
  constructor(private baseUrl: string) {}

  async request(msg: RequestMsg): Promise<ResponseMsg[]> {
    const resp = await fetch(`${this.baseUrl}/message`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(msg),
    });
    if (!resp.ok) {
      throw new Error(`bridge error ${resp.status}`);
    }
    return (await resp.json()) as ResponseMsg[];
  }

  async close(): Promise<void> {}
}
