"""Session protocol: length-prefixed JSON messages.

Each frame is a 4-byte big-endian payload length followed by a UTF-8
JSON object. Requests map to ordered response lists; the same handler
serves the TCP channel and in-process embedding.

Requests:
  open_canvas {path}                     -> ack {width, height, pixels_b64}
  segment {method, ...bandwidths}        -> ack {regions, labels_b64, rep_colors}
  set_params {params}                    -> ack {params}
  begin_stroke {tool, sample}            -> selection, ack
  stroke_sample {x, y, t_ms, pressure?}  -> tile_diff, selection, ack
  end_stroke {}                          -> ack {record, ...stats}
  undo {}                                -> tile_diff, ack {undone}
  export {path}                          -> ack {path}
  get_overlay {}                         -> selection, ack

Responses: tile_diff {tiles: [{x, y, w, h, pixels}], clamped},
selection {t, covered, base, selected, scores}, ack {...}, error {message}.
Tile pixels are base64 raw RGBA, row-major. Every request's response
sequence terminates with exactly one ack or error frame, so stream
clients can read until the terminator.
"""

from __future__ import annotations

import base64
import json
import socketserver
import struct

from .config import Params
from .engine import AdvanceResult, SmudgeSession, Tile
from .raster import load_png, save_png

_LEN = struct.Struct(">I")
MAX_FRAME = 64 * 1024 * 1024


def write_frame(stream, msg: dict) -> None:
    payload = json.dumps(msg, separators=(",", ":")).encode("utf-8")
    stream.write(_LEN.pack(len(payload)) + payload)
    stream.flush()


def read_frame(stream) -> dict | None:
    header = _read_exact(stream, 4)
    if header is None:
        return None
    (n,) = _LEN.unpack(header)
    if n > MAX_FRAME:
        raise ValueError(f"frame of {n} bytes exceeds limit")
    payload = _read_exact(stream, n)
    if payload is None:
        raise ValueError("truncated frame")
    return json.loads(payload.decode("utf-8"))


def _read_exact(stream, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = stream.read(n - len(buf))
        if not chunk:
            if buf:
                raise ValueError("truncated frame")
            return None
        buf += chunk
    return buf


def _b64(data: bytes) -> str:
    return base64.b64encode(data).decode("ascii")


def _tiles_msg(tiles: list[Tile], clamped: bool = False) -> dict:
    return {
        "kind": "tile_diff",
        "tiles": [
            {"x": t.x, "y": t.y, "w": t.w, "h": t.h, "pixels": _b64(t.pixels)}
            for t in tiles
        ],
        "clamped": clamped,
    }


def _selection_msg(session: SmudgeSession, scores: dict | None = None) -> dict:
    ts = session.targets
    if scores is None:
        scores = session.trace[-1]["candidate_scores"] if session.trace else {}
    return {
        "kind": "selection",
        "t": ts.t,
        "covered": sorted(ts.covered),
        "base": sorted(ts.base),
        "selected": sorted(ts.selected),
        "scores": scores,
    }


class SessionService:
    """Direct-call protocol handler around one SmudgeSession."""

    def __init__(self, params: Params | None = None):
        self.params = params or Params()
        self.session: SmudgeSession | None = None

    def handle(self, msg: dict) -> list[dict]:
        kind = msg.get("kind")
        handler = getattr(self, f"_on_{kind}", None)
        if handler is None:
            return [{"kind": "error", "message": f"unknown request kind {kind!r}"}]
        try:
            return handler(msg)
        except (ValueError, RuntimeError, OSError) as exc:
            return [{"kind": "error", "message": str(exc)}]

    def _need_session(self) -> SmudgeSession:
        if self.session is None:
            raise RuntimeError("no canvas open")
        return self.session

    def _on_open_canvas(self, msg: dict) -> list[dict]:
        canvas = load_png(msg["path"])
        self.session = SmudgeSession(canvas, params=self.params)
        return [
            {
                "kind": "ack",
                "width": canvas.width,
                "height": canvas.height,
                "pixels_b64": _b64(canvas.pixels.tobytes()),
            }
        ]

    def _on_segment(self, msg: dict) -> list[dict]:
        session = self._need_session()
        kwargs = {
            k: msg[k]
            for k in ("spatial_bandwidth", "color_bandwidth", "min_region")
            if k in msg
        }
        session.resegment(msg.get("method", "flat"), **kwargs)
        labels = session.rmap.labels
        if len(session.rmap) > 0xFFFF:
            raise ValueError("too many regions for 16-bit overlay labels")
        return [
            {
                "kind": "ack",
                "regions": len(session.rmap),
                "labels_b64": _b64(labels.astype("<u2").tobytes()),
                "rep_colors": [list(r.representative_color) for r in session.rmap.regions],
            }
        ]

    def _on_set_params(self, msg: dict) -> list[dict]:
        params = self.params.merged(msg.get("params", {}))
        if self.session is not None:
            self.session.set_params(params)
        self.params = params
        return [{"kind": "ack", "params": params.to_dict()}]

    def _on_begin_stroke(self, msg: dict) -> list[dict]:
        session = self._need_session()
        res = session.begin_stroke(msg["tool"], _sample_from(msg["sample"]))
        return [
            _selection_msg(session, res.trace["candidate_scores"]),
            {"kind": "ack", "clamped": res.clamped},
        ]

    def _on_stroke_sample(self, msg: dict) -> list[dict]:
        session = self._need_session()
        res: AdvanceResult = session.smudge_advance(_sample_from(msg))
        return [
            _tiles_msg(res.tiles, res.clamped),
            _selection_msg(session, res.trace["candidate_scores"]),
            {"kind": "ack", "stamps": res.stamps, "clamped": res.clamped},
        ]

    def _on_end_stroke(self, msg: dict) -> list[dict]:
        session = self._need_session()
        rec = session.end_stroke()
        return [
            {
                "kind": "ack",
                "record": rec.to_script_stroke(),
                "stamps": rec.stamps,
                "ever_selected": sorted(rec.ever_selected),
                "pixels_changed_outside_selection": rec.pixels_changed_outside_selection,
            }
        ]

    def _on_undo(self, msg: dict) -> list[dict]:
        session = self._need_session()
        undone, tiles = session.undo()
        return [_tiles_msg(tiles), {"kind": "ack", "undone": undone}]

    def _on_export(self, msg: dict) -> list[dict]:
        session = self._need_session()
        save_png(session.canvas, msg["path"])
        return [{"kind": "ack", "path": msg["path"]}]

    def _on_get_overlay(self, msg: dict) -> list[dict]:
        session = self._need_session()
        return [_selection_msg(session), {"kind": "ack"}]


def _sample_from(d: dict):
    from .stroke import StrokeSample

    return StrokeSample(
        x=float(d["x"]),
        y=float(d["y"]),
        t_ms=float(d.get("t_ms", 0.0)),
        pressure=None if d.get("pressure") is None else float(d["pressure"]),
    )


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        service = SessionService(params=self.server.base_params)  # type: ignore[attr-defined]
        while True:
            try:
                msg = read_frame(self.rfile)
            except (ValueError, ConnectionError):
                break
            if msg is None:
                break
            for resp in service.handle(msg):
                write_frame(self.wfile, resp)


class SessionServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, host: str = "127.0.0.1", port: int = 0, params: Params | None = None):
        super().__init__((host, port), _Handler)
        self.base_params = params or Params()

    @property
    def address(self) -> tuple[str, int]:
        return self.server_address[:2]


def serve(host: str = "127.0.0.1", port: int = 0, params: Params | None = None) -> None:
    """Run the TCP session server until interrupted."""
    with SessionServer(host, port, params) as server:
        bound = server.address
        print(f"listening on {bound[0]}:{bound[1]}", flush=True)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
