"""Socket host for live sessions: one port, two framings, one JSON schema.

Native clients speak 4-byte big-endian length-prefixed UTF-8 JSON frames.
Browser clients connect with an HTTP Upgrade on the same port and speak
RFC 6455 WebSocket text frames carrying the identical messages. The framing
is sniffed from the first bytes of each connection.

Threading: one reader thread per client only enqueues inbound messages; the
tick thread is the sole writer anywhere. It drains the queue at each tick
boundary (replies included), advances the session, and broadcasts the
snapshot, so no client ever observes a half-applied change.
"""

from __future__ import annotations

import base64
import hashlib
import json
import socket
import struct
import threading
import time
import traceback
from collections import deque
from typing import Any, Optional

from .scenario import ScenarioConfig
from .service import SessionState, apply_client_message

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"
_MAX_FRAME = 1 << 22  # 4 MiB; scenario documents are the largest legal payload


def _recv_exact(sock: socket.socket, n: int) -> Optional[bytes]:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


class _Client:
    """One connection; `websocket` picks the wire framing for both directions."""

    _ids = iter(range(1, 1 << 62))

    def __init__(self, sock: socket.socket, websocket: bool):
        self.sock = sock
        self.websocket = websocket
        self.alive = True
        self.id = next(_Client._ids)

    def send_json(self, payload: dict[str, Any]) -> None:
        data = json.dumps(payload, separators=(",", ":")).encode("utf-8")
        if self.websocket:
            header = bytearray([0x81])  # FIN + text opcode
            if len(data) < 126:
                header.append(len(data))
            elif len(data) < 1 << 16:
                header.append(126)
                header += struct.pack(">H", len(data))
            else:
                header.append(127)
                header += struct.pack(">Q", len(data))
            self.sock.sendall(bytes(header) + data)
        else:
            self.sock.sendall(struct.pack(">I", len(data)) + data)

    def send_pong(self, payload: bytes) -> None:
        if self.websocket:
            self.sock.sendall(bytes([0x8A, len(payload)]) + payload)

    def close(self) -> None:
        self.alive = False
        try:
            self.sock.close()
        except OSError:
            pass

    def recv_event(self) -> tuple[str, Any]:
        """Next wire event: ("text", str), ("ping", bytes), or ("closed", None)."""
        if not self.websocket:
            header = _recv_exact(self.sock, 4)
            if header is None:
                return "closed", None
            (length,) = struct.unpack(">I", header)
            if length > _MAX_FRAME:
                return "closed", None
            body = _recv_exact(self.sock, length)
            if body is None:
                return "closed", None
            return "text", body.decode("utf-8")
        # WebSocket: skip non-data control frames, unmask payloads.
        while True:
            head = _recv_exact(self.sock, 2)
            if head is None:
                return "closed", None
            fin_opcode, mask_len = head
            opcode = fin_opcode & 0x0F
            masked = bool(mask_len & 0x80)
            length = mask_len & 0x7F
            if length == 126:
                ext = _recv_exact(self.sock, 2)
                if ext is None:
                    return "closed", None
                (length,) = struct.unpack(">H", ext)
            elif length == 127:
                ext = _recv_exact(self.sock, 8)
                if ext is None:
                    return "closed", None
                (length,) = struct.unpack(">Q", ext)
            if length > _MAX_FRAME:
                return "closed", None
            mask = _recv_exact(self.sock, 4) if masked else b"\x00" * 4
            if mask is None:
                return "closed", None
            payload = _recv_exact(self.sock, length) if length else b""
            if payload is None:
                return "closed", None
            if masked:
                payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
            if opcode == 0x8:  # close
                return "closed", None
            if opcode == 0x9:  # ping: answered by the writer thread
                return "ping", payload
            if opcode in (0x1, 0x2):
                return "text", payload.decode("utf-8")
            # continuation/pong/reserved: ignore


def _websocket_handshake(sock: socket.socket, initial: bytes) -> bool:
    """Complete the HTTP Upgrade; `initial` holds bytes already read."""
    request = initial
    while b"\r\n\r\n" not in request:
        chunk = sock.recv(4096)
        if not chunk:
            return False
        request += chunk
        if len(request) > 65536:
            return False
    key = None
    for line in request.split(b"\r\n"):
        if line.lower().startswith(b"sec-websocket-key:"):
            key = line.split(b":", 1)[1].strip().decode("ascii")
    if key is None:
        return False
    accept = base64.b64encode(
        hashlib.sha1((key + _WS_GUID).encode("ascii")).digest()
    ).decode("ascii")
    sock.sendall(
        (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
        ).encode("ascii")
    )
    return True


class ServiceServer:
    """Hosts one SessionState on a TCP port; snapshots stream at tick rate."""

    def __init__(self, cfg: ScenarioConfig, port: int = 0, host: str = "127.0.0.1"):
        self.session = SessionState(cfg)
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self._listener.listen(16)
        self.host, self.port = self._listener.getsockname()
        self._clients: list[_Client] = []
        self._inbox: deque[tuple[str, _Client, Any]] = deque()
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self._last_snapshot: Optional[dict[str, Any]] = None

    # -- threads ---------------------------------------------------------

    def start(self) -> None:
        for target in (self._accept_loop, self._tick_loop):
            thread = threading.Thread(target=target, daemon=True)
            thread.start()
            self._threads.append(thread)

    def serve_forever(self) -> None:
        self.start()
        try:
            while not self._stop.is_set():
                time.sleep(0.2)
        except KeyboardInterrupt:
            pass
        finally:
            self.stop()

    def stop(self) -> None:
        self._stop.set()
        try:
            self._listener.close()
        except OSError:
            pass
        with self._lock:
            clients = list(self._clients)
        for client in clients:
            client.close()
        for thread in self._threads:
            thread.join(timeout=2.0)

    def _accept_loop(self) -> None:
        while not self._stop.is_set():
            try:
                sock, _addr = self._listener.accept()
            except OSError:
                return
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            threading.Thread(
                target=self._handshake_and_read, args=(sock,), daemon=True
            ).start()

    def _handshake_and_read(self, sock: socket.socket) -> None:
        # Sniff the framing. WebSocket clients always open with an HTTP
        # request; native clients may connect silently just to subscribe, so
        # after a short quiet period the connection is treated as native.
        websocket = False
        sock.settimeout(0.5)
        try:
            first = sock.recv(4, socket.MSG_PEEK)
            if not first:
                sock.close()
                return
            websocket = first.startswith(b"GET"[: len(first)])
        except socket.timeout:
            pass
        except OSError:
            sock.close()
            return
        sock.settimeout(None)
        if websocket:
            try:
                preamble = sock.recv(4096)
            except OSError:
                sock.close()
                return
            if not _websocket_handshake(sock, preamble):
                sock.close()
                return
            client = _Client(sock, websocket=True)
        else:
            client = _Client(sock, websocket=False)
        with self._lock:
            self._inbox.append(("join", client, None))
        while not self._stop.is_set():
            try:
                kind, payload = client.recv_event()
            except OSError:
                break
            if kind == "closed":
                break
            if kind == "ping":
                with self._lock:
                    self._inbox.append(("pong", client, payload))
                continue
            try:
                msg = json.loads(payload)
            except json.JSONDecodeError:
                msg = {"type": "__malformed__"}
            if not isinstance(msg, dict):
                msg = {"type": "__malformed__"}
            with self._lock:
                self._inbox.append(("message", client, msg))
        with self._lock:
            self._inbox.append(("leave", client, None))

    def _tick_loop(self) -> None:
        interval = self.session.engine.dt
        next_deadline = time.monotonic()
        while not self._stop.is_set():
            try:
                self._drain_inbox()
                snapshot = self.session.tick_and_snapshot()
                if snapshot is not None:
                    self._last_snapshot = snapshot
                    self._broadcast(snapshot)
            except Exception:  # keep serving; a dead silent loop is worse
                traceback.print_exc()
            next_deadline += interval
            delay = next_deadline - time.monotonic()
            if delay > 0:
                self._stop.wait(delay)
            else:
                next_deadline = time.monotonic()  # fell behind; do not spiral

    def _drain_inbox(self) -> None:
        while True:
            with self._lock:
                if not self._inbox:
                    return
                kind, client, payload = self._inbox.popleft()
            if kind == "join":
                with self._lock:
                    self._clients.append(client)
                if self._last_snapshot is not None:
                    self._safe_send(client, self._last_snapshot)
            elif kind == "leave":
                with self._lock:
                    if client in self._clients:
                        self._clients.remove(client)
                client.close()
            elif kind == "pong":
                try:
                    client.send_pong(payload or b"")
                except OSError:
                    pass
            elif kind == "message":
                if payload.get("type") == "__malformed__":
                    reply = {
                        "type": "error",
                        "schema_version": "1",
                        "id": None,
                        "reason": "malformed JSON",
                    }
                else:
                    reply = apply_client_message(self.session, payload)
                self._safe_send(client, reply)

    def _broadcast(self, snapshot: dict[str, Any]) -> None:
        with self._lock:
            clients = list(self._clients)
        for client in clients:
            self._safe_send(client, snapshot)

    def _safe_send(self, client: _Client, payload: dict[str, Any]) -> None:
        try:
            client.send_json(payload)
        except OSError:
            with self._lock:
                if client in self._clients:
                    self._clients.remove(client)
            client.close()
