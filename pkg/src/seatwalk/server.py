"""TCP wrapper around the runtime: newline-delimited JSON both ways.

One reader thread per client pushes parsed messages onto a queue; the
single tick thread drains the queue, applies each message, sends its
replies to the sender, and broadcasts tick output to every subscriber.
All runtime access stays on the tick thread, so the engine never needs
locks.  Pacing sleeps the tick thread to the configured rate; fast mode
skips the sleep for tests and batch drives.

Malformed lines get {"t":"err","code":"parse"} and never break the
loop; a slow or dead subscriber is dropped rather than stalling ticks.
"""

from __future__ import annotations

import json
import queue
import socket
import threading
import time
from typing import Dict, List, Optional, Tuple

from .runtime import Runtime

MAX_LINE = 1 << 20  # defensive cap on inbound line length


class _Client:
    def __init__(self, sock: socket.socket, addr):
        self.sock = sock
        self.addr = addr
        self.subscribed = False
        self.lock = threading.Lock()
        self.alive = True

    def send(self, messages: List[Dict]) -> None:
        if not messages or not self.alive:
            return
        data = "".join(json.dumps(m) + "\n" for m in messages).encode()
        try:
            with self.lock:
                self.sock.sendall(data)
        except OSError:
            self.alive = False


class TeachServer:
    def __init__(
        self,
        runtime: Runtime,
        host: str = "127.0.0.1",
        port: int = 0,
        fast: bool = False,
    ):
        self.runtime = runtime
        self.fast = fast
        self._listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._listener.bind((host, port))
        self.host, self.port = self._listener.getsockname()
        self._inbox: "queue.Queue[Tuple[_Client, Optional[Dict]]]" = queue.Queue()
        self._clients: List[_Client] = []
        self._clients_lock = threading.Lock()
        self._running = False
        self._accept_thread: Optional[threading.Thread] = None

    # -- threads -----------------------------------------------------------

    def start(self) -> None:
        self._running = True
        self._listener.listen()
        self._accept_thread = threading.Thread(target=self._accept_loop, daemon=True)
        self._accept_thread.start()

    def _accept_loop(self) -> None:
        while self._running:
            try:
                sock, addr = self._listener.accept()
            except OSError:
                return
            client = _Client(sock, addr)
            with self._clients_lock:
                self._clients.append(client)
            threading.Thread(
                target=self._read_loop, args=(client,), daemon=True
            ).start()

    def _read_loop(self, client: _Client) -> None:
        buf = b""
        while self._running and client.alive:
            try:
                chunk = client.sock.recv(4096)
            except OSError:
                break
            if not chunk:
                break
            buf += chunk
            if len(buf) > MAX_LINE:
                client.send([{"t": "err", "code": "parse"}])
                break
            while b"\n" in buf:
                line, buf = buf.split(b"\n", 1)
                if not line.strip():
                    continue
                try:
                    msg = json.loads(line)
                except ValueError:  # bad JSON or bad UTF-8
                    client.send([{"t": "err", "code": "parse"}])
                    continue
                self._inbox.put((client, msg))
        client.alive = False
        with self._clients_lock:
            if client in self._clients:
                self._clients.remove(client)

    # -- tick loop ---------------------------------------------------------

    def step(self) -> None:
        """Drain pending messages, then advance one tick."""
        while True:
            try:
                client, msg = self._inbox.get_nowait()
            except queue.Empty:
                break
            if msg is None or not isinstance(msg, dict):
                client.send([{"t": "err", "code": "parse"}])
                continue
            if msg.get("t") == "subscribe":
                client.subscribed = True
            client.send(self.runtime.handle_message(msg))
        events = self.runtime.tick()
        if events:
            with self._clients_lock:
                subscribers = [c for c in self._clients if c.subscribed and c.alive]
            for client in subscribers:
                client.send(events)

    def run_forever(self) -> None:
        period = self.runtime.config.dt
        next_tick = time.monotonic()
        while self._running:
            self.step()
            if self.fast:
                continue
            next_tick += period
            delay = next_tick - time.monotonic()
            if delay > 0:
                time.sleep(delay)
            else:
                next_tick = time.monotonic()  # fell behind; do not bunch ticks

    def stop(self) -> None:
        self._running = False
        # close() alone leaves a thread parked in accept() holding the
        # socket open; shutdown() wakes it so the port actually frees
        try:
            self._listener.shutdown(socket.SHUT_RDWR)
        except OSError:
            pass
        try:
            self._listener.close()
        except OSError:
            pass
        if self._accept_thread is not None:
            self._accept_thread.join(timeout=2.0)
        with self._clients_lock:
            clients = list(self._clients)
            self._clients.clear()
        for client in clients:
            client.alive = False
            try:
                client.sock.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            try:
                client.sock.close()
            except OSError:
                pass
