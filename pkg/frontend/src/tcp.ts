// Node-side transport: a raw TCP connection to the runtime service.
// Used by headless drivers and tests; the browser build never imports
// this module.

import net from "node:net";

import { LineSplitter } from "./protocol.js";
import type { Transport } from "./client.js";

export class TcpTransport implements Transport {
  private sock: net.Socket;
  private splitter = new LineSplitter();
  private openCbs: Array<() => void> = [];
  private lineCbs: Array<(line: string) => void> = [];
  private closeCbs: Array<() => void> = [];

  constructor(host: string, port: number) {
    this.sock = net.createConnection({ host, port });
    this.sock.setNoDelay(true);
    // utf8 decoding on the socket keeps multi-byte runes whole across
    // chunk boundaries, so the splitter can work on text.
    this.sock.setEncoding("utf8");
    this.sock.on("connect", () => {
      for (const cb of this.openCbs) cb();
    });
    this.sock.on("data", (chunk: string) => {
      for (const line of this.splitter.push(chunk)) {
        for (const cb of this.lineCbs) cb(line);
      }
    });
    const closed = () => {
      for (const cb of this.closeCbs) cb();
      this.closeCbs = [];
    };
    this.sock.on("close", closed);
    this.sock.on("error", () => {
      // 'close' follows; the retry banner is the client's concern.
    });
  }

  send(line: string): void {
    this.sock.write(line);
  }

  onOpen(cb: () => void): void {
    this.openCbs.push(cb);
  }

  onLine(cb: (line: string) => void): void {
    this.lineCbs.push(cb);
  }

  onClose(cb: () => void): void {
    this.closeCbs.push(cb);
  }

  close(): void {
    this.sock.destroy();
  }
}
