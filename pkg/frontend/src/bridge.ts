// Browser-to-TCP bridge.  A browser cannot open a raw socket, so this
// process pipes the runtime service's line protocol verbatim: every
// line from the TCP side fans out to /events subscribers as one SSE
// event, and every POST /send body goes up the socket untouched.  The
// only other routes serve the panel's static files.

import http from "node:http";
import net from "node:net";
import path from "node:path";
import { readFile } from "node:fs/promises";
import { fileURLToPath } from "node:url";
import { parseArgs } from "node:util";

import { LineSplitter } from "./protocol.js";

const RETRY_MS = 1000;

const CONTENT_TYPES: Record<string, string> = {
  ".html": "text/html; charset=utf-8",
  ".js": "text/javascript; charset=utf-8",
  ".css": "text/css; charset=utf-8",
  ".json": "application/json",
  ".svg": "image/svg+xml",
};

interface Upstream {
  write(line: string): boolean;
}

function startUpstream(
  host: string,
  port: number,
  onLine: (line: string) => void,
  onDrop: () => void,
): Upstream {
  let sock: net.Socket | null = null;

  const connect = () => {
    const splitter = new LineSplitter();
    const s = net.createConnection({ host, port });
    s.setNoDelay(true);
    s.setEncoding("utf8");
    s.on("connect", () => {
      sock = s;
    });
    s.on("data", (chunk: string) => {
      for (const line of splitter.push(chunk)) onLine(line);
    });
    s.on("error", () => {
      // close follows
    });
    s.on("close", () => {
      if (sock === s) {
        sock = null;
        onDrop();
      }
      setTimeout(connect, RETRY_MS);
    });
  };
  connect();

  return {
    write(line: string): boolean {
      if (sock === null) return false;
      sock.write(line.endsWith("\n") ? line : line + "\n");
      return true;
    },
  };
}

function readBody(req: http.IncomingMessage): Promise<string> {
  return new Promise((resolve, reject) => {
    let body = "";
    req.setEncoding("utf8");
    req.on("data", (chunk: string) => {
      body += chunk;
    });
    req.on("end", () => resolve(body));
    req.on("error", reject);
  });
}

async function serveStatic(
  root: string,
  urlPath: string,
  res: http.ServerResponse,
): Promise<void> {
  const rel = urlPath === "/" ? "index.html" : urlPath.slice(1);
  const file = path.normalize(path.join(root, rel));
  const type = CONTENT_TYPES[path.extname(file)];
  if (!file.startsWith(root) || type === undefined) {
    res.writeHead(404).end();
    return;
  }
  try {
    const data = await readFile(file);
    res.writeHead(200, { "Content-Type": type }).end(data);
  } catch {
    res.writeHead(404).end();
  }
}

function main(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      server: { type: "string", default: "127.0.0.1:7471" },
      host: { type: "string", default: "127.0.0.1" },
      port: { type: "string", default: "8080" },
    },
  });
  const [upHost, upPortText] = (values.server as string).split(":");
  const upPort = Number(upPortText);
  if (!Number.isInteger(upPort)) {
    console.error(`bad --server address: ${values.server as string}`);
    process.exit(2);
  }

  const subscribers = new Set<http.ServerResponse>();
  const upstream = startUpstream(
    upHost,
    upPort,
    (line) => {
      for (const res of subscribers) res.write(`data: ${line}\n\n`);
    },
    () => {
      // Ending the streams surfaces the drop in every panel; the
      // browser's EventSource reconnects on its own.
      for (const res of subscribers) res.end();
      subscribers.clear();
    },
  );

  const root = path.dirname(path.dirname(fileURLToPath(import.meta.url)));
  const server = http.createServer((req, res) => {
    const url = req.url ?? "/";
    if (req.method === "GET" && url === "/events") {
      res.writeHead(200, {
        "Content-Type": "text/event-stream",
        "Cache-Control": "no-cache",
        Connection: "keep-alive",
      });
      res.write(": connected\n\n");
      subscribers.add(res);
      req.on("close", () => subscribers.delete(res));
      return;
    }
    if (req.method === "POST" && url === "/send") {
      void readBody(req).then(
        (body) => res.writeHead(upstream.write(body) ? 204 : 503).end(),
        () => res.writeHead(400).end(),
      );
      return;
    }
    if (req.method === "GET") {
      void serveStatic(root, url.split("?")[0], res);
      return;
    }
    res.writeHead(405).end();
  });

  server.listen(Number(values.port), values.host as string, () => {
    const addr = server.address();
    if (addr !== null && typeof addr === "object") {
      console.log(`panel on http://${addr.address}:${addr.port}`);
    }
  });
}

main(process.argv.slice(2));
