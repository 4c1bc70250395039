import { expect, test } from "vitest";

import {
  JOINT_IDS,
  LineSplitter,
  encode,
  parseServerLine,
} from "../src/protocol.js";
import { telemetry } from "./helpers.js";

test("encode terminates every message with one newline", () => {
  const line = encode({ t: "set_u", v: -8 });
  expect(line.endsWith("\n")).toBe(true);
  expect(line.split("\n").length).toBe(2);
  expect(JSON.parse(line)).toEqual({ t: "set_u", v: -8 });
});

test("simple server replies parse", () => {
  expect(parseServerLine('{"t": "ok"}')).toEqual({ t: "ok" });
  expect(parseServerLine('{"t": "done"}')).toEqual({ t: "done" });
  expect(parseServerLine('{"t": "fall"}')).toEqual({ t: "fall" });
  expect(parseServerLine('{"t": "err", "code": "no-motion"}')).toEqual({
    t: "err",
    code: "no-motion",
  });
  expect(
    parseServerLine('{"t": "err", "code": "parse", "detail": ["1:1: x"]}'),
  ).toEqual({ t: "err", code: "parse", detail: ["1:1: x"] });
  expect(parseServerLine('{"t": "transition", "i": 2, "thre": 51.3}')).toEqual({
    t: "transition",
    i: 2,
    thre: 51.3,
  });
  expect(parseServerLine('{"t": "thresholds", "values": [0.0, 51.3]}')).toEqual(
    { t: "thresholds", values: [0, 51.3] },
  );
});

test("telemetry parses with all thirteen joints", () => {
  const msg = telemetry(7, { state_i: 2, u: -4.5 });
  const parsed = parseServerLine(JSON.stringify(msg));
  expect(parsed).toEqual(msg);
  if (parsed?.t !== "telemetry") throw new Error("expected telemetry");
  expect(Object.keys(parsed.frame.cmd).length).toBe(JOINT_IDS.length);
});

test("malformed lines come back null instead of throwing", () => {
  const bad = [
    "not json",
    "42",
    "[1, 2]",
    "null",
    '{"no_t": 1}',
    '{"t": "mystery"}',
    '{"t": "err"}',
    '{"t": "transition", "i": 2}',
    '{"t": "transition", "i": "two", "thre": 0}',
    '{"t": "thresholds", "values": [1, "x"]}',
    '{"t": "telemetry", "tick": 1}',
  ];
  for (const line of bad) {
    expect(parseServerLine(line)).toBeNull();
  }
});

test("telemetry with a missing joint is rejected", () => {
  const msg = telemetry(1) as unknown as {
    frame: { cmd: Record<string, number> };
  };
  delete msg.frame.cmd["rK-y"];
  expect(parseServerLine(JSON.stringify(msg))).toBeNull();
});

test("telemetry with a short pose is rejected", () => {
  const msg = { ...telemetry(1), pose: [0, 0] };
  expect(parseServerLine(JSON.stringify(msg))).toBeNull();
});

test("splitter reassembles lines across every chunk boundary", () => {
  const payload = '{"t": "ok"}\n{"t": "done"}\n{"t": "fall"}\n';
  for (let cut = 0; cut <= payload.length; cut++) {
    const splitter = new LineSplitter();
    const lines = [
      ...splitter.push(payload.slice(0, cut)),
      ...splitter.push(payload.slice(cut)),
    ];
    expect(lines).toEqual(['{"t": "ok"}', '{"t": "done"}', '{"t": "fall"}']);
    expect(splitter.pending()).toBe("");
  }
});

test("splitter holds an unterminated tail and skips blank lines", () => {
  const splitter = new LineSplitter();
  expect(splitter.push('{"t": "ok"}\n\n  \n{"t": "do')).toEqual(['{"t": "ok"}']);
  expect(splitter.pending()).toBe('{"t": "do');
  expect(splitter.push('ne"}\n')).toEqual(['{"t": "done"}']);
  expect(splitter.pending()).toBe("");
});

test("splitter handles many lines in one chunk", () => {
  const splitter = new LineSplitter();
  const chunk = Array.from({ length: 50 }, (_, i) => `{"n": ${i}}`).join("\n") + "\n";
  const lines = splitter.push(chunk);
  expect(lines.length).toBe(50);
  expect(lines[49]).toBe('{"n": 49}');
});
