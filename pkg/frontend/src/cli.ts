#!/usr/bin/env node
/**
 * plots render --spec <file.json>
 * plots render <data.csv> --kind <kind> --out <fig.png> [--x col] [--y col,col]
 *              [--x-log] [--y-log] [--title text]
 */

import { readFileSync } from "node:fs";

import { figureSpecSchema, render, FigureSpec } from "./figure.js";

function fail(msg: string): never {
  process.stderr.write(`plots: ${msg}\n`);
  process.exit(1);
}

export function main(argv: string[]): number {
  if (argv[0] !== "render") {
    process.stderr.write("usage: plots render --spec <file> | plots render <csv> --kind <kind> --out <png>\n");
    return 1;
  }
  const args = argv.slice(1);
  let spec: FigureSpec;
  if (args[0] === "--spec") {
    if (!args[1]) fail("--spec needs a file path");
    let doc: unknown;
    try {
      doc = JSON.parse(readFileSync(args[1], "utf8"));
    } catch (e) {
      fail(`cannot read spec: ${(e as Error).message}`);
    }
    const check = figureSpecSchema.safeParse(doc);
    if (!check.success) fail(`invalid spec: ${check.error.issues[0].message}`);
    spec = check.data;
  } else {
    const input = args[0];
    if (!input || input.startsWith("--")) fail("positional CSV path required");
    const flags = new Map<string, string>();
    const bools = new Set<string>();
    for (let i = 1; i < args.length; i++) {
      if (args[i] === "--x-log" || args[i] === "--y-log") {
        bools.add(args[i]);
      } else if (args[i].startsWith("--")) {
        flags.set(args[i], args[i + 1] ?? "");
        i += 1;
      }
    }
    const kind = flags.get("--kind");
    const out = flags.get("--out");
    if (!kind || !out) fail("--kind and --out are required in positional mode");
    const doc: Record<string, unknown> = { input, kind, output: out };
    if (flags.has("--x")) doc.x = flags.get("--x");
    if (flags.has("--y")) doc.y = flags.get("--y")!.split(",");
    if (flags.has("--title")) doc.title = flags.get("--title");
    if (bools.has("--x-log")) doc.x_log = true;
    if (bools.has("--y-log")) doc.y_log = true;
    const check = figureSpecSchema.safeParse(doc);
    if (!check.success) fail(`invalid arguments: ${check.error.issues[0].message}`);
    spec = check.data;
  }
  try {
    const report = render(spec);
    process.stdout.write(
      `${report.output}: ${report.pointsDrawn} points from ${report.rows} rows\n`,
    );
    return 0;
  } catch (e) {
    fail((e as Error).message);
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
