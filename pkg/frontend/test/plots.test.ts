import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { column, CsvError, parseCsv } from "../src/csv.js";
import { freedmanDiaconisBins } from "../src/histogram.js";
import { encodePng, pngSize } from "../src/png.js";
import { render } from "../src/figure.js";
import { main } from "../src/cli.js";

const dir = mkdtempSync(join(tmpdir(), "plots-"));

function testOneCsv(name: string, text: string): string {
  const p = join(dir, name);
  writeFileSync(p, text);
  return p;
}

const TEST1_CSV =
  "d,M,epsilon,empirical_prob,u_bound,stderr\n" +
  [400, 450, 500, 550, 600].map(
    (m, i) => `20,${m},0.001,${0.08 / (i + 1)},${0.9 / (i + 1)},0.001`,
  ).join("\n") + "\n";

const SWEEP_CSV =
  "n_walks,err_l1_mean,err_sup_mean,err_l1_std,err_sup_std\n" +
  "100,0.31,0.9,0.01,0.02\n1000,0.1,0.3,0.004,0.01\n10000,0.033,0.1,0.001,0.004\n";

describe("csv", () => {
  it("parses the solver schema", () => {
    const t = parseCsv(TEST1_CSV);
    expect(t.header).toEqual(["d", "M", "epsilon", "empirical_prob", "u_bound", "stderr"]);
    expect(t.rows).toHaveLength(5);
    expect(column(t, "M").values).toEqual([400, 450, 500, 550, 600]);
  });

  it("keeps blank cells out of numeric columns", () => {
    const t = parseCsv("a,b\n1,\n2,5\n");
    const { values, rowIndex } = column(t, "b");
    expect(values).toEqual([5]);
    expect(rowIndex).toEqual([1]);
  });

  it("rejects empty input and unknown columns", () => {
    expect(() => parseCsv("")).toThrow(CsvError);
    expect(() => parseCsv("a,b\n")).toThrow(/no data rows/);
    expect(() => column(parseCsv("a\n1\n"), "zz")).toThrow(/missing column/);
    expect(() => parseCsv("a,b\n1\n")).toThrow(/cells/);
  });
});

describe("freedman-diaconis", () => {
  it("bins a uniform sample with the expected count law", () => {
    const n = 1000;
    const vals = Array.from({ length: n }, (_, i) => i / n);
    const bins = freedmanDiaconisBins(vals);
    // IQR ~ 0.5, width ~ 1/cbrt(n) -> ~10 bins for n = 1000 (the exact
    // count sits on a ceil boundary, so allow either side)
    expect(bins.counts.length).toBeGreaterThanOrEqual(10);
    expect(bins.counts.length).toBeLessThanOrEqual(11);
    expect(bins.counts.reduce((a, b) => a + b, 0)).toBe(n);
  });

  it("handles constant samples", () => {
    const bins = freedmanDiaconisBins([2, 2, 2]);
    expect(bins.counts).toEqual([3]);
  });
});

describe("png", () => {
  it("round-trips the header and is deterministic", () => {
    const rgb = new Uint8Array(4 * 3 * 3).fill(7);
    const a = encodePng(4, 3, rgb);
    const b = encodePng(4, 3, rgb);
    expect(Buffer.compare(Buffer.from(a), Buffer.from(b))).toBe(0);
    expect(pngSize(a)).toEqual({ width: 4, height: 3 });
  });

  it("rejects wrong buffer sizes", () => {
    expect(() => encodePng(2, 2, new Uint8Array(5))).toThrow();
  });
});

describe("render", () => {
  it("bound-vs-empirical draws every row of both curves", () => {
    const input = testOneCsv("t1.csv", TEST1_CSV);
    const output = join(dir, "t1.png");
    const report = render({ input, kind: "bound_vs_empirical", output });
    expect(report.rows).toBe(5);
    expect(report.pointsDrawn).toBe(10); // two curves
    const png = readFileSync(output);
    expect(pngSize(png).width).toBe(640);
    const meta = JSON.parse(readFileSync(output + ".meta.json", "utf8"));
    expect(meta.rows).toBe(5);
  });

  it("n-sweep renders on a log axis", () => {
    const input = testOneCsv("t2.csv", SWEEP_CSV);
    const output = join(dir, "t2.png");
    const report = render({ input, kind: "n_sweep", output });
    expect(report.pointsDrawn).toBe(6);
  });

  it("histogram consumes every row", () => {
    const rows = Array.from({ length: 200 }, (_, i) => `0,${i},${(i % 17) / 10}`);
    const input = testOneCsv("h.csv", "replica,point,err\n" + rows.join("\n") + "\n");
    const output = join(dir, "h.png");
    const report = render({ input, kind: "error_histogram", output });
    expect(report.pointsDrawn).toBe(200);
    expect(report.rows).toBe(200);
  });

  it("is byte-deterministic", () => {
    const input = testOneCsv("det.csv", SWEEP_CSV);
    const o1 = join(dir, "d1.png");
    const o2 = join(dir, "d2.png");
    render({ input, kind: "n_sweep", output: o1 });
    render({ input, kind: "n_sweep", output: o2 });
    expect(Buffer.compare(readFileSync(o1), readFileSync(o2))).toBe(0);
  });

  it("fails on missing columns and empty csv", () => {
    const input = testOneCsv("bad.csv", "a,b\n1,2\n");
    expect(() =>
      render({ input, kind: "n_sweep", output: join(dir, "x.png") }),
    ).toThrow(/missing column/);
    const empty = testOneCsv("empty.csv", "");
    expect(() =>
      render({ input: empty, kind: "n_sweep", output: join(dir, "y.png") }),
    ).toThrow(/empty CSV/);
  });
});

describe("cli", () => {
  it("renders from a spec file", () => {
    const input = testOneCsv("c.csv", SWEEP_CSV);
    const output = join(dir, "c.png");
    const spec = join(dir, "spec.json");
    writeFileSync(spec, JSON.stringify({ input, kind: "n_sweep", output }));
    expect(main(["render", "--spec", spec])).toBe(0);
    expect(pngSize(readFileSync(output)).height).toBe(420);
  });

  it("renders in positional mode", () => {
    const input = testOneCsv("p.csv", TEST1_CSV);
    const output = join(dir, "p.png");
    expect(
      main(["render", input, "--kind", "bound_vs_empirical", "--out", output, "--title", "tail"]),
    ).toBe(0);
  });
});
