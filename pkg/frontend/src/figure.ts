/**
 * Figure rendering: one CSV in, one PNG out, plus a JSON sidecar with
 * the row/point counts so consumers can audit that nothing was dropped.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { z } from "zod";

import { column, parseCsv, Table } from "./csv.js";
import { freedmanDiaconisBins } from "./histogram.js";
import { encodePng } from "./png.js";
import { axisMap, BLACK, BLUE, Canvas, fmtTick, GRAY, LIGHT, RED, Rgb } from "./raster.js";

export const figureSpecSchema = z.object({
  input: z.string(),
  kind: z.enum(["bound_vs_empirical", "error_histogram", "n_sweep"]),
  output: z.string(),
  x: z.string().optional(),
  y: z.array(z.string()).min(1).optional(),
  x_label: z.string().optional(),
  y_label: z.string().optional(),
  x_log: z.boolean().optional(),
  y_log: z.boolean().optional(),
  title: z.string().optional(),
  width: z.number().int().min(160).max(4096).optional(),
  height: z.number().int().min(120).max(4096).optional(),
});

export type FigureSpec = z.infer<typeof figureSpecSchema>;

const KIND_DEFAULTS: Record<FigureSpec["kind"], Partial<FigureSpec>> = {
  bound_vs_empirical: { x: "M", y: ["empirical_prob", "u_bound"], y_log: true },
  n_sweep: { x: "n_walks", y: ["err_l1_mean", "err_sup_mean"], x_log: true, y_log: true },
  error_histogram: { y: ["err"] },
};

export interface RenderReport {
  output: string;
  rows: number;
  pointsDrawn: number;
}

const MARGIN = { left: 64, right: 16, top: 28, bottom: 44 };
const SERIES_COLORS: Rgb[] = [BLACK, RED, BLUE, GRAY];

function frame(canvas: Canvas, spec: FigureSpec) {
  const { left, right, top, bottom } = MARGIN;
  canvas.rect(0, 0, canvas.width - 1, canvas.height - 1, [255, 255, 255] as Rgb);
  canvas.line(left, canvas.height - bottom, canvas.width - right, canvas.height - bottom, BLACK);
  canvas.line(left, top, left, canvas.height - bottom, BLACK);
  if (spec.title) canvas.text(left, 8, spec.title, BLACK);
}

function plotArea(canvas: Canvas) {
  return {
    x0: MARGIN.left,
    x1: canvas.width - MARGIN.right,
    y0: canvas.height - MARGIN.bottom,
    y1: MARGIN.top,
  };
}

function drawAxes(
  canvas: Canvas,
  xm: ReturnType<typeof axisMap>,
  ym: ReturnType<typeof axisMap>,
  spec: FigureSpec,
) {
  const area = plotArea(canvas);
  for (const t of xm.ticks) {
    const px = xm.toPixel(t);
    canvas.line(px, area.y0, px, area.y0 + 4, BLACK);
    canvas.line(px, area.y0, px, area.y1, LIGHT);
    const label = fmtTick(t);
    canvas.text(px - 3 * label.length, area.y0 + 8, label, BLACK);
  }
  for (const t of ym.ticks) {
    const py = ym.toPixel(t);
    canvas.line(area.x0 - 4, py, area.x0, py, BLACK);
    canvas.line(area.x0, py, area.x1, py, LIGHT);
    const label = fmtTick(t);
    canvas.text(area.x0 - 6 - 6 * label.length, py - 3, label, BLACK);
  }
  if (spec.x_label) {
    canvas.text(
      (area.x0 + area.x1) / 2 - 3 * spec.x_label.length,
      canvas.height - 14,
      spec.x_label,
      BLACK,
    );
  }
  if (spec.y_label) canvas.text(4, 10, spec.y_label, BLACK);
}

function renderCurves(table: Table, spec: FigureSpec, canvas: Canvas): number {
  const xCol = column(table, spec.x!);
  const series = spec.y!.map((name) => column(table, name));
  const area = plotArea(canvas);

  const xs = xCol.values;
  const allY = series.flatMap((s) => s.values);
  if (allY.length === 0) throw new Error("no plottable values in the y columns");
  const xm = axisMap(Math.min(...xs), Math.max(...xs), area.x0, area.x1, !!spec.x_log);
  const positives = allY.filter((v) => v > 0);
  const yVals = spec.y_log ? positives : allY;
  if (yVals.length === 0) throw new Error("log y-axis with no positive values");
  const ym = axisMap(Math.min(...yVals), Math.max(...yVals), area.y0, area.y1, !!spec.y_log);

  frame(canvas, spec);
  drawAxes(canvas, xm, ym, spec);
  let drawn = 0;
  series.forEach((s, si) => {
    const color = SERIES_COLORS[si % SERIES_COLORS.length];
    let prev: [number, number] | null = null;
    for (let i = 0; i < s.values.length; i++) {
      const pos = xCol.rowIndex.indexOf(s.rowIndex[i]);
      if (pos < 0) {
        prev = null; // no x value on this row; the sidecar count exposes it
        continue;
      }
      const xv = xs[pos];
      const yv = s.values[i];
      if (spec.y_log && yv <= 0) {
        prev = null;
        continue;
      }
      const px = xm.toPixel(xv);
      const py = ym.toPixel(yv);
      if (prev) canvas.line(prev[0], prev[1], px, py, color);
      canvas.marker(px, py, color);
      drawn += 1;
      prev = [px, py];
    }
    canvas.text(area.x1 - 6 * spec.y![si].length, area.y1 + 10 * si, spec.y![si], color);
  });
  return drawn;
}

function renderHistogram(table: Table, spec: FigureSpec, canvas: Canvas): number {
  const data = column(table, spec.y![0]);
  const bins = freedmanDiaconisBins(data.values);
  const area = plotArea(canvas);
  const xm = axisMap(bins.edges[0], bins.edges[bins.edges.length - 1], area.x0, area.x1, false);
  const ym = axisMap(0, Math.max(...bins.counts), area.y0, area.y1, false);
  frame(canvas, spec);
  drawAxes(canvas, xm, ym, spec);
  for (let i = 0; i < bins.counts.length; i++) {
    const x0 = xm.toPixel(bins.edges[i]);
    const x1 = xm.toPixel(bins.edges[i + 1]);
    const y1 = ym.toPixel(bins.counts[i]);
    if (bins.counts[i] > 0) {
      canvas.rect(x0 + 1, y1, Math.max(x0 + 1, x1 - 1), area.y0 - 1, [120, 140, 200] as Rgb);
    }
  }
  return data.values.length;
}

export function render(spec: FigureSpec): RenderReport {
  const parsed = figureSpecSchema.parse(spec);
  const full: FigureSpec = { ...KIND_DEFAULTS[parsed.kind], ...parsed };
  const table = parseCsv(readFileSync(full.input, "utf8"));
  const canvas = new Canvas(full.width ?? 640, full.height ?? 420);

  const drawn =
    full.kind === "error_histogram"
      ? renderHistogram(table, full, canvas)
      : renderCurves(table, full, canvas);

  if (full.kind === "error_histogram" && drawn !== table.rows.length) {
    throw new Error(`histogram consumed ${drawn} of ${table.rows.length} rows`);
  }

  writeFileSync(full.output, encodePng(canvas.width, canvas.height, canvas.pixels));
  const report: RenderReport = {
    output: full.output,
    rows: table.rows.length,
    pointsDrawn: drawn,
  };
  writeFileSync(full.output + ".meta.json", JSON.stringify(report) + "\n");
  return report;
}
