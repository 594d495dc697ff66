/**
 * Tiny software rasterizer: RGB pixel buffer with lines, bars, markers,
 * a 5x7 bitmap font, and linear/log axis mapping with ticks.
 */

export type Rgb = [number, number, number];

export const BLACK: Rgb = [0, 0, 0];
export const RED: Rgb = [200, 30, 30];
export const GRAY: Rgb = [150, 150, 150];
export const LIGHT: Rgb = [230, 230, 230];
export const BLUE: Rgb = [40, 70, 180];

// 5x7 glyphs for [0-9a-z .+-_%|], each row a 5-bit pattern, MSB left
const FONT: Record<string, number[]> = {
  "0": [14, 17, 19, 21, 25, 17, 14], "1": [4, 12, 4, 4, 4, 4, 14],
  "2": [14, 17, 1, 2, 4, 8, 31], "3": [30, 1, 1, 14, 1, 1, 30],
  "4": [2, 6, 10, 18, 31, 2, 2], "5": [31, 16, 30, 1, 1, 17, 14],
  "6": [6, 8, 16, 30, 17, 17, 14], "7": [31, 1, 2, 4, 8, 8, 8],
  "8": [14, 17, 17, 14, 17, 17, 14], "9": [14, 17, 17, 15, 1, 2, 12],
  a: [0, 0, 14, 1, 15, 17, 15], b: [16, 16, 30, 17, 17, 17, 30],
  c: [0, 0, 14, 16, 16, 17, 14], d: [1, 1, 15, 17, 17, 17, 15],
  e: [0, 0, 14, 17, 31, 16, 14], f: [6, 9, 8, 28, 8, 8, 8],
  g: [0, 15, 17, 17, 15, 1, 14], h: [16, 16, 22, 25, 17, 17, 17],
  i: [4, 0, 12, 4, 4, 4, 14], j: [2, 0, 6, 2, 2, 18, 12],
  k: [16, 16, 18, 20, 24, 20, 18], l: [12, 4, 4, 4, 4, 4, 14],
  m: [0, 0, 26, 21, 21, 21, 21], n: [0, 0, 22, 25, 17, 17, 17],
  o: [0, 0, 14, 17, 17, 17, 14], p: [0, 30, 17, 17, 30, 16, 16],
  q: [0, 15, 17, 17, 15, 1, 1], r: [0, 0, 22, 25, 16, 16, 16],
  s: [0, 0, 15, 16, 14, 1, 30], t: [8, 8, 28, 8, 8, 9, 6],
  u: [0, 0, 17, 17, 17, 19, 13], v: [0, 0, 17, 17, 17, 10, 4],
  w: [0, 0, 17, 17, 21, 21, 10], x: [0, 0, 17, 10, 4, 10, 17],
  y: [0, 17, 17, 15, 1, 17, 14], z: [0, 0, 31, 2, 4, 8, 31],
  ".": [0, 0, 0, 0, 0, 12, 12], "-": [0, 0, 0, 14, 0, 0, 0],
  "+": [0, 4, 4, 31, 4, 4, 0], _: [0, 0, 0, 0, 0, 0, 31],
  " ": [0, 0, 0, 0, 0, 0, 0], "%": [25, 26, 2, 4, 8, 11, 19],
  "|": [4, 4, 4, 4, 4, 4, 4],
};

export class Canvas {
  readonly width: number;
  readonly height: number;
  readonly pixels: Uint8Array;

  constructor(width: number, height: number) {
    this.width = width;
    this.height = height;
    this.pixels = new Uint8Array(width * height * 3).fill(255);
  }

  set(x: number, y: number, c: Rgb): void {
    x = Math.round(x);
    y = Math.round(y);
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const k = (y * this.width + x) * 3;
    this.pixels[k] = c[0];
    this.pixels[k + 1] = c[1];
    this.pixels[k + 2] = c[2];
  }

  line(x0: number, y0: number, x1: number, y1: number, c: Rgb): void {
    // DDA; good enough for axis-aligned and chart segments
    const steps = Math.max(Math.abs(x1 - x0), Math.abs(y1 - y0), 1);
    for (let i = 0; i <= steps; i++) {
      const t = i / steps;
      this.set(x0 + (x1 - x0) * t, y0 + (y1 - y0) * t, c);
    }
  }

  rect(x0: number, y0: number, x1: number, y1: number, c: Rgb): void {
    for (let y = Math.min(y0, y1); y <= Math.max(y0, y1); y++) {
      this.line(x0, y, x1, y, c);
    }
  }

  marker(x: number, y: number, c: Rgb): void {
    for (let dx = -1; dx <= 1; dx++) {
      for (let dy = -1; dy <= 1; dy++) this.set(x + dx, y + dy, c);
    }
  }

  text(x: number, y: number, s: string, c: Rgb): void {
    let cx = x;
    for (const raw of s.toLowerCase()) {
      const glyph = FONT[raw] ?? FONT[" "];
      for (let r = 0; r < 7; r++) {
        for (let b = 0; b < 5; b++) {
          if ((glyph[r] >> (4 - b)) & 1) this.set(cx + b, y + r, c);
        }
      }
      cx += 6;
    }
  }
}

export interface AxisMap {
  toPixel(v: number): number;
  ticks: number[];
}

export function axisMap(
  lo: number,
  hi: number,
  pixLo: number,
  pixHi: number,
  log: boolean,
): AxisMap {
  if (log && (lo <= 0 || hi <= 0)) {
    throw new Error("log axis requires positive data");
  }
  if (lo === hi) {
    lo = log ? lo / 2 : lo - 1;
    hi = log ? hi * 2 : hi + 1;
  }
  const a = log ? Math.log10(lo) : lo;
  const b = log ? Math.log10(hi) : hi;
  const toPixel = (v: number) => {
    const t = ((log ? Math.log10(v) : v) - a) / (b - a);
    return pixLo + t * (pixHi - pixLo);
  };
  let ticks: number[];
  if (log) {
    ticks = [];
    for (let e = Math.ceil(a); e <= Math.floor(b); e++) ticks.push(10 ** e);
    if (ticks.length < 2) ticks = [lo, hi];
  } else {
    const span = b - a;
    const step = 10 ** Math.floor(Math.log10(span / 4));
    const mult = span / step > 20 ? 5 : span / step > 8 ? 2 : 1;
    ticks = [];
    const s = step * mult;
    for (let v = Math.ceil(a / s) * s; v <= b + 1e-12 * span; v += s) ticks.push(v);
  }
  return { toPixel, ticks };
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const e = Math.floor(Math.log10(a));
    const m = v / 10 ** e;
    const mm = Math.round(m * 10) / 10;
    return `${mm}e${e >= 0 ? "+" : ""}${e}`;
  }
  return `${Math.round(v * 1e4) / 1e4}`;
}
