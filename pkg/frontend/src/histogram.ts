/** Freedman-Diaconis histogram binning. */

export interface Bins {
  edges: number[]; // length nBins + 1
  counts: number[];
}

function quantile(sorted: number[], q: number): number {
  const pos = (sorted.length - 1) * q;
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo);
}

export function freedmanDiaconisBins(values: number[]): Bins {
  if (values.length === 0) throw new Error("cannot bin an empty sample");
  const sorted = [...values].sort((a, b) => a - b);
  const min = sorted[0];
  const max = sorted[sorted.length - 1];
  const iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  let width = (2 * iqr) / Math.cbrt(sorted.length);
  let nBins: number;
  if (width <= 0 || max === min) {
    nBins = 1;
    width = max > min ? max - min : 1;
  } else {
    nBins = Math.max(1, Math.min(512, Math.ceil((max - min) / width)));
  }
  const span = max - min || width;
  const edges = Array.from({ length: nBins + 1 }, (_, i) => min + (span * i) / nBins);
  const counts = new Array<number>(nBins).fill(0);
  for (const v of values) {
    const idx = Math.min(nBins - 1, Math.floor(((v - min) / span) * nBins));
    counts[idx] += 1;
  }
  return { edges, counts };
}
