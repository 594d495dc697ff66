export { parseCsv, column, CsvError } from "./csv.js";
export { freedmanDiaconisBins } from "./histogram.js";
export { encodePng, pngSize } from "./png.js";
export { Canvas, axisMap, fmtTick } from "./raster.js";
export { render, figureSpecSchema } from "./figure.js";
export type { FigureSpec, RenderReport } from "./figure.js";
