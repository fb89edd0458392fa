export { readCsv, column, requireColumns, PlotInputError } from "./csv.js";
export { render, densityOverlay, chargeSeries, covarianceHeatmap, convergencePlot } from "./figures.js";
export type { FigureSpec } from "./figures.js";
export { loadSpec } from "./cli.js";
