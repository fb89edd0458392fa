import { PlotInputError, Table, column, readCsv, requireColumns } from "./csv.js";
import {
  AXIS_STYLE,
  LABEL_TEXT,
  TICK_TEXT,
  TITLE_TEXT,
  Scale,
  axes,
  divergingColor,
  document,
  fnum,
  line,
  linScale,
  logScale,
  niceTicks,
  polyline,
  rect,
  text,
} from "./svg.js";

export interface FigureSpec {
  kind: "density_overlay" | "charge_series" | "covariance_heatmap" | "convergence";
  input: string;
  output: string;
  options?: {
    times?: number[];
    field?: string;
    band_rel?: number;
  };
}

const SERIES_STYLES: Record<string, string> = {
  rho_schrodinger: 'stroke="#1f3b99" stroke-width="1.8"',
  rho_forward: 'stroke="#d95f02" stroke-width="1.2" stroke-dasharray="5,3"',
  rho_backward: 'stroke="#1b9e77" stroke-width="1.2" stroke-dasharray="2,3"',
};

function uniqueSorted(values: number[]): number[] {
  return [...new Set(values)].sort((a, b) => a - b);
}

function pickPanelTimes(available: number[], wanted?: number[]): number[] {
  if (wanted && wanted.length > 0) {
    return wanted.map((t) => {
      let best = available[0];
      for (const a of available) if (Math.abs(a - t) < Math.abs(best - t)) best = a;
      return best;
    });
  }
  const n = available.length;
  const idx = n < 4 ? [...available.keys()] : [0, Math.round(n / 3), Math.round((2 * n) / 3), n - 1];
  return idx.map((i) => available[i]);
}

export function densityOverlay(table: Table, options: FigureSpec["options"] = {}): string {
  requireColumns(table, ["t", "x", "rho_schrodinger", "rho_forward", "rho_backward"]);
  const t = column(table, "t");
  const times = pickPanelTimes(uniqueSorted(t), options.times);
  const panelW = 290;
  const panelH = 210;
  const margin = { left: 62, top: 42, gapX: 34, gapY: 52 };
  const cols = 2;
  const rows = Math.ceil(times.length / cols);
  const width = margin.left + cols * panelW + (cols - 1) * margin.gapX + 20;
  const height = margin.top + rows * panelH + rows * margin.gapY + 8;

  const allRho = ["rho_schrodinger", "rho_forward", "rho_backward"].flatMap((c) => column(table, c));
  const yMax = Math.max(...allRho) * 1.08;
  const body: string[] = [];
  body.push(text(margin.left, 20, "density overlay: solver vs forward/backward ensembles", TITLE_TEXT));

  times.forEach((pt, p) => {
    const rowsAt = table.rows.filter((r) => r.t === pt);
    const px0 = margin.left + (p % cols) * (panelW + margin.gapX);
    const py0 = margin.top + Math.floor(p / cols) * (panelH + margin.gapY);
    const xs = rowsAt.map((r) => r.x);
    const sx = linScale([Math.min(...xs), Math.max(...xs)], [px0, px0 + panelW]);
    const sy = linScale([0, yMax], [py0 + panelH, py0]);
    body.push(...axes(sx, sy, { xLabel: "x", yLabel: p % cols === 0 ? "rho" : undefined }));
    for (const [col, style] of Object.entries(SERIES_STYLES)) {
      body.push(polyline(xs, rowsAt.map((r) => r[col]), sx, sy, style));
    }
    body.push(text(px0 + panelW / 2, py0 - 6, `t = ${fnum(pt)}`, `${LABEL_TEXT} text-anchor="middle"`));
  });

  const lx = margin.left;
  const ly = height - 14;
  let off = 0;
  for (const [col, style] of Object.entries(SERIES_STYLES)) {
    body.push(line(lx + off, ly - 4, lx + off + 26, ly - 4, style));
    body.push(text(lx + off + 32, ly, col, TICK_TEXT));
    off += 150;
  }
  return document(width, height, body);
}

export function chargeSeries(table: Table, options: FigureSpec["options"] = {}): string {
  requireColumns(table, ["t", "P", "H"]);
  const t = column(table, "t");
  const width = 640;
  const panelH = 190;
  const margin = { left: 78, top: 40, gap: 58 };
  const height = margin.top + 2 * panelH + margin.gap + 46;
  const body: string[] = [];
  body.push(text(margin.left, 20, "conserved charges along the run", TITLE_TEXT));

  (["P", "H"] as const).forEach((name, i) => {
    const v = column(table, name);
    const py0 = margin.top + i * (panelH + margin.gap);
    const lo = Math.min(...v);
    const hi = Math.max(...v);
    const pad = (hi - lo || Math.abs(hi) || 1) * 0.15;
    const sx = linScale([t[0], t[t.length - 1]], [margin.left, width - 24]);
    const sy = linScale([lo - pad, hi + pad], [py0 + panelH, py0]);
    body.push(...axes(sx, sy, { xLabel: i === 1 ? "t" : undefined, yLabel: name }));
    if (options.band_rel && name === "H") {
      const y1 = sy(v[0] * (1 + options.band_rel));
      const y2 = sy(v[0] * (1 - options.band_rel));
      body.push(rect(sx.range[0], Math.min(y1, y2), sx.range[1] - sx.range[0], Math.abs(y2 - y1) || 1, 'fill="#fde2c5" stroke="none"'));
    }
    body.push(polyline(t, v, sx, sy, 'stroke="#1f3b99" stroke-width="1.5"'));
    const drift = Math.max(...v.map((x) => Math.abs(x - v[0])));
    const rel = Math.abs(v[0]) > 0 ? drift / Math.abs(v[0]) : drift;
    body.push(
      text(width - 24, py0 - 6, `max drift ${rel.toExponential(2)} (relative)`, `${TICK_TEXT} text-anchor="end"`),
    );
  });
  return document(width, height, body);
}

export function covarianceHeatmap(table: Table, options: FigureSpec["options"] = {}): string {
  const field = options.field ?? "cov_sampled";
  requireColumns(table, ["i", "j", field]);
  const is = column(table, "i");
  const js = column(table, "j");
  const vs = column(table, field);
  const n = Math.max(...is) + 1;
  if (Math.max(...js) + 1 !== n || is.length !== n * n) {
    throw new PlotInputError(`covariance table in ${table.file} is not a full ${n}x${n} matrix`);
  }
  const cell = Math.max(18, Math.min(44, Math.floor(320 / n)));
  const left = 70;
  const top = 46;
  const size = n * cell;
  const width = left + size + 96;
  const height = top + size + 56;
  const vmax = Math.max(...vs.map(Math.abs)) || 1;
  const body: string[] = [];
  body.push(text(left, 20, `field covariance heatmap (${field})`, TITLE_TEXT));
  for (let k = 0; k < is.length; k++) {
    const x = left + js[k] * cell;
    const y = top + is[k] * cell;
    body.push(rect(x, y, cell, cell, `fill="${divergingColor(vs[k] / vmax)}" stroke="#ffffff" stroke-width="0.5"`));
  }
  for (let k = 0; k < n; k++) {
    body.push(text(left + k * cell + cell / 2, top + size + 14, String(k), `${TICK_TEXT} text-anchor="middle"`));
    body.push(text(left - 8, top + k * cell + cell / 2 + 3, String(k), `${TICK_TEXT} text-anchor="end"`));
  }
  body.push(text(left + size / 2, top + size + 32, "site j", `${LABEL_TEXT} text-anchor="middle"`));
  // color bar
  const bx = left + size + 28;
  const bh = size;
  const steps = 32;
  for (let s = 0; s < steps; s++) {
    const u = 1 - (2 * s) / (steps - 1);
    body.push(rect(bx, top + (s * bh) / steps, 16, bh / steps + 0.5, `fill="${divergingColor(u)}" stroke="none"`));
  }
  body.push(rect(bx, top, 16, bh, 'fill="none" stroke="#333" stroke-width="0.7"'));
  body.push(text(bx + 22, top + 8, `+${fnum(vmax)}`, TICK_TEXT));
  body.push(text(bx + 22, top + bh / 2 + 3, "0", TICK_TEXT));
  body.push(text(bx + 22, top + bh, `-${fnum(vmax)}`, TICK_TEXT));
  return document(width, height, body);
}

export function convergencePlot(table: Table): string {
  requireColumns(table, ["h", "euler_residual_max"]);
  const h = column(table, "h");
  const r = column(table, "euler_residual_max");
  const width = 460;
  const height = 340;
  const left = 84;
  const top = 48;
  const sx = logScale([Math.min(...h) / 1.3, Math.max(...h) * 1.3], [left, width - 30]);
  const sy = logScale([Math.min(...r) / 2.5, Math.max(...r) * 2.5], [height - 62, top]);
  const body: string[] = [];
  body.push(text(left, 20, "momentum-balance residual vs grid spacing", TITLE_TEXT));
  const decades = (lo: number, hi: number) => {
    const out: number[] = [];
    for (let e = Math.ceil(Math.log10(lo)); e <= Math.floor(Math.log10(hi)); e++) out.push(10 ** e);
    return out;
  };
  body.push(
    ...axes(sx, sy, {
      xLabel: "h",
      yLabel: "max residual",
      xTicks: decades(sx.domain[0], sx.domain[1]),
      yTicks: decades(sy.domain[0], sy.domain[1]),
      xTickFmt: (v) => `1e${Math.round(Math.log10(v))}`,
      yTickFmt: (v) => `1e${Math.round(Math.log10(v))}`,
    }),
  );
  // second-order reference through the finest point
  const iFine = h.indexOf(Math.min(...h));
  const ref = h.map((hv) => r[iFine] * (hv / h[iFine]) ** 2);
  body.push(polyline(h, ref, sx, sy, 'stroke="#999" stroke-width="1" stroke-dasharray="4,3"'));
  body.push(polyline(h, r, sx, sy, 'stroke="#d95f02" stroke-width="1.6"'));
  for (let k = 0; k < h.length; k++) {
    body.push(
      `<circle cx="${fnum(sx(h[k]))}" cy="${fnum(sy(r[k]))}" r="3.2" fill="#d95f02" stroke="#fff" stroke-width="0.8"/>`,
    );
  }
  body.push(text(width - 30, top + 10, "dashed: slope 2 reference", `${TICK_TEXT} text-anchor="end"`));
  return document(width, height, body);
}

export function render(spec: FigureSpec): string {
  const table = readCsv(spec.input);
  switch (spec.kind) {
    case "density_overlay":
      return densityOverlay(table, spec.options);
    case "charge_series":
      return chargeSeries(table, spec.options);
    case "covariance_heatmap":
      return covarianceHeatmap(table, spec.options);
    case "convergence":
      return convergencePlot(table);
    default:
      throw new PlotInputError(`unknown figure kind: ${(spec as FigureSpec).kind}`);
  }
}
