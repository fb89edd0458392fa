/** Minimal deterministic SVG builder: fixed number formatting, no
 * timestamps, no randomness — identical inputs give identical bytes. */

export function fnum(x: number): string {
  if (x === 0) return "0";
  if (!Number.isFinite(x)) return "0";
  const s = x.toPrecision(6);
  return s.includes("e") ? s : s.replace(/\.?0+$/, "");
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const f = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const inner = linScale([Math.log10(domain[0]), Math.log10(domain[1])], range);
  const f = ((v: number) => inner(Math.log10(v))) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

/** Round ticks covering [min, max]: 1/2/5 ladder, like every plotting kit. */
export function niceTicks(min: number, max: number, count = 5): number[] {
  if (min === max) return [min];
  const span = max - min;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = (span / count) / step0;
  const step = step0 * (err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1);
  const lo = Math.ceil(min / step) * step;
  const out: number[] = [];
  for (let v = lo; v <= max + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

export function polyline(xs: number[], ys: number[], sx: Scale, sy: Scale, style: string): string {
  const pts = xs.map((x, i) => `${fnum(sx(x))},${fnum(sy(ys[i]))}`).join(" ");
  return `<polyline fill="none" ${style} points="${pts}"/>`;
}

export function text(x: number, y: number, s: string, style = ""): string {
  return `<text x="${fnum(x)}" y="${fnum(y)}" ${style}>${esc(s)}</text>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, style: string): string {
  return `<line x1="${fnum(x1)}" y1="${fnum(y1)}" x2="${fnum(x2)}" y2="${fnum(y2)}" ${style}/>`;
}

export function rect(x: number, y: number, w: number, h: number, style: string): string {
  return `<rect x="${fnum(x)}" y="${fnum(y)}" width="${fnum(w)}" height="${fnum(h)}" ${style}/>`;
}

export interface AxisOpts {
  xLabel?: string;
  yLabel?: string;
  xTicks?: number[];
  yTicks?: number[];
  xTickFmt?: (v: number) => string;
  yTickFmt?: (v: number) => string;
}

export const AXIS_STYLE = 'stroke="#333" stroke-width="1"';
export const TICK_TEXT = 'font-family="Helvetica,sans-serif" font-size="10" fill="#333"';
export const LABEL_TEXT = 'font-family="Helvetica,sans-serif" font-size="12" fill="#111"';
export const TITLE_TEXT = 'font-family="Helvetica,sans-serif" font-size="13" fill="#111" font-weight="bold"';

/** Frame + ticks + labels for one panel; returns SVG fragments. */
export function axes(sx: Scale, sy: Scale, opts: AxisOpts): string[] {
  const [x0, x1] = sx.range;
  const [y0, y1] = sy.range; // y0 is the bottom (larger pixel value)
  const parts: string[] = [];
  parts.push(line(x0, y0, x1, y0, AXIS_STYLE));
  parts.push(line(x0, y0, x0, y1, AXIS_STYLE));
  const xf = opts.xTickFmt ?? fnum;
  const yf = opts.yTickFmt ?? fnum;
  for (const v of opts.xTicks ?? niceTicks(sx.domain[0], sx.domain[1])) {
    const px = sx(v);
    parts.push(line(px, y0, px, y0 + 4, AXIS_STYLE));
    parts.push(text(px, y0 + 14, xf(v), `${TICK_TEXT} text-anchor="middle"`));
  }
  for (const v of opts.yTicks ?? niceTicks(sy.domain[0], sy.domain[1])) {
    const py = sy(v);
    parts.push(line(x0 - 4, py, x0, py, AXIS_STYLE));
    parts.push(text(x0 - 6, py + 3, yf(v), `${TICK_TEXT} text-anchor="end"`));
  }
  if (opts.xLabel) {
    parts.push(text((x0 + x1) / 2, y0 + 30, opts.xLabel, `${LABEL_TEXT} text-anchor="middle"`));
  }
  if (opts.yLabel) {
    const px = x0 - 42;
    const py = (y0 + y1) / 2;
    parts.push(
      `<text x="${fnum(px)}" y="${fnum(py)}" ${LABEL_TEXT} text-anchor="middle" transform="rotate(-90 ${fnum(px)} ${fnum(py)})">${esc(opts.yLabel)}</text>`,
    );
  }
  return parts;
}

/** Diverging blue-white-red map for u in [-1, 1]. */
export function divergingColor(u: number): string {
  const t = Math.max(-1, Math.min(1, u));
  const ch = (a: number, b: number, s: number) => Math.round(a + (b - a) * s);
  let r: number, g: number, b: number;
  if (t < 0) {
    r = ch(33, 247, 1 + t);
    g = ch(102, 247, 1 + t);
    b = ch(172, 247, 1 + t);
  } else {
    r = ch(247, 178, t);
    g = ch(247, 24, t);
    b = ch(247, 43, t);
  }
  return `rgb(${r},${g},${b})`;
}

export function document(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect x="0" y="0" width="${width}" height="${height}" fill="#ffffff"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
