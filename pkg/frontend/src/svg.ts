/** Minimal deterministic SVG plotting: panels with linear scales, axes,
 * polylines, scatter points and labels. No DOM, just strings. */

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

const fmt = (v: number): string => {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate ${v}`);
  return v.toFixed(2);
};

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
  "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
  "#98df8a", "#ff9896", "#c5b0d5", "#c49c94",
];

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => span / s <= count + 1) ?? mag * 10;
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += step) ticks.push(Number(v.toPrecision(12)));
  return ticks;
}

export class Panel {
  readonly parts: string[] = [];

  constructor(
    readonly box: Box,
    readonly xlim: [number, number],
    readonly ylim: [number, number],
  ) {
    if (!(xlim[1] > xlim[0]) || !(ylim[1] > ylim[0])) {
      throw new Error("panel limits must be increasing");
    }
  }

  px(x: number): number {
    return this.box.x + ((x - this.xlim[0]) / (this.xlim[1] - this.xlim[0])) * this.box.width;
  }

  py(y: number): number {
    return this.box.y + this.box.height
      - ((y - this.ylim[0]) / (this.ylim[1] - this.ylim[0])) * this.box.height;
  }

  line(xs: number[], ys: number[], stroke: string, width = 1.5, opacity = 1): void {
    if (xs.length !== ys.length) throw new Error("line: length mismatch");
    const pts = xs.map((x, i) => `${fmt(this.px(x))},${fmt(this.py(ys[i]))}`).join(" ");
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}" stroke-opacity="${opacity}"/>`,
    );
  }

  area(xs: number[], ys: number[], fill: string, opacity = 0.35): void {
    const base = this.py(Math.max(0, this.ylim[0]));
    const pts = [
      `${fmt(this.px(xs[0]))},${fmt(base)}`,
      ...xs.map((x, i) => `${fmt(this.px(x))},${fmt(this.py(ys[i]))}`),
      `${fmt(this.px(xs[xs.length - 1]))},${fmt(base)}`,
    ].join(" ");
    this.parts.push(`<polygon points="${pts}" fill="${fill}" fill-opacity="${opacity}" stroke="none"/>`);
  }

  dots(xs: number[], ys: number[], fill: string, r = 1.6, opacity = 0.6): void {
    for (let i = 0; i < xs.length; i++) {
      this.parts.push(
        `<circle cx="${fmt(this.px(xs[i]))}" cy="${fmt(this.py(ys[i]))}" r="${r}" fill="${fill}" fill-opacity="${opacity}"/>`,
      );
    }
  }

  hline(y: number, stroke: string, dash = "4 3"): void {
    this.parts.push(
      `<line x1="${fmt(this.box.x)}" y1="${fmt(this.py(y))}" x2="${fmt(this.box.x + this.box.width)}" y2="${fmt(this.py(y))}" stroke="${stroke}" stroke-dasharray="${dash}"/>`,
    );
  }

  axes(xlabel = "", ylabel = "", title = ""): void {
    const { x, y, width, height } = this.box;
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(width)}" height="${fmt(height)}" fill="none" stroke="#444"/>`,
    );
    for (const t of niceTicks(this.xlim[0], this.xlim[1])) {
      const tx = this.px(t);
      this.parts.push(
        `<line x1="${fmt(tx)}" y1="${fmt(y + height)}" x2="${fmt(tx)}" y2="${fmt(y + height + 4)}" stroke="#444"/>`,
        `<text x="${fmt(tx)}" y="${fmt(y + height + 16)}" font-size="10" text-anchor="middle" fill="#222">${t}</text>`,
      );
    }
    for (const t of niceTicks(this.ylim[0], this.ylim[1])) {
      const ty = this.py(t);
      this.parts.push(
        `<line x1="${fmt(x - 4)}" y1="${fmt(ty)}" x2="${fmt(x)}" y2="${fmt(ty)}" stroke="#444"/>`,
        `<text x="${fmt(x - 7)}" y="${fmt(ty + 3)}" font-size="10" text-anchor="end" fill="#222">${Number(t.toPrecision(6))}</text>`,
      );
    }
    if (xlabel) {
      this.parts.push(
        `<text x="${fmt(x + width / 2)}" y="${fmt(y + height + 32)}" font-size="11" text-anchor="middle" fill="#222">${xlabel}</text>`,
      );
    }
    if (ylabel) {
      const lx = x - 38;
      const ly = y + height / 2;
      this.parts.push(
        `<text x="${fmt(lx)}" y="${fmt(ly)}" font-size="11" text-anchor="middle" fill="#222" transform="rotate(-90 ${fmt(lx)} ${fmt(ly)})">${ylabel}</text>`,
      );
    }
    if (title) {
      this.parts.push(
        `<text x="${fmt(x + width / 2)}" y="${fmt(y - 8)}" font-size="12" text-anchor="middle" fill="#000">${title}</text>`,
      );
    }
  }
}

export function document(width: number, height: number, body: string[], footer = ""): string {
  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    ...body,
  ];
  if (footer) {
    parts.push(
      `<text x="10" y="${height - 8}" font-size="10" fill="#333">${footer}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n");
}
