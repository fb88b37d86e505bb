/** Figure model and rendering: two log-x panels, one curve per ensemble.

The model keeps the plotted pixel coordinates alongside the source values so
tests can spot-check the data layer against the CSV without decoding pixels.
*/
import type { BenchRow } from "./csv.js";
import { CsvError } from "./csv.js";
import { Canvas, type Color } from "./raster.js";
import { textWidth } from "./font.js";

export interface PlottedPoint {
  n: number;
  value: number;
  x: number;
  y: number;
}

export interface Series {
  ensemble: string;
  color: Color;
  points: PlottedPoint[];
}

export interface Panel {
  title: string;
  left: number;
  top: number;
  width: number;
  height: number;
  yMax: number;
  yMin: number;
  logY: boolean;
  series: Series[];
  xTicks: { n: number; x: number; label: string }[];
  yTicks: { value: number; y: number; label: string }[];
}

export interface FigureModel {
  width: number;
  height: number;
  panels: [Panel, Panel];
  ensembles: string[];
}

const PALETTE: Color[] = [
  [31, 119, 180],
  [255, 127, 14],
  [44, 160, 44],
  [214, 39, 40],
  [148, 103, 189],
  [140, 86, 75],
];

const WIDTH = 960;
const HEIGHT = 400;
const MARGIN = { left: 70, right: 24, top: 36, bottom: 46 };
const GAP = 70;

function formatShots(n: number): string {
  const exp = Math.log10(n);
  if (Number.isInteger(exp)) return `1E${exp}`;
  return n.toPrecision(2).toUpperCase();
}

function formatValue(v: number): string {
  if (v === 0) return "0";
  return v.toPrecision(2).toUpperCase();
}

function buildPanel(
  rows: BenchRow[],
  ensembles: string[],
  metric: (r: BenchRow) => number,
  title: string,
  left: number,
  top: number,
  width: number,
  height: number,
  logY: boolean,
): Panel {
  const ns = [...new Set(rows.map((r) => r.n))].sort((a, b) => a - b);
  const lo = Math.log10(ns[0]);
  const hi = Math.log10(ns[ns.length - 1]);
  const span = hi > lo ? hi - lo : 1;
  const xOf = (n: number) => left + ((Math.log10(n) - lo) / span) * width;

  const values = rows.map(metric);
  const vMax = Math.max(...values);
  const vMinPositive = Math.min(...values.filter((v) => v > 0), vMax || 1);
  const yMax = logY ? vMax * 1.6 : (vMax || 1) * 1.08;
  const yMin = logY ? vMinPositive / 1.6 : 0;
  const yOf = (v: number) => {
    if (logY) {
      const t = (Math.log10(Math.max(v, yMin)) - Math.log10(yMin)) / (Math.log10(yMax) - Math.log10(yMin));
      return top + height - t * height;
    }
    return top + height - ((v - yMin) / (yMax - yMin)) * height;
  };

  const series: Series[] = ensembles.map((ensemble, i) => {
    const mine = rows
      .filter((r) => r.ensemble === ensemble)
      .sort((a, b) => a.n - b.n);
    return {
      ensemble,
      color: PALETTE[i % PALETTE.length],
      points: mine.map((r) => ({ n: r.n, value: metric(r), x: xOf(r.n), y: yOf(metric(r)) })),
    };
  });

  const xTicks = ns.map((n) => ({ n, x: xOf(n), label: formatShots(n) }));
  const yTicks = [] as Panel["yTicks"];
  const tickCount = 5;
  for (let i = 0; i <= tickCount; i++) {
    const v = logY
      ? 10 ** (Math.log10(yMin) + (i / tickCount) * (Math.log10(yMax) - Math.log10(yMin)))
      : yMin + (i / tickCount) * (yMax - yMin);
    yTicks.push({ value: v, y: yOf(v), label: formatValue(v) });
  }
  return { title, left, top, width, height, yMax, yMin, logY, series, xTicks, yTicks };
}

export function buildFigure(rows: BenchRow[], logY = false): FigureModel {
  if (rows.length === 0) {
    throw new CsvError("no rows to plot");
  }
  const ensembles = [...new Set(rows.map((r) => r.ensemble))];
  const panelWidth = (WIDTH - MARGIN.left - MARGIN.right - GAP - MARGIN.left) / 2;
  const panelHeight = HEIGHT - MARGIN.top - MARGIN.bottom;
  const p1 = buildPanel(
    rows, ensembles, (r) => r.meanAbsError, "MEAN ABS ERROR",
    MARGIN.left, MARGIN.top, panelWidth, panelHeight, logY,
  );
  const p2 = buildPanel(
    rows, ensembles, (r) => r.stdAbsError, "STD OF ABS ERROR",
    MARGIN.left + panelWidth + GAP + MARGIN.left, MARGIN.top, panelWidth, panelHeight, logY,
  );
  return { width: WIDTH, height: HEIGHT, panels: [p1, p2], ensembles };
}

const BLACK: Color = [0, 0, 0];
const GREY: Color = [200, 200, 200];

export function renderFigure(model: FigureModel): Canvas {
  const canvas = new Canvas(model.width, model.height);
  for (const panel of model.panels) {
    const { left, top, width, height } = panel;
    // grid + ticks
    for (const t of panel.yTicks) {
      canvas.line(left, t.y, left + width, t.y, GREY);
      canvas.text(left - textWidth(t.label) - 6, t.y - 3, t.label, BLACK);
    }
    for (const t of panel.xTicks) {
      canvas.line(t.x, top, t.x, top + height, GREY);
      canvas.text(t.x - textWidth(t.label) / 2, top + height + 8, t.label, BLACK);
    }
    // frame
    canvas.line(left, top, left + width, top, BLACK);
    canvas.line(left, top + height, left + width, top + height, BLACK);
    canvas.line(left, top, left, top + height, BLACK);
    canvas.line(left + width, top, left + width, top + height, BLACK);
    // titles and axis label
    canvas.text(left + width / 2 - textWidth(panel.title) / 2, top - 16, panel.title, BLACK);
    const xlabel = "N (LOG SCALE)";
    canvas.text(left + width / 2 - textWidth(xlabel) / 2, top + height + 22, xlabel, BLACK);
    // curves
    for (const s of panel.series) {
      for (let i = 1; i < s.points.length; i++) {
        canvas.line(s.points[i - 1].x, s.points[i - 1].y, s.points[i].x, s.points[i].y, s.color, 2);
      }
      for (const p of s.points) {
        canvas.marker(p.x, p.y, s.color);
      }
    }
  }
  // legend, top-right of the second panel
  const legendPanel = model.panels[1];
  let ly = legendPanel.top + 8;
  for (const s of legendPanel.series) {
    const lx = legendPanel.left + legendPanel.width - 150;
    canvas.line(lx, ly + 3, lx + 18, ly + 3, s.color, 3);
    canvas.text(lx + 24, ly, s.ensemble.toUpperCase(), BLACK);
    ly += 12;
  }
  return canvas;
}
