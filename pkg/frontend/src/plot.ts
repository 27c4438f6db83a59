/**
 * Small multi-panel plotting engine over the software raster: linear and
 * log10 scales, 1-2-5 tick placement, polyline series with NaN gaps,
 * scatter markers (solid / open for censored), per-panel legends.
 */

import {
  BLACK,
  Color,
  GREY,
  LIGHT_GREY,
  Raster,
  WHITE,
} from "./raster.js";
import { textWidth } from "./font.js";

export type ScaleKind = "linear" | "log";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  color: Color;
  lineWidth?: number;
}

export interface MarkerPoint {
  x: number;
  y: number;
  open: boolean; // open ring = censored / flagged point
}

export interface PanelSpec {
  title: string;
  xKind?: ScaleKind;
  yKind?: ScaleKind;
  xLabel?: string;
  yLabel?: string;
  series: Series[];
  markers?: { points: MarkerPoint[]; color: Color; radius?: number };
  note?: string; // shown when there is nothing finite to draw
}

interface Rect {
  x: number;
  y: number;
  w: number;
  h: number;
}

interface Scale {
  kind: ScaleKind;
  lo: number;
  hi: number;
  p0: number;
  p1: number;
}

function mapValue(s: Scale, v: number): number {
  const t =
    s.kind === "log"
      ? (Math.log10(v) - Math.log10(s.lo)) / (Math.log10(s.hi) - Math.log10(s.lo))
      : (v - s.lo) / (s.hi - s.lo);
  return s.p0 + t * (s.p1 - s.p0);
}

function finite(values: number[]): number[] {
  return values.filter((v) => Number.isFinite(v));
}

function dataExtent(spec: PanelSpec, axis: "x" | "y", kind: ScaleKind): [number, number] | null {
  let values: number[] = [];
  for (const s of spec.series) {
    const xs = s.x;
    const ys = s.y;
    for (let i = 0; i < xs.length; i++) {
      if (Number.isFinite(xs[i]) && Number.isFinite(ys[i])) {
        values.push(axis === "x" ? xs[i] : ys[i]);
      }
    }
  }
  for (const m of spec.markers?.points ?? []) {
    if (Number.isFinite(m.x) && Number.isFinite(m.y)) {
      values.push(axis === "x" ? m.x : m.y);
    }
  }
  if (kind === "log") {
    values = values.filter((v) => v > 0);
  }
  if (values.length === 0) return null;
  let lo = Math.min(...values);
  let hi = Math.max(...values);
  if (kind === "log") {
    if (lo === hi) {
      lo /= 2;
      hi *= 2;
    }
    return [lo, hi];
  }
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    return [lo - pad, hi + pad];
  }
  const pad = (hi - lo) * 0.06;
  return [lo - pad, hi + pad];
}

function linearTicks(lo: number, hi: number, target = 5): number[] {
  const span = hi - lo;
  const rawStep = span / target;
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = power;
  for (const mult of [1, 2, 5, 10]) {
    if (power * mult >= rawStep) {
      step = power * mult;
      break;
    }
  }
  const first = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = first; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo) - 1e-9); e <= Math.floor(Math.log10(hi) + 1e-9); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length === 0) {
    ticks.push(lo, hi);
  }
  return ticks;
}

/** Unlabeled m*10^e positions between the decade ticks of a log axis. */
function logMinorTicks(lo: number, hi: number): number[] {
  const minors: number[] = [];
  for (let e = Math.floor(Math.log10(lo)); e <= Math.ceil(Math.log10(hi)); e++) {
    for (let m = 2; m <= 9; m++) {
      const v = m * Math.pow(10, e);
      if (v > lo && v < hi) {
        minors.push(v);
      }
    }
  }
  return minors;
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const mag = Math.abs(v);
  if (mag >= 1e4 || mag < 1e-3) {
    const exp = v.toExponential(1).replace("e", "E").replace("E+", "E");
    return exp.replace(".0E", "E");
  }
  const rounded = Number(v.toPrecision(4));
  return String(rounded);
}

function drawSeries(r: Raster, rect: Rect, xs: Scale, ys: Scale, s: Series): void {
  let prev: [number, number] | null = null;
  for (let i = 0; i < s.x.length; i++) {
    const xv = s.x[i];
    const yv = s.y[i];
    const ok =
      Number.isFinite(xv) &&
      Number.isFinite(yv) &&
      (xs.kind !== "log" || xv > 0) &&
      (ys.kind !== "log" || yv > 0);
    if (!ok) {
      prev = null;
      continue;
    }
    const px = mapValue(xs, xv);
    const py = mapValue(ys, yv);
    if (prev) {
      r.line(prev[0], prev[1], px, py, s.color, s.lineWidth ?? 2);
    } else {
      r.disc(px, py, (s.lineWidth ?? 2) > 1 ? 1 : 0, s.color);
    }
    prev = [px, py];
  }
}

function drawPanel(r: Raster, rect: Rect, spec: PanelSpec): void {
  const titleBand = 22;
  const left = rect.x + 64;
  const bottom = rect.y + rect.h - 26;
  const top = rect.y + titleBand + 6;
  const right = rect.x + rect.w - 12;

  r.text(
    rect.x + Math.max(6, (rect.w - textWidth(spec.title, 2)) / 2),
    rect.y + 4,
    spec.title,
    BLACK,
    2,
  );

  const xKind = spec.xKind ?? "linear";
  const yKind = spec.yKind ?? "linear";
  const xExtent = dataExtent(spec, "x", xKind);
  const yExtent = dataExtent(spec, "y", yKind);
  r.strokeRect(left, top, right - left, bottom - top, GREY);

  if (!xExtent || !yExtent) {
    const note = spec.note ?? "no finite data";
    r.text(left + 12, (top + bottom) / 2 - 4, note, GREY, 1);
    return;
  }

  const xs: Scale = { kind: xKind, lo: xExtent[0], hi: xExtent[1], p0: left, p1: right };
  const ys: Scale = { kind: yKind, lo: yExtent[0], hi: yExtent[1], p0: bottom, p1: top };

  const xTicks = xKind === "log" ? logTicks(xs.lo, xs.hi) : linearTicks(xs.lo, xs.hi);
  const yTicks = yKind === "log" ? logTicks(ys.lo, ys.hi) : linearTicks(ys.lo, ys.hi);

  if (xKind === "log") {
    for (const v of logMinorTicks(xs.lo, xs.hi)) {
      const px = mapValue(xs, v);
      r.line(px, top, px, bottom, LIGHT_GREY, 1);
    }
  }
  if (yKind === "log") {
    for (const v of logMinorTicks(ys.lo, ys.hi)) {
      const py = mapValue(ys, v);
      r.line(left, py, right, py, LIGHT_GREY, 1);
    }
  }
  for (const v of xTicks) {
    const px = mapValue(xs, v);
    if (px < left - 0.5 || px > right + 0.5) continue;
    r.line(px, top, px, bottom, LIGHT_GREY, 1);
    const label = formatTick(v);
    r.text(px - textWidth(label) / 2, bottom + 6, label, BLACK, 1);
  }
  for (const v of yTicks) {
    const py = mapValue(ys, v);
    if (py < top - 0.5 || py > bottom + 0.5) continue;
    r.line(left, py, right, py, LIGHT_GREY, 1);
    const label = formatTick(v);
    r.text(left - textWidth(label) - 6, py - 3, label, BLACK, 1);
  }
  r.strokeRect(left, top, right - left, bottom - top, GREY);

  for (const s of spec.series) {
    drawSeries(r, rect, xs, ys, s);
  }
  if (spec.markers) {
    const radius = spec.markers.radius ?? 5;
    for (const m of spec.markers.points) {
      if (!Number.isFinite(m.x) || !Number.isFinite(m.y)) continue;
      if (xs.kind === "log" && m.x <= 0) continue;
      if (ys.kind === "log" && m.y <= 0) continue;
      const px = mapValue(xs, m.x);
      const py = mapValue(ys, m.y);
      if (m.open) {
        r.ring(px, py, radius, spec.markers.color);
      } else {
        r.disc(px, py, radius, spec.markers.color);
      }
    }
  }

  if (spec.xLabel) {
    r.text(
      (left + right) / 2 - textWidth(spec.xLabel) / 2,
      rect.y + rect.h - 10,
      spec.xLabel,
      BLACK,
      1,
    );
  }
  if (spec.yLabel) {
    r.text(rect.x + 4, top - 12, spec.yLabel, BLACK, 1);
  }

  // legend: one swatch + label per named series, top-right inside the box
  const entries = spec.series.filter((s) => s.label.length > 0);
  entries.forEach((s, i) => {
    const ly = top + 8 + 14 * i;
    const widest = Math.max(...entries.map((e) => textWidth(e.label)));
    const lx = right - widest - 34;
    r.line(lx, ly + 3, lx + 18, ly + 3, s.color, 3);
    r.text(lx + 24, ly, s.label, BLACK, 1);
  });
}

export interface FigureLayout {
  panels: number;
  rows: number;
  cols: number;
  width: number;
  height: number;
}

export function renderFigure(
  panels: PanelSpec[],
  width = 1280,
  height = 960,
): { raster: Raster; layout: FigureLayout } {
  const cols = panels.length <= 1 ? 1 : 2;
  const rows = Math.ceil(panels.length / cols);
  const raster = new Raster(width, height, WHITE);
  const margin = 10;
  const cellW = (width - 2 * margin) / cols;
  const cellH = (height - 2 * margin) / rows;
  panels.forEach((spec, i) => {
    const rect: Rect = {
      x: margin + (i % cols) * cellW,
      y: margin + Math.floor(i / cols) * cellH,
      w: cellW - 6,
      h: cellH - 6,
    };
    drawPanel(raster, rect, spec);
  });
  return { raster, layout: { panels: panels.length, rows, cols, width, height } };
}
