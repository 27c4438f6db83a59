/**
 * Lifespan-sweep figure from sweep.csv: empirical T* against epsilon on a
 * log-x axis, censored points drawn as open rings, with the fitted
 * triple-log lower-bound curve overlaid (falling back to the C = 1 curve
 * when every point is censored and no fit exists).
 */

import { writeFileSync } from "node:fs";

import { parseCsv, Table } from "./csv.js";
import { encodePng } from "./png.js";
import { MarkerPoint, PanelSpec, renderFigure } from "./plot.js";
import { BLUE, ORANGE } from "./raster.js";

export const REQUIRED_COLUMNS = [
  "epsilon",
  "t_star",
  "censored",
  "bound_new_c1",
  "bound_new_cfit",
] as const;

export interface SweepMeta {
  markers: number;
  censored: number;
  curveSource: "cfit" | "c1";
  rows: number;
  width: number;
  height: number;
  bytes: number;
}

export function buildSweepPanel(table: Table): {
  panel: PanelSpec;
  markers: MarkerPoint[];
  curveSource: "cfit" | "c1";
} {
  for (const name of REQUIRED_COLUMNS) {
    table.require(name);
  }
  const eps = table.numeric("epsilon");
  const tStar = table.numeric("t_star");
  const censored = table.strings("censored").map((v) => v.trim() === "true");
  const markers: MarkerPoint[] = eps.map((e, i) => ({
    x: e,
    y: tStar[i],
    open: censored[i],
  }));

  const cfit = table.numeric("bound_new_cfit");
  const useFit = cfit.some((v) => Number.isFinite(v));
  const curveSource = useFit ? "cfit" : "c1";
  const curveY = useFit ? cfit : table.numeric("bound_new_c1");
  const order = eps
    .map((e, i) => i)
    .filter((i) => Number.isFinite(eps[i]) && eps[i] > 0 && Number.isFinite(curveY[i]))
    .sort((a, b) => eps[a] - eps[b]);
  const [curveX, curveDense] = densify(
    order.map((i) => eps[i]),
    order.map((i) => curveY[i]),
  );

  const panel: PanelSpec = {
    title: "EMPIRICAL T* VS EPSILON (OPEN RING = CENSORED)",
    xKind: "log",
    xLabel: "EPSILON = INITIAL MAGNETIC NORM",
    yLabel: "T*",
    series: [
      {
        label: useFit ? "BOUND (FITTED C)" : "BOUND (C=1)",
        x: curveX,
        y: curveDense,
        color: ORANGE,
        lineWidth: 2,
      },
    ],
    markers: { points: markers, color: BLUE, radius: 6 },
  };
  return { panel, markers, curveSource };
}

/** The bound is smooth in log(eps): refine each segment log-linearly so the
 * overlay reads as a curve rather than a chord chain. */
function densify(xs: number[], ys: number[]): [number[], number[]] {
  if (xs.length < 2) return [xs, ys];
  const outX: number[] = [];
  const outY: number[] = [];
  const per = 40;
  for (let i = 0; i + 1 < xs.length; i++) {
    const l0 = Math.log(xs[i]);
    const l1 = Math.log(xs[i + 1]);
    for (let k = 0; k < per; k++) {
      const t = k / per;
      outX.push(Math.exp(l0 + t * (l1 - l0)));
      outY.push(ys[i] + t * (ys[i + 1] - ys[i]));
    }
  }
  outX.push(xs[xs.length - 1]);
  outY.push(ys[ys.length - 1]);
  return [outX, outY];
}

export function renderSweep(csvText: string, outPath: string): SweepMeta {
  const table = parseCsv(csvText);
  const { panel, markers, curveSource } = buildSweepPanel(table);
  const { raster, layout } = renderFigure([panel], 1400, 1000);
  const png = encodePng(raster.width, raster.height, raster.data);
  writeFileSync(outPath, png);
  return {
    markers: markers.length,
    censored: markers.filter((m) => m.open).length,
    curveSource,
    rows: table.rowCount,
    width: layout.width,
    height: layout.height,
    bytes: png.length,
  };
}
