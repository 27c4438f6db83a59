/**
 * Five-panel diagnostics figure from a run's diagnostics.csv: energy, the
 * two velocity derivative sup norms, the +/- curl-combination Besov norms,
 * and the Euler-comparison gap E(t).
 */

import { writeFileSync } from "node:fs";

import { parseCsv, Table } from "./csv.js";
import { encodePng } from "./png.js";
import { PanelSpec, renderFigure } from "./plot.js";
import { BLUE, GREEN, ORANGE, PURPLE, RED } from "./raster.js";

export const REQUIRED_COLUMNS = [
  "t",
  "energy",
  "grad_u_sup",
  "grad2_u_sup",
  "omega_plus_j",
  "omega_minus_j",
  "delta_norm",
] as const;

export interface TimeseriesMeta {
  panels: number;
  rows: number;
  width: number;
  height: number;
  bytes: number;
}

export function buildPanels(table: Table): PanelSpec[] {
  for (const name of REQUIRED_COLUMNS) {
    table.require(name);
  }
  const t = table.numeric("t");
  const delta = table.numeric("delta_norm");
  const hasDelta = delta.some((v) => Number.isFinite(v));
  return [
    {
      title: "ENERGY",
      series: [{ label: "", x: t, y: table.numeric("energy"), color: BLUE }],
    },
    {
      title: "SUP NORM OF GRAD U",
      series: [{ label: "", x: t, y: table.numeric("grad_u_sup"), color: GREEN }],
    },
    {
      title: "SUP NORM OF GRAD2 U",
      series: [{ label: "", x: t, y: table.numeric("grad2_u_sup"), color: ORANGE }],
    },
    {
      title: "CURL COMBINATION NORMS",
      series: [
        { label: "OMEGA+J", x: t, y: table.numeric("omega_plus_j"), color: RED },
        { label: "OMEGA-J", x: t, y: table.numeric("omega_minus_j"), color: PURPLE },
      ],
    },
    {
      title: "EULER GAP E(T)",
      series: hasDelta ? [{ label: "", x: t, y: delta, color: BLUE }] : [],
      note: hasDelta ? undefined : "NO EULER REFERENCE ATTACHED",
    },
  ];
}

export function renderTimeseries(csvText: string, outPath: string): TimeseriesMeta {
  const table = parseCsv(csvText);
  const panels = buildPanels(table);
  const { raster, layout } = renderFigure(panels, 1280, 960);
  const png = encodePng(raster.width, raster.height, raster.data);
  writeFileSync(outPath, png);
  return {
    panels: layout.panels,
    rows: table.rowCount,
    width: layout.width,
    height: layout.height,
    bytes: png.length,
  };
}
