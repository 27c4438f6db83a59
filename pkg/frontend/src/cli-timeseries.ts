#!/usr/bin/env node
import { runPlotCommand } from "./cli.js";
import { renderTimeseries } from "./timeseries.js";

process.exit(
  runPlotCommand("plot-timeseries", process.argv.slice(2), (text, out) =>
    renderTimeseries(text, out) as unknown as Record<string, unknown>,
  ),
);
