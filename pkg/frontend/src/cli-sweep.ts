#!/usr/bin/env node
import { runPlotCommand } from "./cli.js";
import { renderSweep } from "./sweep.js";

process.exit(
  runPlotCommand("plot-sweep", process.argv.slice(2), (text, out) =>
    renderSweep(text, out) as unknown as Record<string, unknown>,
  ),
);
