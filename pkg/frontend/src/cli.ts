/** Shared argv handling for the two plot commands. */

import { readFileSync } from "node:fs";

import { SchemaError } from "./csv.js";

export function runPlotCommand(
  name: string,
  argv: string[],
  render: (csvText: string, outPath: string) => Record<string, unknown>,
): number {
  if (argv.length !== 2) {
    process.stderr.write(`usage: ${name} <input.csv> <output.png>\n`);
    return 2;
  }
  const [csvPath, outPath] = argv;
  let text: string;
  try {
    text = readFileSync(csvPath, "utf-8");
  } catch (err) {
    process.stderr.write(`${name}: cannot read ${csvPath}: ${(err as Error).message}\n`);
    return 2;
  }
  try {
    const meta = render(text, outPath);
    const parts = Object.entries(meta)
      .map(([k, v]) => `${k}=${v}`)
      .join(" ");
    process.stdout.write(`wrote ${outPath} (${parts})\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`${name}: ${csvPath}: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`${name}: ${(err as Error).message}\n`);
    return 1;
  }
}
