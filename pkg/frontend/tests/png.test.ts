import { inflateSync } from "node:zlib";

import { describe, expect, it } from "vitest";

import { encodePng, pngDimensions } from "../src/png.js";
import { Raster, RED, WHITE } from "../src/raster.js";

describe("png encoding", () => {
  it("round-trips dimensions and pixel bytes", () => {
    const r = new Raster(7, 5, WHITE);
    r.set(2, 3, RED);
    const png = encodePng(r.width, r.height, r.data);
    expect(pngDimensions(png)).toEqual({ width: 7, height: 5 });

    // IDAT payload: scan past the 8-byte signature and 25-byte IHDR chunk
    const idatLen = png.readUInt32BE(33);
    expect(png.subarray(37, 41).toString("ascii")).toBe("IDAT");
    const raw = inflateSync(png.subarray(41, 41 + idatLen));
    expect(raw.length).toBe(5 * (1 + 4 * 7));
    const rowStart = 3 * (1 + 4 * 7) + 1;
    expect(raw[rowStart + 4 * 2]).toBe(RED[0]);
    expect(raw[rowStart + 4 * 2 + 1]).toBe(RED[1]);
  });

  it("is byte-stable for identical input", () => {
    const r = new Raster(16, 16);
    r.line(0, 0, 15, 15, RED, 2);
    const a = encodePng(r.width, r.height, r.data);
    const b = encodePng(r.width, r.height, r.data);
    expect(a.equals(b)).toBe(true);
  });

  it("rejects a mismatched buffer", () => {
    expect(() => encodePng(4, 4, new Uint8Array(3))).toThrowError(/expected/);
  });
});

describe("raster text", () => {
  it("renders glyphs with ink", () => {
    const r = new Raster(200, 20);
    r.text(2, 2, "E(T) = 0.125E-3", [0, 0, 0], 1);
    expect(r.inkFraction()).toBeGreaterThan(0.02);
  });
});
