/**
 * Software RGBA raster with the primitives the figures need: filled
 * rectangles, thick polyline segments, circular markers (solid and open),
 * and 5x7 bitmap text.  Coordinates are pixels, origin top-left.
 */

import { GLYPH_HEIGHT, GLYPH_SPACING, GLYPH_WIDTH, glyphFor } from "./font.js";

export type Color = readonly [number, number, number];

export const WHITE: Color = [255, 255, 255];
export const BLACK: Color = [30, 30, 30];
export const GREY: Color = [190, 190, 190];
export const LIGHT_GREY: Color = [228, 228, 228];
export const BLUE: Color = [31, 119, 180];
export const ORANGE: Color = [255, 127, 14];
export const GREEN: Color = [44, 160, 44];
export const RED: Color = [214, 39, 40];
export const PURPLE: Color = [148, 103, 189];

export class Raster {
  readonly width: number;
  readonly height: number;
  readonly data: Uint8Array;

  constructor(width: number, height: number, background: Color = WHITE) {
    this.width = width;
    this.height = height;
    this.data = new Uint8Array(4 * width * height);
    for (let i = 0; i < width * height; i++) {
      this.data[4 * i] = background[0];
      this.data[4 * i + 1] = background[1];
      this.data[4 * i + 2] = background[2];
      this.data[4 * i + 3] = 255;
    }
  }

  set(x: number, y: number, color: Color): void {
    if (x < 0 || y < 0 || x >= this.width || y >= this.height) return;
    const i = 4 * (y * this.width + x);
    this.data[i] = color[0];
    this.data[i + 1] = color[1];
    this.data[i + 2] = color[2];
    this.data[i + 3] = 255;
  }

  fillRect(x0: number, y0: number, w: number, h: number, color: Color): void {
    const x1 = Math.min(this.width, Math.ceil(x0 + w));
    const y1 = Math.min(this.height, Math.ceil(y0 + h));
    for (let y = Math.max(0, Math.floor(y0)); y < y1; y++) {
      for (let x = Math.max(0, Math.floor(x0)); x < x1; x++) {
        this.set(x, y, color);
      }
    }
  }

  strokeRect(x0: number, y0: number, w: number, h: number, color: Color): void {
    this.fillRect(x0, y0, w, 1, color);
    this.fillRect(x0, y0 + h - 1, w, 1, color);
    this.fillRect(x0, y0, 1, h, color);
    this.fillRect(x0 + w - 1, y0, 1, h, color);
  }

  /** Bresenham segment thickened with a square brush. */
  line(x0: number, y0: number, x1: number, y1: number, color: Color, width = 1): void {
    let ix0 = Math.round(x0);
    let iy0 = Math.round(y0);
    const ix1 = Math.round(x1);
    const iy1 = Math.round(y1);
    const dx = Math.abs(ix1 - ix0);
    const dy = -Math.abs(iy1 - iy0);
    const sx = ix0 < ix1 ? 1 : -1;
    const sy = iy0 < iy1 ? 1 : -1;
    let err = dx + dy;
    const r = Math.floor(width / 2);
    for (;;) {
      for (let oy = -r; oy <= r; oy++) {
        for (let ox = -r; ox <= r; ox++) {
          this.set(ix0 + ox, iy0 + oy, color);
        }
      }
      if (ix0 === ix1 && iy0 === iy1) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        ix0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        iy0 += sy;
      }
    }
  }

  disc(cx: number, cy: number, radius: number, color: Color): void {
    const r2 = radius * radius;
    for (let y = -radius; y <= radius; y++) {
      for (let x = -radius; x <= radius; x++) {
        if (x * x + y * y <= r2) {
          this.set(Math.round(cx) + x, Math.round(cy) + y, color);
        }
      }
    }
  }

  /** Open circle: the censored-point marker. */
  ring(cx: number, cy: number, radius: number, color: Color): void {
    const inner = (radius - 1.6) * (radius - 1.6);
    const outer = (radius + 0.4) * (radius + 0.4);
    for (let y = -radius - 1; y <= radius + 1; y++) {
      for (let x = -radius - 1; x <= radius + 1; x++) {
        const d2 = x * x + y * y;
        if (d2 <= outer && d2 >= inner) {
          this.set(Math.round(cx) + x, Math.round(cy) + y, color);
        }
      }
    }
  }

  text(x: number, y: number, s: string, color: Color, scale = 1): void {
    let cursor = Math.round(x);
    const top = Math.round(y);
    for (const ch of s) {
      const glyph = glyphFor(ch);
      for (let row = 0; row < GLYPH_HEIGHT; row++) {
        for (let col = 0; col < GLYPH_WIDTH; col++) {
          if (glyph[row][col] === "1") {
            this.fillRect(cursor + col * scale, top + row * scale, scale, scale, color);
          }
        }
      }
      cursor += (GLYPH_WIDTH + GLYPH_SPACING) * scale;
    }
  }

  /** Fraction of pixels that differ from the background (test aid). */
  inkFraction(background: Color = WHITE): number {
    let ink = 0;
    const total = this.width * this.height;
    for (let i = 0; i < total; i++) {
      if (
        this.data[4 * i] !== background[0] ||
        this.data[4 * i + 1] !== background[1] ||
        this.data[4 * i + 2] !== background[2]
      ) {
        ink++;
      }
    }
    return ink / total;
  }
}
