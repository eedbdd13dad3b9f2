/**
 * Generates the labeled pointing fixture: a synthetic meadow scene with
 * one large bear-like blob (the biggest object), a smaller rock, and a
 * JSON label carrying the bear's bounding box in fractional coords.
 */

import { mkdirSync, writeFileSync } from "fs";
import { dirname, join, resolve } from "path";
import { fileURLToPath } from "url";

import { encodeTensor, Tensor } from "../vrtc.js";

const HEIGHT = 96;
const WIDTH = 128;

function fill(data: Uint8Array, y: number, x: number, rgb: [number, number, number]): void {
  const base = (y * WIDTH + x) * 3;
  data[base] = rgb[0];
  data[base + 1] = rgb[1];
  data[base + 2] = rgb[2];
}

export function bearScene(): { image: Tensor; label: Record<string, unknown> } {
  const data = new Uint8Array(HEIGHT * WIDTH * 3);
  for (let y = 0; y < HEIGHT; y += 1) {
    for (let x = 0; x < WIDTH; x += 1) {
      // meadow green with a mild vertical gradient
      fill(data, y, x, [70, 150 - Math.floor((20 * y) / HEIGHT), 70]);
    }
  }

  // the bear: a large brown ellipse with a head bump
  const bear = { cx: 78, cy: 46, rx: 22, ry: 15 };
  for (let y = 0; y < HEIGHT; y += 1) {
    for (let x = 0; x < WIDTH; x += 1) {
      const dx = (x - bear.cx) / bear.rx;
      const dy = (y - bear.cy) / bear.ry;
      const hx = (x - (bear.cx - 18)) / 8;
      const hy = (y - (bear.cy - 12)) / 8;
      if (dx * dx + dy * dy <= 1 || hx * hx + hy * hy <= 1) {
        fill(data, y, x, [120, 80, 45]);
      }
    }
  }

  // a smaller gray rock so "biggest" is a real decision
  for (let y = 0; y < HEIGHT; y += 1) {
    for (let x = 0; x < WIDTH; x += 1) {
      const dx = (x - 28) / 8;
      const dy = (y - 70) / 6;
      if (dx * dx + dy * dy <= 1) {
        fill(data, y, x, [150, 150, 155]);
      }
    }
  }

  const label = {
    label: "bear",
    prompt: "Point the biggest 1 bear",
    bbox: {
      x0: (bear.cx - bear.rx - 10) / WIDTH,
      y0: (bear.cy - bear.ry - 10) / HEIGHT,
      x1: (bear.cx + bear.rx + 2) / WIDTH,
      y1: (bear.cy + bear.ry + 2) / HEIGHT,
    },
  };
  return { image: { dtype: "u8", dims: [HEIGHT, WIDTH, 3], data }, label };
}

function main(): void {
  const here = dirname(fileURLToPath(import.meta.url)); // dist/tools or src/tools
  const outDir = resolve(here, "..", "..", "fixtures", "pointing");
  mkdirSync(outDir, { recursive: true });
  const { image, label } = bearScene();
  writeFileSync(join(outDir, "bear.vrtc"), encodeTensor(image));
  writeFileSync(join(outDir, "bear.json"), JSON.stringify(label, null, 2) + "\n");
  console.log(`wrote fixtures to ${outDir}`);
}

if (process.argv[1] && process.argv[1].includes("makeFixtures")) {
  main();
}
