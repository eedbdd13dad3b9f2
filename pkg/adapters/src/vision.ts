/**
 * Lightweight image analysis backing the pointer, segmenter and VQA
 * roles: background estimation from the border, connected foreground
 * components, centroid pointing and color-similarity region growing.
 * Deterministic by construction.
 */

import { Tensor } from "./vrtc.js";

export interface Blob {
  size: number;
  centroidX: number; // fractional [0, 1]
  centroidY: number;
  pixels: Uint8Array; // H*W membership mask
}

interface Image {
  height: number;
  width: number;
  data: Uint8Array; // H*W*3
}

export function asImage(tensor: Tensor): Image {
  if (tensor.dtype !== "u8" || tensor.dims.length !== 3 || tensor.dims[2] !== 3) {
    throw new Error(`expected an (H, W, 3) u8 image, got ${tensor.dtype} [${tensor.dims}]`);
  }
  return { height: tensor.dims[0], width: tensor.dims[1], data: tensor.data as Uint8Array };
}

function colorAt(image: Image, y: number, x: number): [number, number, number] {
  const base = (y * image.width + x) * 3;
  return [image.data[base], image.data[base + 1], image.data[base + 2]];
}

function distance(a: [number, number, number], b: [number, number, number]): number {
  return Math.abs(a[0] - b[0]) + Math.abs(a[1] - b[1]) + Math.abs(a[2] - b[2]);
}

/** Dominant border color, quantized to 8-value bins per channel. */
export function backgroundColor(image: Image): [number, number, number] {
  const counts = new Map<number, { n: number; sum: [number, number, number] }>();
  const consider = (y: number, x: number) => {
    const c = colorAt(image, y, x);
    const key = ((c[0] >> 5) << 6) | ((c[1] >> 5) << 3) | (c[2] >> 5);
    const entry = counts.get(key) ?? { n: 0, sum: [0, 0, 0] };
    entry.n += 1;
    entry.sum[0] += c[0];
    entry.sum[1] += c[1];
    entry.sum[2] += c[2];
    counts.set(key, entry);
  };
  for (let x = 0; x < image.width; x += 1) {
    consider(0, x);
    consider(image.height - 1, x);
  }
  for (let y = 0; y < image.height; y += 1) {
    consider(y, 0);
    consider(y, image.width - 1);
  }
  let best: { n: number; sum: [number, number, number] } | undefined;
  for (const entry of counts.values()) {
    if (!best || entry.n > best.n) best = entry;
  }
  if (!best) throw new Error("empty image");
  return [best.sum[0] / best.n, best.sum[1] / best.n, best.sum[2] / best.n];
}

const FOREGROUND_THRESHOLD = 90;

/** Connected components of pixels that differ clearly from the background. */
export function foregroundBlobs(tensor: Tensor, minFraction = 0.001): Blob[] {
  const image = asImage(tensor);
  const bg = backgroundColor(image);
  const { height, width } = image;
  const fg = new Uint8Array(height * width);
  for (let y = 0; y < height; y += 1) {
    for (let x = 0; x < width; x += 1) {
      if (distance(colorAt(image, y, x), bg) > FOREGROUND_THRESHOLD) {
        fg[y * width + x] = 1;
      }
    }
  }

  const seen = new Uint8Array(height * width);
  const blobs: Blob[] = [];
  const minSize = Math.max(1, Math.floor(height * width * minFraction));
  const queue = new Int32Array(height * width);
  for (let start = 0; start < fg.length; start += 1) {
    if (!fg[start] || seen[start]) continue;
    let head = 0;
    let tail = 0;
    queue[tail++] = start;
    seen[start] = 1;
    const pixels = new Uint8Array(height * width);
    let size = 0;
    let sumX = 0;
    let sumY = 0;
    while (head < tail) {
      const index = queue[head++];
      pixels[index] = 1;
      size += 1;
      const y = Math.floor(index / width);
      const x = index % width;
      sumX += x;
      sumY += y;
      const neighbors = [
        [y - 1, x],
        [y + 1, x],
        [y, x - 1],
        [y, x + 1],
      ];
      for (const [ny, nx] of neighbors) {
        if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
        const ni = ny * width + nx;
        if (fg[ni] && !seen[ni]) {
          seen[ni] = 1;
          queue[tail++] = ni;
        }
      }
    }
    if (size >= minSize) {
      blobs.push({
        size,
        centroidX: (sumX / size + 0.5) / width,
        centroidY: (sumY / size + 0.5) / height,
        pixels,
      });
    }
  }
  blobs.sort((a, b) => b.size - a.size);
  return blobs;
}

/** The "point the biggest N" rule: centroids of the N largest components. */
export function pointBiggest(tensor: Tensor, n: number): { x: number; y: number }[] {
  return foregroundBlobs(tensor)
    .slice(0, Math.max(1, n))
    .map((blob) => ({
      x: Math.min(1, Math.max(0, blob.centroidX)),
      y: Math.min(1, Math.max(0, blob.centroidY)),
    }));
}

const GROW_THRESHOLD = 80;

/** Region grow from a fractional click by color similarity to the seed pixel. */
export function segmentAtPoint(tensor: Tensor, fx: number, fy: number): Tensor {
  const image = asImage(tensor);
  const { height, width } = image;
  const seedX = Math.min(width - 1, Math.max(0, Math.floor(fx * width)));
  const seedY = Math.min(height - 1, Math.max(0, Math.floor(fy * height)));
  const seedColor = colorAt(image, seedY, seedX);

  const mask = new Uint8Array(height * width);
  const queue = new Int32Array(height * width);
  let head = 0;
  let tail = 0;
  const seedIndex = seedY * width + seedX;
  queue[tail++] = seedIndex;
  mask[seedIndex] = 1;
  while (head < tail) {
    const index = queue[head++];
    const y = Math.floor(index / width);
    const x = index % width;
    const neighbors = [
      [y - 1, x],
      [y + 1, x],
      [y, x - 1],
      [y, x + 1],
    ];
    for (const [ny, nx] of neighbors) {
      if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
      const ni = ny * width + nx;
      if (mask[ni]) continue;
      if (distance(colorAt(image, ny, nx), seedColor) <= GROW_THRESHOLD) {
        mask[ni] = 1;
        queue[tail++] = ni;
      }
    }
  }
  return { dtype: "u8", dims: [height, width], data: mask };
}

/** Observed instance count for the VQA role: number of clear foreground blobs. */
export function countObjects(tensor: Tensor): number {
  return foregroundBlobs(tensor, 0.002).length;
}
