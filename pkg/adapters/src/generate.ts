/**
 * Procedural video renderer for the generation role.
 *
 * Every pixel's color is a pure function of its latent cell's noise
 * values and the prompt that wins that cell, so identical noise plus an
 * identical prompt always reproduces identical pixels. Preserved
 * regions therefore regenerate unchanged by construction: their noise
 * cells kept the original values and the original prompt. When the
 * request carries a pixel-level reference (video + mask), preserved
 * pixels are copied from it exactly, matching the engine's preserve
 * contract bit for bit at any mask granularity.
 */

import { createHash } from "crypto";

import { Tensor } from "./vrtc.js";

export interface Region {
  weights: Tensor; // (T, h, w) f32
  prompt: string;
}

export interface GenerateInputs {
  regions: Region[];
  noise: Tensor; // (T, C, h, w) f32
  frames: number;
  height: number;
  width: number;
  reference?: { video: Tensor; pixelMask: Tensor };
}

function cellColor(noise: Tensor, t: number, i: number, j: number, prompt: string): Buffer {
  const [, channels, cellH, cellW] = noise.dims;
  const values = new Float32Array(channels);
  const data = noise.data as Float32Array;
  for (let c = 0; c < channels; c += 1) {
    values[c] = data[((t * channels + c) * cellH + i) * cellW + j];
  }
  const hash = createHash("sha256");
  hash.update(Buffer.from(values.buffer));
  hash.update(prompt, "utf-8");
  return hash.digest();
}

export function renderVideo(inputs: GenerateInputs): Tensor {
  const { regions, noise, frames, height, width, reference } = inputs;
  const [noiseFrames, , cellH, cellW] = noise.dims;
  if (noiseFrames !== frames) {
    throw new Error(`noise has ${noiseFrames} frames, dims say ${frames}`);
  }
  const blockH = Math.ceil(height / cellH);
  const blockW = Math.ceil(width / cellW);

  const out = new Uint8Array(frames * height * width * 3);
  for (let t = 0; t < frames; t += 1) {
    for (let i = 0; i < cellH; i += 1) {
      for (let j = 0; j < cellW; j += 1) {
        const prompt = dominantPrompt(regions, t, i, j);
        const digest = cellColor(noise, t, i, j, prompt);
        const y0 = i * blockH;
        const x0 = j * blockW;
        for (let y = y0; y < Math.min(y0 + blockH, height); y += 1) {
          for (let x = x0; x < Math.min(x0 + blockW, width); x += 1) {
            // Per-pixel variation drawn from the digest keeps blocks textured
            // while staying a pure function of (cell noise, prompt, offset).
            const k = (((y - y0) * blockW + (x - x0)) * 3) % (digest.length - 3);
            const base = ((t * height + y) * width + x) * 3;
            out[base] = digest[k];
            out[base + 1] = digest[k + 1];
            out[base + 2] = digest[k + 2];
          }
        }
      }
    }
  }

  if (reference) {
    const refVideo = reference.video.data as Uint8Array;
    const mask = reference.pixelMask.data as Uint8Array;
    const [maskT, maskH, maskW] = reference.pixelMask.dims;
    if (maskT === frames && maskH === height && maskW === width) {
      for (let p = 0; p < mask.length; p += 1) {
        if (mask[p] === 1) {
          out[p * 3] = refVideo[p * 3];
          out[p * 3 + 1] = refVideo[p * 3 + 1];
          out[p * 3 + 2] = refVideo[p * 3 + 2];
        }
      }
    }
  }

  return { dtype: "u8", dims: [frames, height, width, 3], data: out };
}

function dominantPrompt(regions: Region[], t: number, i: number, j: number): string {
  let best = regions[0].prompt;
  let bestWeight = -1;
  for (const region of regions) {
    const [, h, w] = region.weights.dims;
    const value = (region.weights.data as Float32Array)[(t * h + i) * w + j];
    if (value > bestWeight) {
      bestWeight = value;
      best = region.prompt;
    }
  }
  return best;
}
