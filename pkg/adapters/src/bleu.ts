/**
 * Caption-similarity scoring for the ranking tie-break: a deterministic
 * captioner over blob statistics and a standard n-gram BLEU with
 * brevity penalty, clipped counts and smoothing for empty orders.
 */

import { Tensor } from "./vrtc.js";
import { countObjects } from "./vision.js";

const COUNT_TO_WORD: Record<number, string> = {
  0: "no", 1: "one", 2: "two", 3: "three", 4: "four", 5: "five",
  6: "six", 7: "seven", 8: "eight", 9: "nine", 10: "ten",
};

/** Middle-frame description, e.g. "a scene with two objects". */
export function captionVideo(video: Tensor): string {
  const [frames, height, width] = video.dims;
  const mid = Math.floor(frames / 2);
  const pixels = (video.data as Uint8Array).subarray(
    mid * height * width * 3,
    (mid + 1) * height * width * 3,
  );
  const frame: Tensor = { dtype: "u8", dims: [height, width, 3], data: new Uint8Array(pixels) };
  const count = Math.min(10, countObjects(frame));
  const word = COUNT_TO_WORD[count] ?? String(count);
  const noun = count === 1 ? "object" : "objects";
  return `a scene with ${word} ${noun}`;
}

function ngrams(tokens: string[], n: number): Map<string, number> {
  const out = new Map<string, number>();
  for (let i = 0; i + n <= tokens.length; i += 1) {
    const gram = tokens.slice(i, i + n).join(" ");
    out.set(gram, (out.get(gram) ?? 0) + 1);
  }
  return out;
}

export function bleu(reference: string, candidate: string, maxOrder = 4): number {
  const refTokens = reference.toLowerCase().split(/\s+/).filter(Boolean);
  const candTokens = candidate.toLowerCase().split(/\s+/).filter(Boolean);
  if (candTokens.length === 0 || refTokens.length === 0) {
    return 0;
  }
  let logSum = 0;
  for (let order = 1; order <= maxOrder; order += 1) {
    const refGrams = ngrams(refTokens, order);
    const candGrams = ngrams(candTokens, order);
    let matches = 0;
    let total = 0;
    for (const [gram, count] of candGrams) {
      total += count;
      matches += Math.min(count, refGrams.get(gram) ?? 0);
    }
    // +1 smoothing keeps higher orders defined on short captions
    const precision = total === 0 ? 0 : (matches + 1) / (total + 1);
    if (precision === 0) {
      return 0;
    }
    logSum += Math.log(precision) / maxOrder;
  }
  const brevity =
    candTokens.length >= refTokens.length
      ? 1
      : Math.exp(1 - refTokens.length / candTokens.length);
  const score = brevity * Math.exp(logSum);
  return Math.min(1, Math.max(0, score));
}

export function scoreVideoAgainstPrompt(prompt: string, video: Tensor): number {
  return bleu(prompt, captionVideo(video));
}
