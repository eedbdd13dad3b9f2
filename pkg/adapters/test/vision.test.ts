import { readFileSync } from "fs";
import { dirname, join } from "path";
import { fileURLToPath } from "url";

import { describe, expect, it } from "vitest";

import { bearScene } from "../src/tools/makeFixtures.js";
import { countObjects, foregroundBlobs, pointBiggest, segmentAtPoint } from "../src/vision.js";
import { decodeTensor } from "../src/vrtc.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "..", "fixtures", "pointing");

describe("blob analysis on the bear scene", () => {
  const { image, label } = bearScene();
  const bbox = label.bbox as { x0: number; y0: number; x1: number; y1: number };

  it("finds two foreground objects", () => {
    expect(countObjects(image)).toBe(2);
  });

  it("ranks the bear biggest and points inside its box", () => {
    const points = pointBiggest(image, 1);
    expect(points).toHaveLength(1);
    const [p] = points;
    expect(p.x).toBeGreaterThanOrEqual(bbox.x0);
    expect(p.x).toBeLessThanOrEqual(bbox.x1);
    expect(p.y).toBeGreaterThanOrEqual(bbox.y0);
    expect(p.y).toBeLessThanOrEqual(bbox.y1);
  });

  it("returns both blobs when asked for two", () => {
    const points = pointBiggest(image, 2);
    expect(points).toHaveLength(2);
  });

  it("segments the bear region from its centroid", () => {
    const [p] = pointBiggest(image, 1);
    const mask = segmentAtPoint(image, p.x, p.y);
    const [height, width] = mask.dims;
    const data = mask.data as Uint8Array;
    let area = 0;
    let insideBox = 0;
    for (let y = 0; y < height; y += 1) {
      for (let x = 0; x < width; x += 1) {
        if (!data[y * width + x]) continue;
        area += 1;
        const fx = (x + 0.5) / width;
        const fy = (y + 0.5) / height;
        if (fx >= bbox.x0 && fx <= bbox.x1 && fy >= bbox.y0 && fy <= bbox.y1) {
          insideBox += 1;
        }
      }
    }
    const blobs = foregroundBlobs(image);
    expect(area).toBeGreaterThan(blobs[0].size * 0.8);
    expect(insideBox / area).toBeGreaterThan(0.95);
  });

  it("matches the committed fixture byte-for-byte", () => {
    const committed = decodeTensor(readFileSync(join(FIXTURES, "bear.vrtc")));
    expect(committed.dims).toEqual(image.dims);
    expect(Buffer.from(committed.data as Uint8Array)).toEqual(
      Buffer.from(image.data as Uint8Array),
    );
  });
});
