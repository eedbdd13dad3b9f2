/**
 * Tensor transport over the JSON protocol: inline base64 for payloads
 * up to 1 MiB, file references above that.
 */

import { readFileSync, writeFileSync, mkdirSync } from "fs";
import { join } from "path";
import { randomUUID } from "crypto";
import { tmpdir } from "os";

import { Tensor, decodeTensor, encodeTensor } from "./vrtc.js";

export interface TensorRef {
  b64?: string;
  path?: string;
}

const INLINE_THRESHOLD = 1 << 20;

export function readTensorRef(ref: TensorRef): Tensor {
  if (ref.b64 !== undefined) {
    return decodeTensor(Buffer.from(ref.b64, "base64"));
  }
  if (ref.path !== undefined) {
    return decodeTensor(readFileSync(ref.path));
  }
  throw new Error("tensor reference needs either 'b64' or 'path'");
}

export function writeTensorRef(tensor: Tensor, workdir?: string): TensorRef {
  const blob = encodeTensor(tensor);
  if (blob.length <= INLINE_THRESHOLD) {
    return { b64: blob.toString("base64") };
  }
  const dir = workdir ?? join(tmpdir(), "videorepair-adapter");
  mkdirSync(dir, { recursive: true });
  const path = join(dir, `wire_${randomUUID().replace(/-/g, "")}.vrtc`);
  writeFileSync(path, blob);
  return { path };
}
