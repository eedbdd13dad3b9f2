/**
 * Reader/writer for the VRTC tensor container exchanged with the engine.
 *
 * Layout (version 1): magic "VRTC" | version u8 | dtype u8 (0 = u8,
 * 1 = f32 LE) | ndim u8 | dims ndim x u32 LE | row-major payload.
 */

export type Dtype = "u8" | "f32";

export interface Tensor {
  dtype: Dtype;
  dims: number[];
  /** u8 -> Uint8Array, f32 -> Float32Array */
  data: Uint8Array | Float32Array;
}

const MAGIC = Buffer.from("VRTC", "ascii");
const VERSION = 1;

export function encodeTensor(tensor: Tensor): Buffer {
  const header = Buffer.alloc(7 + 4 * tensor.dims.length);
  MAGIC.copy(header, 0);
  header.writeUInt8(VERSION, 4);
  header.writeUInt8(tensor.dtype === "u8" ? 0 : 1, 5);
  header.writeUInt8(tensor.dims.length, 6);
  tensor.dims.forEach((dim, i) => header.writeUInt32LE(dim, 7 + 4 * i));
  const payload =
    tensor.dtype === "u8"
      ? Buffer.from(tensor.data as Uint8Array)
      : Buffer.from((tensor.data as Float32Array).buffer.slice(
          (tensor.data as Float32Array).byteOffset,
          (tensor.data as Float32Array).byteOffset + (tensor.data as Float32Array).byteLength,
        ));
  return Buffer.concat([header, payload]);
}

export function decodeTensor(blob: Buffer): Tensor {
  if (blob.length < 7 || !blob.subarray(0, 4).equals(MAGIC)) {
    throw new Error("bad container magic");
  }
  const version = blob.readUInt8(4);
  if (version !== VERSION) {
    throw new Error(`unsupported container version ${version}`);
  }
  const dtypeCode = blob.readUInt8(5);
  const ndim = blob.readUInt8(6);
  const dims: number[] = [];
  let offset = 7;
  for (let i = 0; i < ndim; i += 1) {
    dims.push(blob.readUInt32LE(offset));
    offset += 4;
  }
  const count = dims.reduce((a, b) => a * b, 1);
  const itemsize = dtypeCode === 0 ? 1 : 4;
  const payload = blob.subarray(offset);
  if (payload.length !== count * itemsize) {
    throw new Error(`payload size ${payload.length} does not match dims [${dims}]`);
  }
  if (dtypeCode === 0) {
    return { dtype: "u8", dims, data: new Uint8Array(payload) };
  }
  if (dtypeCode === 1) {
    // slice() yields a standalone ArrayBuffer; Buffer.from would alias
    // node's shared pool at a nonzero byteOffset
    const standalone = Uint8Array.prototype.slice.call(payload);
    return {
      dtype: "f32",
      dims,
      data: new Float32Array(standalone.buffer, 0, count),
    };
  }
  throw new Error(`unknown dtype code ${dtypeCode}`);
}

export function tensorElements(tensor: Tensor): number {
  return tensor.dims.reduce((a, b) => a * b, 1);
}
