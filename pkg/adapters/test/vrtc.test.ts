import { describe, expect, it } from "vitest";

import { decodeTensor, encodeTensor, Tensor } from "../src/vrtc.js";

describe("vrtc container", () => {
  it("round-trips u8 tensors bit-exactly", () => {
    const data = new Uint8Array(2 * 3 * 4 * 3);
    for (let i = 0; i < data.length; i += 1) data[i] = (i * 37) % 256;
    const tensor: Tensor = { dtype: "u8", dims: [2, 3, 4, 3], data };
    const back = decodeTensor(encodeTensor(tensor));
    expect(back.dims).toEqual([2, 3, 4, 3]);
    expect(Buffer.from(back.data as Uint8Array)).toEqual(Buffer.from(data));
  });

  it("round-trips f32 tensors bit-exactly", () => {
    const data = new Float32Array([0.5, -1.25, 3.75, 6.02e23]);
    const tensor: Tensor = { dtype: "f32", dims: [2, 2], data };
    const back = decodeTensor(encodeTensor(tensor));
    expect(Array.from(back.data as Float32Array)).toEqual(Array.from(data));
  });

  it("writes the documented header", () => {
    const blob = encodeTensor({ dtype: "u8", dims: [2, 3], data: new Uint8Array(6) });
    expect(blob.subarray(0, 4).toString("ascii")).toBe("VRTC");
    expect(blob.readUInt8(4)).toBe(1);
    expect(blob.readUInt8(5)).toBe(0);
    expect(blob.readUInt8(6)).toBe(2);
    expect(blob.readUInt32LE(7)).toBe(2);
    expect(blob.readUInt32LE(11)).toBe(3);
  });

  it("rejects bad magic and truncated payloads", () => {
    expect(() => decodeTensor(Buffer.from("JUNKJUNKJUNK"))).toThrow(/magic/);
    const blob = encodeTensor({ dtype: "u8", dims: [4], data: new Uint8Array(4) });
    expect(() => decodeTensor(blob.subarray(0, blob.length - 1))).toThrow(/payload/);
  });
});
