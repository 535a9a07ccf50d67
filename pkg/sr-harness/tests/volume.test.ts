import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  nearestSliceIndices,
  normalizeHu,
  readVolume,
  replicateToGrid,
} from "../src/volume.js";

const ROOT = path.dirname(path.dirname(fileURLToPath(import.meta.url)));

function writeTempMha(payload: Buffer, header: string): string {
  const dir = fs.mkdtempSync(path.join(os.tmpdir(), "vols-"));
  const file = path.join(dir, "v.mha");
  fs.writeFileSync(file, Buffer.concat([Buffer.from(header, "ascii"), payload]));
  return file;
}

describe("readVolume", () => {
  it("reads float32 volumes with x-fastest ordering", () => {
    const values = new Float32Array([0, 1, 2, 3, 4, 5, 6, 7]);
    const file = writeTempMha(
      Buffer.from(values.buffer),
      [
        "ObjectType = Image",
        "NDims = 3",
        "DimSize = 2 2 2",
        "ElementType = MET_FLOAT",
        "ElementSpacing = 1 1 0.5",
        "Offset = 0 0 10",
        "ElementDataFile = LOCAL",
        "",
      ].join("\n"),
    );
    const v = readVolume(file);
    expect([v.nx, v.ny, v.nz]).toEqual([2, 2, 2]);
    // [z][y][x]: x varies fastest in the payload
    expect(v.data[1]).toBe(1); // (z0, y0, x1)
    expect(v.data[2]).toBe(2); // (z0, y1, x0)
    expect(v.data[4]).toBe(4); // (z1, y0, x0)
    expect(v.sliceLocations).toEqual([10, 10.5]);
  });

  it("reads int16 as HU", () => {
    const values = new Int16Array([-1000, 0, 50, 3000, 7, -7, 1, 2]);
    const file = writeTempMha(
      Buffer.from(values.buffer),
      [
        "ObjectType = Image",
        "NDims = 3",
        "DimSize = 2 2 2",
        "ElementType = MET_SHORT",
        "ElementSpacing = 1 1 1",
        "Offset = 0 0 0",
        "ElementDataFile = LOCAL",
        "",
      ].join("\n"),
    );
    const v = readVolume(file);
    expect(v.data[0]).toBe(-1000);
    expect(v.data[3]).toBe(3000);
  });

  it("rejects truncated payloads", () => {
    const file = writeTempMha(
      Buffer.alloc(10),
      "DimSize = 2 2 2\nElementType = MET_FLOAT\nElementDataFile = LOCAL\n",
    );
    expect(() => readVolume(file)).toThrow(/payload/);
  });

  it("reads the exporter's mhd+raw fixtures", () => {
    const v = readVolume(path.join(ROOT, "fixtures", "train_thin", "t100.mhd"));
    expect([v.nx, v.ny, v.nz]).toEqual([24, 24, 51]);
    expect(v.sliceLocations[0]).toBe(0);
    expect(v.sliceLocations[1]).toBeCloseTo(0.8, 9);
  });
});

describe("normalizeHu", () => {
  it("maps the window to [0, 1] with clamping", () => {
    const vol = {
      data: new Float64Array([-2048, -1024, 1023.5, 3071, 5000]),
      nx: 5,
      ny: 1,
      nz: 1,
      spacing: [1, 1, 1] as [number, number, number],
      sliceLocations: [0],
    };
    const out = normalizeHu(vol, { lo_hu: -1024, hi_hu: 3071 });
    expect(out.data[0]).toBe(0);
    expect(out.data[1]).toBe(0);
    expect(out.data[2]).toBeCloseTo(0.5, 6);
    expect(out.data[3]).toBe(1);
    expect(out.data[4]).toBe(1);
  });
});

describe("z replication", () => {
  it("maps each target location to its nearest source slice", () => {
    expect(nearestSliceIndices([0, 0.8, 1.6, 2.4], [0, 2])).toEqual([0, 0, 1, 1]);
  });

  it("replicates slices onto a denser grid", () => {
    const source = {
      data: new Float64Array([1, 1, 2, 2]), // two 1x2 slices
      nx: 2,
      ny: 1,
      nz: 2,
      spacing: [1, 1, 2] as [number, number, number],
      sliceLocations: [0, 2],
    };
    const out = replicateToGrid(source, [0, 0.8, 1.6, 2.0]);
    expect(out.nz).toBe(4);
    expect(Array.from(out.data)).toEqual([1, 1, 1, 1, 2, 2, 2, 2]);
    expect(out.sliceLocations).toEqual([0, 0.8, 1.6, 2.0]);
  });
});
