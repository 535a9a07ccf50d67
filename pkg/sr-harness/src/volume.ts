/**
 * Reader for the MetaImage-subset volume container written by the
 * thickslice exporter: ASCII `Key = Value` header, then little-endian raw
 * voxels with x varying fastest (so a [z][y][x] C-order layout).
 */

import * as fs from "node:fs";
import * as path from "node:path";

export interface HuWindow {
  lo_hu: number;
  hi_hu: number;
}

export interface Volume {
  /** voxels in [z][y][x] order, length nz*ny*nx */
  data: Float64Array;
  nx: number;
  ny: number;
  nz: number;
  spacing: [number, number, number]; // (x, y, z) mm
  sliceLocations: number[]; // offsetZ + i * spacingZ
}

const ELEMENT_BYTES: Record<string, number> = { MET_SHORT: 2, MET_FLOAT: 4 };

export function readVolume(filePath: string): Volume {
  const blob = fs.readFileSync(filePath);
  // header is ASCII lines up to and including the ElementDataFile line
  const fields = new Map<string, string>();
  let cursor = 0;
  while (cursor < blob.length) {
    const nl = blob.indexOf(0x0a, cursor);
    const end = nl === -1 ? blob.length : nl;
    const line = blob.toString("ascii", cursor, end).trim();
    cursor = nl === -1 ? blob.length : nl + 1;
    if (line.length === 0) continue;
    const eq = line.indexOf("=");
    if (eq === -1) throw new Error(`${filePath}: malformed header line: ${line}`);
    const key = line.slice(0, eq).trim();
    fields.set(key, line.slice(eq + 1).trim());
    if (key === "ElementDataFile") break;
  }
  const dataFile = fields.get("ElementDataFile");
  if (!dataFile) throw new Error(`${filePath}: missing ElementDataFile`);
  const elementType = fields.get("ElementType") ?? "";
  const bytesPer = ELEMENT_BYTES[elementType];
  if (!bytesPer) throw new Error(`${filePath}: unsupported ElementType ${elementType}`);
  const dims = (fields.get("DimSize") ?? "").split(/\s+/).map(Number);
  if (dims.length !== 3 || dims.some((d) => !Number.isInteger(d) || d < 1)) {
    throw new Error(`${filePath}: bad DimSize ${fields.get("DimSize")}`);
  }
  const [nx, ny, nz] = dims;
  const spacingParts = (fields.get("ElementSpacing") ?? "1 1 1").split(/\s+/).map(Number);
  const offsetParts = (fields.get("Offset") ?? "0 0 0").split(/\s+/).map(Number);

  const payload =
    dataFile === "LOCAL"
      ? blob.subarray(cursor)
      : fs.readFileSync(path.join(path.dirname(filePath), dataFile));
  const expected = nx * ny * nz * bytesPer;
  if (payload.length !== expected) {
    throw new Error(
      `${filePath}: payload has ${payload.length} bytes, header implies ${expected}`,
    );
  }
  const n = nx * ny * nz;
  const data = new Float64Array(n);
  if (elementType === "MET_FLOAT") {
    for (let i = 0; i < n; i++) data[i] = payload.readFloatLE(i * 4);
  } else {
    for (let i = 0; i < n; i++) data[i] = payload.readInt16LE(i * 2);
  }
  const sliceLocations: number[] = [];
  for (let i = 0; i < nz; i++) sliceLocations.push(offsetParts[2] + i * spacingParts[2]);
  return {
    data,
    nx,
    ny,
    nz,
    spacing: [spacingParts[0], spacingParts[1], spacingParts[2]],
    sliceLocations,
  };
}

/**
 * clamp((v - lo) / (hi - lo), 0, 1) on a copy. Values are rounded to
 * float32 to match the evaluation pipeline, which stores normalized
 * volumes in 32-bit floats; metric parity across tools depends on it.
 */
export function normalizeHu(volume: Volume, window: HuWindow): Volume {
  const range = window.hi_hu - window.lo_hu;
  const data = new Float64Array(volume.data.length);
  for (let i = 0; i < data.length; i++) {
    const v = (volume.data[i] - window.lo_hu) / range;
    data[i] = Math.fround(v < 0 ? 0 : v > 1 ? 1 : v);
  }
  return { ...volume, data };
}

/** For each target z location, the index of the nearest source slice. */
export function nearestSliceIndices(
  targetLocations: number[],
  sourceLocations: number[],
): number[] {
  return targetLocations.map((t) => {
    let best = 0;
    let bestDist = Math.abs(sourceLocations[0] - t);
    for (let i = 1; i < sourceLocations.length; i++) {
      const d = Math.abs(sourceLocations[i] - t);
      if (d < bestDist) {
        best = i;
        bestDist = d;
      }
    }
    return best;
  });
}

/**
 * Replicate source slices onto a target z grid by nearest location,
 * producing a volume with the target's slice count.
 */
export function replicateToGrid(source: Volume, targetLocations: number[]): Volume {
  const map = nearestSliceIndices(targetLocations, source.sliceLocations);
  const sliceSize = source.nx * source.ny;
  const data = new Float64Array(sliceSize * targetLocations.length);
  map.forEach((src, i) => {
    data.set(source.data.subarray(src * sliceSize, (src + 1) * sliceSize), i * sliceSize);
  });
  return {
    data,
    nx: source.nx,
    ny: source.ny,
    nz: targetLocations.length,
    spacing: source.spacing,
    sliceLocations: [...targetLocations],
  };
}
