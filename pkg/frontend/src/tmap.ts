/**
 * Reader for TMAP files, the core's binary deformation-map format:
 * little-endian `TMAP` magic, u32 version (= 1), u32 H, u32 W, f32 d_max,
 * then H*W row-major f32 depths in meters.
 */

const MAGIC = "TMAP";
const VERSION = 1;
const HEADER_BYTES = 20;

export class TmapFormatError extends Error {}

/** One rendered deformation map: H*W penetration depths in meters. */
export class DeformMap {
  constructor(
    readonly h: number,
    readonly w: number,
    /** depth saturation value in meters */
    readonly dMax: number,
    /** row-major depths, length h*w */
    readonly depths: Float32Array,
  ) {}

  /** depth at row u, column v */
  at(u: number, v: number): number {
    if (u < 0 || u >= this.h || v < 0 || v >= this.w) {
      throw new RangeError(`pixel (${u}, ${v}) outside ${this.h}x${this.w} map`);
    }
    return this.depths[u * this.w + v]!;
  }

  maxDepth(): number {
    let best = 0;
    for (const d of this.depths) if (d > best) best = d;
    return best;
  }

  /** the raw depth section, byte-for-byte as stored in the file */
  depthBytes(): Uint8Array {
    return new Uint8Array(this.depths.buffer, this.depths.byteOffset, this.depths.byteLength);
  }
}

/** Parse a TMAP buffer. Throws TmapFormatError on malformed input. */
export function parseTmap(bytes: Uint8Array, source = "<buffer>"): DeformMap {
  if (bytes.byteLength < HEADER_BYTES) {
    throw new TmapFormatError(`${source}: truncated header (${bytes.byteLength} bytes)`);
  }
  const view = new DataView(bytes.buffer, bytes.byteOffset, bytes.byteLength);
  const magic = String.fromCharCode(bytes[0]!, bytes[1]!, bytes[2]!, bytes[3]!);
  if (magic !== MAGIC) {
    throw new TmapFormatError(`${source}: bad magic ${JSON.stringify(magic)}`);
  }
  const version = view.getUint32(4, true);
  if (version !== VERSION) {
    throw new TmapFormatError(`${source}: unsupported version ${version}`);
  }
  const h = view.getUint32(8, true);
  const w = view.getUint32(12, true);
  const dMax = view.getFloat32(16, true);
  const expected = HEADER_BYTES + h * w * 4;
  if (bytes.byteLength !== expected) {
    throw new TmapFormatError(`${source}: expected ${expected} bytes for ${h}x${w}, got ${bytes.byteLength}`);
  }
  // copy into a fresh aligned buffer; the input may sit at any byte offset
  const depths = new Float32Array(h * w);
  for (let i = 0; i < depths.length; i++) {
    depths[i] = view.getFloat32(HEADER_BYTES + i * 4, true);
  }
  return new DeformMap(h, w, dMax, depths);
}
