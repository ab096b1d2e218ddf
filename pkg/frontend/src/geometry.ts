/**
 * Rectangle arithmetic in original-PDF point coordinates, top-left origin.
 *
 * This module mirrors the server's geometry exactly — same operations in the
 * same order — so that the box a client predicts for a selection is the box
 * the server stores.  The parity corpus in tests/fixtures pins this
 * bit-for-bit against server-computed outputs.  Pixel frames are transient:
 * produced by rescaleBounds at render time, never persisted.
 */

export interface Bounds {
  left: number;
  top: number;
  right: number;
  bottom: number;
}

export interface PageInfo {
  index: number;
  width: number;
  height: number;
}

/** Token as served by `GET /api/doc/{doc}/tokens`. */
export interface WireToken {
  x: number;
  y: number;
  width: number;
  height: number;
  text: string;
}

export interface PageLayout {
  page: PageInfo;
  tokens: WireToken[];
}

export const DEFAULT_SNAP_PADDING = 3.0;

export function tokenBounds(token: WireToken): Bounds {
  return {
    left: token.x,
    top: token.y,
    right: token.x + token.width,
    bottom: token.y + token.height,
  };
}

/** Overlap area of two rectangles; 0 when they merely touch. */
export function intersectionArea(a: Bounds, b: Bounds): number {
  const w = Math.min(a.right, b.right) - Math.max(a.left, b.left);
  const h = Math.min(a.bottom, b.bottom) - Math.max(a.top, b.top);
  if (w <= 0 || h <= 0) {
    return 0;
  }
  return w * h;
}

export function union(boxes: Bounds[]): Bounds {
  if (boxes.length === 0) {
    throw new Error("union of zero rectangles is undefined");
  }
  return {
    left: Math.min(...boxes.map((b) => b.left)),
    top: Math.min(...boxes.map((b) => b.top)),
    right: Math.max(...boxes.map((b) => b.right)),
    bottom: Math.max(...boxes.map((b) => b.bottom)),
  };
}

/**
 * Indices of tokens overlapping the drag rectangle with positive area,
 * in layout order.  Grazing contact does not select.
 */
export function selectTokens(layout: PageLayout, dragRect: Bounds): number[] {
  const out: number[] = [];
  layout.tokens.forEach((token, index) => {
    if (intersectionArea(tokenBounds(token), dragRect) > 0) {
      out.push(index);
    }
  });
  return out;
}

/**
 * Padded axis-aligned union of token boxes, clamped to the page.
 * Left/top never go below 0; right/bottom are clamped to the page
 * dimensions when a page is given.
 */
export function snapBounds(
  tokens: WireToken[],
  padding: number = DEFAULT_SNAP_PADDING,
  page?: PageInfo,
): Bounds {
  if (tokens.length === 0) {
    throw new Error("cannot snap an empty token selection");
  }
  if (padding < 0) {
    throw new Error(`padding must be non-negative, got ${padding}`);
  }
  const box = union(tokens.map(tokenBounds));
  const left = Math.max(0, box.left - padding);
  const top = Math.max(0, box.top - padding);
  let right = box.right + padding;
  let bottom = box.bottom + padding;
  if (page !== undefined) {
    right = Math.min(page.width, right);
    bottom = Math.min(page.height, bottom);
  }
  // tokens may overhang the page by the extraction slack; keep the box valid
  right = Math.max(right, left);
  bottom = Math.max(bottom, top);
  return { left, top, right, bottom };
}

/**
 * Project a rectangle from one page size to another; x scales by the width
 * ratio, y by the height ratio.
 */
export function rescaleBounds(
  b: Bounds,
  fromSize: [number, number],
  toSize: [number, number],
): Bounds {
  const [fw, fh] = fromSize;
  const [tw, th] = toSize;
  if (fw <= 0 || fh <= 0 || tw <= 0 || th <= 0) {
    throw new Error(`page dimensions must be positive: from=${fromSize} to=${toSize}`);
  }
  const sx = tw / fw;
  const sy = th / fh;
  return { left: b.left * sx, top: b.top * sy, right: b.right * sx, bottom: b.bottom * sy };
}
