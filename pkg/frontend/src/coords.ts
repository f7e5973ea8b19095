/**
 * Mapping from click positions on a (possibly scaled) rendered image back to
 * the image's native pixel grid. The service validates and samples pixels in
 * native coordinates, so display zoom must never leak into the payload.
 */

export interface DisplayGeometry {
  naturalWidth: number;
  naturalHeight: number;
  displayedWidth: number;
  displayedHeight: number;
}

export interface PixelPoint {
  x: number;
  y: number;
}

function clamp(value: number, max: number): number {
  return Math.min(Math.max(value, 0), max);
}

/**
 * Converts CSS-pixel click coordinates (relative to the rendered image's
 * top-left corner) to integer native-pixel coordinates, clamped in-bounds.
 */
export function toNativePixel(
  clickX: number,
  clickY: number,
  geom: DisplayGeometry,
): PixelPoint {
  if (geom.displayedWidth <= 0 || geom.displayedHeight <= 0) {
    throw new Error('displayed size must be positive');
  }
  const x = Math.floor((clickX * geom.naturalWidth) / geom.displayedWidth);
  const y = Math.floor((clickY * geom.naturalHeight) / geom.displayedHeight);
  return {
    x: clamp(x, geom.naturalWidth - 1),
    y: clamp(y, geom.naturalHeight - 1),
  };
}
