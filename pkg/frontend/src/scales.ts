/** Local color interpolators; payload scale descriptors name these by convention. */

type Stop = [number, number, number];

const INFERNO: Stop[] = [
  [0, 0, 4], [27, 12, 65], [74, 12, 107], [120, 28, 109], [165, 44, 96],
  [207, 68, 70], [237, 105, 37], [251, 155, 6], [252, 255, 164],
];

const VIRIDIS: Stop[] = [
  [68, 1, 84], [71, 44, 122], [59, 81, 139], [44, 113, 142], [33, 144, 141],
  [39, 173, 129], [92, 200, 99], [170, 220, 50], [253, 231, 37],
];

function interpolate(stops: Stop[], t: number): string {
  const clamped = Math.min(1, Math.max(0, t));
  const scaled = clamped * (stops.length - 1);
  const i = Math.min(stops.length - 2, Math.floor(scaled));
  const f = scaled - i;
  const mix = (a: number, b: number) => Math.round(a + (b - a) * f);
  const [r1, g1, b1] = stops[i];
  const [r2, g2, b2] = stops[i + 1];
  return `rgb(${mix(r1, r2)},${mix(g1, g2)},${mix(b1, b2)})`;
}

export function inferno(t: number): string {
  return interpolate(INFERNO, t);
}

export function viridis(t: number): string {
  return interpolate(VIRIDIS, t);
}

export function scaleByName(name: string): (t: number) => string {
  return name === "viridis" ? viridis : inferno;
}

/** Bundle size to stroke width: thickness grows with the square root. */
export function flowThickness(size: number): number {
  return 1 + 2 * Math.sqrt(size);
}

/** Bundles get more transparent as they get thicker. */
export function flowOpacity(size: number): number {
  return Math.max(0.25, 0.85 - 0.05 * Math.sqrt(size));
}

export const BAND_COLORS: Record<string, string> = {
  green: "#2e9940",
  yellow: "#e0b62c",
  red: "#d9442c",
};

/** Width of a certainty bar in px per unit certainty. */
export const CERTAINTY_BAR_WIDTH = 40;
