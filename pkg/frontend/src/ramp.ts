// Fixed 8-step heat ramp so the legend reads the same across snapshots.
// Index -1 means "draw nothing" (zero plausibility stays transparent).

export const HEAT_RAMP: readonly string[] = [
  "#1c2f4a",
  "#1f4068",
  "#215f8c",
  "#2389a8",
  "#2fb39b",
  "#7fcc6b",
  "#d8d44e",
  "#f2953b",
];

export function rampIndex(v: number): number {
  if (v <= 0) return -1;
  return Math.min(HEAT_RAMP.length - 1, Math.floor(v * HEAT_RAMP.length));
}

// Report markers reuse the top half of the ramp so high trust reads hot.
export function trustColor(p: number): string {
  const idx = Math.max(0, rampIndex(p));
  return HEAT_RAMP[Math.max(3, idx)]!;
}
