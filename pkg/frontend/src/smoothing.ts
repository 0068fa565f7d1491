/** Trailing moving average; entry i averages the last `window` values up to i. */
export function trailingMean(values: number[], window: number): number[] {
  if (!Number.isInteger(window) || window < 1) {
    throw new Error(`window must be a positive integer, got ${window}`);
  }
  if (window === 1) {
    // bit-exact identity, no accumulator round-off
    return values.slice();
  }
  const out = new Array<number>(values.length);
  for (let i = 0; i < values.length; i++) {
    const lo = Math.max(0, i - window + 1);
    let sum = 0;
    for (let j = lo; j <= i; j++) sum += values[j];
    out[i] = sum / (i - lo + 1);
  }
  return out;
}
