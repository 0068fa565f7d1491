import { readFileSync } from 'node:fs';
import Papa from 'papaparse';
import { z } from 'zod';

// Column lists mirror the simulator's writers; a mismatch should fail loudly
// here rather than produce an empty plot.
export const RUN_COLUMNS = [
  'step', 'task_type', 'token_bin', 'decision', 'explored', 'delay_s',
  'reward', 'quality_ok', 'cum_reward', 'success_rate',
] as const;

export const SWEEP_COLUMNS = [
  'axis', 'value', 'replication', 'seed', 'mean_delay_s', 'mean_reward',
  'success_rate',
] as const;

export interface StepRow {
  step: number;
  task_type: string;
  token_bin: number;
  decision: string;
  explored: boolean;
  delay_s: number;
  reward: number;
  quality_ok: boolean;
  cum_reward: number;
  success_rate: number;
}

export interface SweepRow {
  axis: string;
  value: string;
  replication: number;
  seed: number;
  mean_delay_s: number;
  mean_reward: number;
  success_rate: number;
}

const CompareFile = z.object({
  runs: z.array(z.object({
    label: z.string(),
    policy: z.string(),
    replications: z.number(),
    mean_reward: z.number(),
    mean_reward_min: z.number(),
    mean_reward_max: z.number(),
    mean_delay_s: z.number(),
    success_rate: z.number(),
  }).passthrough()),
});

export type CompareRun = z.infer<typeof CompareFile>['runs'][number];

function parseCsv(path: string, columns: readonly string[]) {
  const text = readFileSync(path, 'utf8').trim();
  const parsed = Papa.parse<Record<string, unknown>>(text, {
    header: true,
    dynamicTyping: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    throw new Error(`${path}: ${e.message} (row ${e.row})`);
  }
  const fields = parsed.meta.fields ?? [];
  const missing = columns.filter((c) => !fields.includes(c));
  if (missing.length > 0) {
    throw new Error(`${path}: missing columns: ${missing.join(', ')}`);
  }
  return parsed.data;
}

function asBool(v: unknown): boolean {
  return v === true || v === 'true';
}

export function loadRunCsv(path: string): StepRow[] {
  return parseCsv(path, RUN_COLUMNS).map((r) => ({
    step: Number(r.step),
    task_type: String(r.task_type),
    token_bin: Number(r.token_bin),
    decision: String(r.decision),
    explored: asBool(r.explored),
    delay_s: Number(r.delay_s),
    reward: Number(r.reward),
    quality_ok: asBool(r.quality_ok),
    cum_reward: Number(r.cum_reward),
    success_rate: Number(r.success_rate),
  }));
}

export function loadSweepCsv(path: string): SweepRow[] {
  return parseCsv(path, SWEEP_COLUMNS).map((r) => ({
    axis: String(r.axis),
    // profile_pair sweeps carry string values, numeric axes parse as numbers;
    // keep the original text so groups stay distinct either way
    value: String(r.value),
    replication: Number(r.replication),
    seed: Number(r.seed),
    mean_delay_s: Number(r.mean_delay_s),
    mean_reward: Number(r.mean_reward),
    success_rate: Number(r.success_rate),
  }));
}

export function loadCompareJson(path: string): CompareRun[] {
  const raw = JSON.parse(readFileSync(path, 'utf8'));
  const checked = CompareFile.safeParse(raw);
  if (!checked.success) {
    throw new Error(`${path}: ${checked.error.issues[0].message} at ` +
      checked.error.issues[0].path.join('.'));
  }
  return checked.data.runs;
}
