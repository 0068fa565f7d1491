import { mkdtempSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { describe, expect, it } from 'vitest';

import { loadCompareJson, loadRunCsv, loadSweepCsv } from '../src/csv.js';

const fixture = (name: string) =>
  fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));

describe('loadRunCsv', () => {
  it('parses the simulator output with typed columns', () => {
    const rows = loadRunCsv(fixture('fixture_seed7.csv'));
    expect(rows).toHaveLength(120);
    expect(rows[0].step).toBe(0);
    expect(rows[119].step).toBe(119);
    expect(typeof rows[0].reward).toBe('number');
    expect(typeof rows[0].explored).toBe('boolean');
    expect(['local', 'offload']).toContain(rows[0].decision);
    expect(rows[0].success_rate).toBeGreaterThanOrEqual(0);
    expect(rows[0].success_rate).toBeLessThanOrEqual(1);
  });

  it('rejects a file with missing columns', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figtest-'));
    const bad = join(dir, 'bad.csv');
    writeFileSync(bad, 'step,reward\n0,1.5\n', 'utf8');
    expect(() => loadRunCsv(bad)).toThrow(/missing columns/);
  });
});

describe('loadSweepCsv', () => {
  it('parses sweep rows and keeps values as group keys', () => {
    const rows = loadSweepCsv(fixture('fixture_bf_sweep_prompt_token_mean.csv'));
    expect(rows).toHaveLength(6);
    expect(new Set(rows.map((r) => r.value)).size).toBe(3);
    expect(rows.every((r) => r.axis === 'prompt_token_mean')).toBe(true);
    expect(rows.every((r) => r.mean_delay_s > 0)).toBe(true);
  });
});

describe('loadCompareJson', () => {
  it('parses compare output', () => {
    const runs = loadCompareJson(fixture('compare.json'));
    expect(runs).toHaveLength(2);
    const labels = runs.map((r) => r.label);
    expect(labels).toContain('fixture');
    expect(labels).toContain('fixture_bf');
  });

  it('rejects malformed content', () => {
    const dir = mkdtempSync(join(tmpdir(), 'figtest-'));
    const bad = join(dir, 'bad.json');
    writeFileSync(bad, JSON.stringify({ runs: [{ label: 3 }] }), 'utf8');
    expect(() => loadCompareJson(bad)).toThrow();
  });
});
