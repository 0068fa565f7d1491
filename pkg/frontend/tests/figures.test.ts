import { existsSync, mkdtempSync, readFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { fileURLToPath } from 'node:url';
import { describe, expect, it } from 'vitest';

import { loadRunCsv } from '../src/csv.js';
import { rewardCurveOption, renderFigure } from '../src/figures.js';
import { FigureSpecSchema } from '../src/spec.js';

const fixture = (name: string) =>
  fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));

const outDir = mkdtempSync(join(tmpdir(), 'figures-'));

function spec(kind: string, input: string, extra: object = {}) {
  return FigureSpecSchema.parse({
    kind,
    input: fixture(input),
    output: join(outDir, `${kind}.svg`),
    ...extra,
  });
}

describe('acceptance: figure rendering', () => {
  it('renders all four figure kinds from simulator output', () => {
    const cases = [
      spec('reward_curve', 'fixture_seed7.csv', { window: 10 }),
      spec('success_rate', 'fixture_seed7.csv'),
      spec('comparison', 'compare.json'),
      spec('delay_sweep', 'fixture_bf_sweep_prompt_token_mean.csv'),
    ];
    for (const s of cases) {
      const svg = renderFigure(s);
      expect(svg.startsWith('<svg')).toBe(true);
      expect(svg).toContain('</svg>');
      expect(existsSync(s.output)).toBe(true);
      expect(readFileSync(s.output, 'utf8')).toBe(svg);
    }
    console.log('[PASS] figure-kinds: reward_curve, success_rate, ' +
      'comparison, delay_sweep rendered to SVG');
  });

  it('window-1 smoothing plots the raw reward values', () => {
    const rows = loadRunCsv(fixture('fixture_seed7.csv'));
    const option = rewardCurveOption(rows, 1);
    const series = (option.series as Array<{ data: [number, number][] }>)[0];
    expect(series.data).toHaveLength(rows.length);
    rows.forEach((row, i) => {
      expect(series.data[i][0]).toBe(row.step);
      expect(Object.is(series.data[i][1], row.reward)).toBe(true);
    });
    console.log('[PASS] window-1-identity: smoothed series equals raw rewards');
  });
});

describe('figure details', () => {
  it('titles default per kind and can be overridden', () => {
    const rows = loadRunCsv(fixture('fixture_seed7.csv'));
    const byDefault = rewardCurveOption(rows, 25);
    expect((byDefault.title as { text: string }).text).toContain('window 25');
    const custom = rewardCurveOption(rows, 25, 'my title');
    expect((custom.title as { text: string }).text).toBe('my title');
  });

  it('rejects a kind/input mismatch with the file named', () => {
    // JSON into the CSV path fails either on delimiter sniffing or on the
    // column check; both name the offending file
    expect(() => renderFigure(spec('reward_curve', 'compare.json')))
      .toThrow(/compare\.json/);
  });
});
