import { writeFileSync } from 'node:fs';
import * as echarts from 'echarts';
import type { EChartsOption } from 'echarts';

import { CompareRun, StepRow, SweepRow, loadCompareJson, loadRunCsv,
         loadSweepCsv } from './csv.js';
import { trailingMean } from './smoothing.js';
import { FigureSpec } from './spec.js';

function baseAxes(xName: string, yName: string): EChartsOption {
  return {
    backgroundColor: '#ffffff',
    animation: false,
    grid: { left: 70, right: 30, top: 50, bottom: 50 },
    xAxis: { type: 'value', name: xName, nameLocation: 'middle', nameGap: 30 },
    yAxis: { type: 'value', name: yName, nameLocation: 'middle', nameGap: 50 },
  };
}

export function rewardCurveOption(rows: StepRow[], window: number,
                                  title?: string): EChartsOption {
  const smoothed = trailingMean(rows.map((r) => r.reward), window);
  return {
    ...baseAxes('step', 'reward'),
    title: { text: title ?? `Step reward (trailing mean, window ${window})` },
    series: [{
      type: 'line',
      name: 'reward',
      showSymbol: false,
      data: rows.map((r, i) => [r.step, smoothed[i]]),
    }],
  };
}

export function successRateOption(rows: StepRow[], window: number,
                                  title?: string): EChartsOption {
  const smoothed = trailingMean(rows.map((r) => r.success_rate), window);
  return {
    ...baseAxes('step', 'success rate'),
    title: { text: title ?? 'Quality success rate' },
    yAxis: { type: 'value', name: 'success rate', min: 0, max: 1,
             nameLocation: 'middle', nameGap: 50 },
    series: [{
      type: 'line',
      name: 'success_rate',
      showSymbol: false,
      data: rows.map((r, i) => [r.step, smoothed[i]]),
    }],
  };
}

export function comparisonOption(runs: CompareRun[],
                                 title?: string): EChartsOption {
  return {
    backgroundColor: '#ffffff',
    animation: false,
    title: { text: title ?? 'Mean reward by policy' },
    legend: { top: 28 },
    grid: { left: 70, right: 70, top: 70, bottom: 50 },
    xAxis: { type: 'category', data: runs.map((r) => r.label) },
    yAxis: [
      { type: 'value', name: 'mean reward', nameLocation: 'middle', nameGap: 50 },
      { type: 'value', name: 'success rate', min: 0, max: 1, nameLocation: 'middle',
        nameGap: 50 },
    ],
    series: [
      { type: 'bar', name: 'mean reward', data: runs.map((r) => r.mean_reward) },
      {
        type: 'scatter',
        name: 'success rate',
        yAxisIndex: 1,
        symbolSize: 10,
        data: runs.map((r) => r.success_rate),
      },
    ],
  };
}

export function delaySweepOption(rows: SweepRow[],
                                 title?: string): EChartsOption {
  // average the replications per sweep value, keep first-seen order
  const groups = new Map<string, number[]>();
  for (const row of rows) {
    const bucket = groups.get(row.value) ?? [];
    bucket.push(row.mean_delay_s);
    groups.set(row.value, bucket);
  }
  const values = [...groups.keys()];
  const means = values.map((v) => {
    const ds = groups.get(v)!;
    return ds.reduce((a, b) => a + b, 0) / ds.length;
  });
  const axisName = rows.length > 0 ? rows[0].axis : 'value';
  return {
    backgroundColor: '#ffffff',
    animation: false,
    title: { text: title ?? `Mean delay vs ${axisName}` },
    grid: { left: 70, right: 30, top: 50, bottom: 50 },
    xAxis: { type: 'category', name: axisName, nameLocation: 'middle',
             nameGap: 30, data: values },
    yAxis: { type: 'value', name: 'mean delay (s)', nameLocation: 'middle',
             nameGap: 50 },
    series: [{ type: 'line', name: 'mean_delay_s', data: means }],
  };
}

export function buildOption(spec: FigureSpec): EChartsOption {
  switch (spec.kind) {
    case 'reward_curve':
      return rewardCurveOption(loadRunCsv(spec.input), spec.window, spec.title);
    case 'success_rate':
      return successRateOption(loadRunCsv(spec.input), spec.window, spec.title);
    case 'comparison':
      return comparisonOption(loadCompareJson(spec.input), spec.title);
    case 'delay_sweep':
      return delaySweepOption(loadSweepCsv(spec.input), spec.title);
  }
}

export function renderSvg(option: EChartsOption, width: number,
                          height: number): string {
  const chart = echarts.init(null, undefined, {
    renderer: 'svg',
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

/** Build the figure described by spec and write the SVG; returns the SVG text. */
export function renderFigure(spec: FigureSpec): string {
  const svg = renderSvg(buildOption(spec), spec.width, spec.height);
  writeFileSync(spec.output, svg, 'utf8');
  return svg;
}
