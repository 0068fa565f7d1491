import { parseArgs } from 'node:util';

import { renderFigure } from './figures.js';
import { FIGURE_KINDS, FigureSpecSchema, loadSpecs } from './spec.js';

const USAGE = `usage:
  plot --spec figures.json
  plot --kind <${FIGURE_KINDS.join('|')}> --input <csv|json> --output <svg>
       [--window N] [--title T] [--width W] [--height H]`;

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        spec: { type: 'string' },
        kind: { type: 'string' },
        input: { type: 'string' },
        output: { type: 'string' },
        window: { type: 'string' },
        title: { type: 'string' },
        width: { type: 'string' },
        height: { type: 'string' },
        help: { type: 'boolean', short: 'h' },
      },
    }).values;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    console.error(USAGE);
    return 2;
  }
  if (args.help) {
    console.log(USAGE);
    return 0;
  }

  try {
    let specs;
    if (args.spec) {
      specs = loadSpecs(args.spec);
    } else {
      const checked = FigureSpecSchema.safeParse({
        kind: args.kind,
        input: args.input,
        output: args.output,
        window: args.window ? Number(args.window) : undefined,
        title: args.title,
        width: args.width ? Number(args.width) : undefined,
        height: args.height ? Number(args.height) : undefined,
      });
      if (!checked.success) {
        const issue = checked.error.issues[0];
        console.error(`error: ${issue.path.join('.') || 'args'}: ${issue.message}`);
        console.error(USAGE);
        return 2;
      }
      specs = [checked.data];
    }
    for (const spec of specs) {
      renderFigure(spec);
      console.log(`wrote ${spec.output} (${spec.kind} from ${spec.input})`);
    }
    return 0;
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : err}`);
    return 1;
  }
}

const entry = process.argv[1] ?? '';
if (entry.endsWith('cli.js') || entry.endsWith('cli.ts')) {
  process.exit(main(process.argv.slice(2)));
}
