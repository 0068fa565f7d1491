import { readFileSync } from 'node:fs';
import { z } from 'zod';

export const FIGURE_KINDS = [
  'reward_curve', 'success_rate', 'comparison', 'delay_sweep',
] as const;

export const FigureSpecSchema = z.object({
  kind: z.enum(FIGURE_KINDS),
  input: z.string().min(1),
  output: z.string().min(1),
  window: z.number().int().min(1).default(1),
  title: z.string().optional(),
  width: z.number().int().min(100).default(800),
  height: z.number().int().min(100).default(480),
});

export type FigureSpec = z.infer<typeof FigureSpecSchema>;

/** Read one spec or an array of specs from a JSON file. */
export function loadSpecs(path: string): FigureSpec[] {
  const raw = JSON.parse(readFileSync(path, 'utf8'));
  const items = Array.isArray(raw) ? raw : [raw];
  return items.map((item, i) => {
    const checked = FigureSpecSchema.safeParse(item);
    if (!checked.success) {
      const issue = checked.error.issues[0];
      throw new Error(
        `${path}[${i}]: ${issue.message} at ${issue.path.join('.') || '(root)'}`);
    }
    return checked.data;
  });
}
