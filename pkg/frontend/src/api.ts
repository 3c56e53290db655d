import { z } from "zod";

// Response shapes, mirrored from the service. Parsing at the boundary means a
// contract drift shows up as a loud ZodError naming the field, not as NaN
// somewhere in an SVG attribute.

export const DiagramPoint = z.object({
  activity: z.string(),
  omega: z.number(),
  value: z.number(),
  specialized: z.boolean(),
  quadrant: z.string().nullable(),
  on_frontier: z.boolean(),
});

export const Diagram = z.object({
  location: z.string(),
  value_kind: z.string(),
  orientation: z.enum(["higher", "lower"]),
  thresholds: z.object({
    omega: z.number().nullable(),
    value: z.number(),
  }),
  points: z.array(DiagramPoint),
  summary: z.object({
    corr: z.number().nullable(),
    counts: z.record(z.number()),
  }),
});

export const WhatIf = z.object({
  location: z.string(),
  added: z.array(z.string()),
  value_kind: z.string(),
  recompute: z.string(),
  deltas: z.array(
    z.object({
      activity: z.string(),
      before: z.number(),
      after: z.number(),
      delta: z.number(),
    }),
  ),
  diagram: Diagram,
});

export const Evaluation = z.object({
  expected_time: z.number(),
  method: z.string(),
  policy: z.string(),
  plan: z.array(z.string()),
  probabilities: z.array(z.number()),
  tie_break: z.string(),
  ci: z
    .object({
      trials: z.number(),
      seed: z.number(),
      mean: z.number(),
      stderr: z.number(),
      level: z.number(),
      lo: z.number(),
      hi: z.number(),
    })
    .nullable(),
});

export const Portfolio = z.object({
  eci: z.number(),
  related_share: z.number(),
  unrelated_share: z.number(),
  schedule: z.object({
    peak: z.number(),
    width: z.number(),
    max_unrelated: z.number(),
  }),
});

export type DiagramPoint = z.infer<typeof DiagramPoint>;
export type Diagram = z.infer<typeof Diagram>;
export type WhatIf = z.infer<typeof WhatIf>;
export type Evaluation = z.infer<typeof Evaluation>;
export type Portfolio = z.infer<typeof Portfolio>;

export interface Instance {
  nodes: string[];
  edges: [string, string][];
  active: string[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function jsonOrThrow(res: Response): Promise<unknown> {
  if (res.ok) {
    return res.json();
  }
  let code = "http_error";
  let message = `${res.status} ${res.statusText}`;
  try {
    const body = (await res.json()) as { code?: string; message?: string };
    if (body.code) code = body.code;
    if (body.message) message = body.message;
  } catch {
    // non-JSON error body; keep the status line
  }
  throw new ApiError(res.status, code, message);
}

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetcher: typeof fetch = (...args) => fetch(...args),
  ) {}

  private url(workspace: string, tail: string): string {
    return `${this.base}/v1/workspaces/${encodeURIComponent(workspace)}${tail}`;
  }

  async frontier(workspace: string, location: string, value: string): Promise<Diagram> {
    const u = this.url(workspace, `/frontier/${encodeURIComponent(location)}`);
    const res = await this.fetcher(`${u}?value=${encodeURIComponent(value)}`);
    return Diagram.parse(await jsonOrThrow(res));
  }

  async whatif(
    workspace: string,
    location: string,
    add: string[],
    value: string,
  ): Promise<WhatIf> {
    const res = await this.fetcher(this.url(workspace, "/whatif"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ location, add, value }),
    });
    return WhatIf.parse(await jsonOrThrow(res));
  }

  async simulate(workspace: string, instance: Instance, policy: string): Promise<Evaluation> {
    const res = await this.fetcher(this.url(workspace, "/simulate"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ ...instance, policy }),
    });
    return Evaluation.parse(await jsonOrThrow(res));
  }

  async portfolio(workspace: string, eci: number): Promise<Portfolio> {
    const res = await this.fetcher(this.url(workspace, `/portfolio`) + `?eci=${eci}`);
    return Portfolio.parse(await jsonOrThrow(res));
  }
}
