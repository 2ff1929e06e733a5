/**
 * Trainer-side reward adapter: a compute_score-style callable that delegates
 * every bit of math to the deconflict HTTP service. The shim is pure
 * transport — it POSTs a reward request and hands back the advantages array
 * (or raw scores, if selected) untouched.
 */

export const STRATEGIES = [
  "dgr",
  "dgr-random",
  "dgr-reverse",
  "pref",
  "elo",
  "listwise",
  "pointwise",
] as const;

export type Strategy = (typeof STRATEGIES)[number];

export interface ShimConfig {
  /** Base URL of the reward service, e.g. http://127.0.0.1:8000 */
  serviceUrl: string;
  strategy: Strategy;
  timeoutMs?: number;
  seed?: number;
  /** Transport retries after the first attempt (network errors and 5xx). */
  retries?: number;
  retryBackoffMs?: number;
  /** Which response array to return; trainers normally want advantages. */
  returnField?: "advantages" | "scores";
}

export interface RewardDiagnostics {
  conflict_found: boolean;
  removed_edges: number[][];
  reversed_edges: number[][];
  fas_method: string | null;
  fallback_verdicts: number;
  scc_sizes: number[];
  degenerate: boolean;
  notes: string[];
}

export interface RewardResponse {
  id: string;
  scores: number[];
  advantages: number[];
  diagnostics: RewardDiagnostics;
}

/** Transport failed after exhausting its retry budget; safe to retry later. */
export class ShimTransportError extends Error {}

/** The service rejected the request shape or strategy; retrying won't help. */
export class ShimConfigError extends Error {}

const DEFAULT_TIMEOUT_MS = 30_000;
const DEFAULT_RETRIES = 2;
const DEFAULT_BACKOFF_MS = 250;

function validate(config: ShimConfig): void {
  if (!config.serviceUrl) {
    throw new ShimConfigError("serviceUrl must not be empty");
  }
  if (!STRATEGIES.includes(config.strategy)) {
    throw new ShimConfigError(
      `unknown strategy "${config.strategy}"; expected one of ${STRATEGIES.join(", ")}`
    );
  }
}

const sleep = (ms: number) => new Promise((resolve) => setTimeout(resolve, ms));

async function postRewardRequest(
  config: ShimConfig,
  body: Record<string, unknown>
): Promise<RewardResponse> {
  const url = `${config.serviceUrl.replace(/\/+$/, "")}/v1/rewards`;
  const timeoutMs = config.timeoutMs ?? DEFAULT_TIMEOUT_MS;
  const retries = config.retries ?? DEFAULT_RETRIES;
  const backoffMs = config.retryBackoffMs ?? DEFAULT_BACKOFF_MS;

  let lastError: unknown;
  for (let attempt = 0; attempt <= retries; attempt++) {
    if (attempt > 0) {
      await sleep(backoffMs * 2 ** (attempt - 1));
    }
    let response: Response;
    try {
      response = await fetch(url, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
        signal: AbortSignal.timeout(timeoutMs),
      });
    } catch (error) {
      lastError = error; // network failure or timeout: retriable
      continue;
    }
    if (response.ok) {
      return (await response.json()) as RewardResponse;
    }
    const detail = await response.text().catch(() => "");
    if (response.status === 400 || response.status === 422) {
      throw new ShimConfigError(
        `service rejected the request (${response.status}): ${detail}`
      );
    }
    lastError = new Error(`HTTP ${response.status}: ${detail}`);
  }
  throw new ShimTransportError(
    `reward service unreachable after ${retries + 1} attempts: ${String(lastError)}`
  );
}

/** Full response document, for callers that want diagnostics too. */
export async function fetchRewards(
  query: string,
  responses: string[],
  config: ShimConfig,
  id = "shim"
): Promise<RewardResponse> {
  validate(config);
  const body: Record<string, unknown> = {
    id,
    query,
    responses,
    strategy: config.strategy,
  };
  if (config.seed !== undefined) {
    body.seed = config.seed;
  }
  return postRewardRequest(config, body);
}

/**
 * The trainer-facing callable: one scalar per response, exactly as the
 * service computed them. Defaults to group-relative advantages.
 */
export async function computeScore(
  query: string,
  responses: string[],
  config: ShimConfig,
  id = "shim"
): Promise<number[]> {
  const document = await fetchRewards(query, responses, config, id);
  return config.returnField === "scores" ? document.scores : document.advantages;
}

/** Read configuration from env vars mirroring the service's. */
export function configFromEnv(env: NodeJS.ProcessEnv = process.env): ShimConfig {
  const config: ShimConfig = {
    serviceUrl: env.DECONFLICT_SERVICE_URL ?? "",
    strategy: (env.DECONFLICT_STRATEGY ?? "dgr") as Strategy,
  };
  if (env.DECONFLICT_TIMEOUT_MS) config.timeoutMs = Number(env.DECONFLICT_TIMEOUT_MS);
  if (env.DECONFLICT_SEED) config.seed = Number(env.DECONFLICT_SEED);
  if (env.DECONFLICT_RETURN_FIELD === "scores") config.returnField = "scores";
  validate(config);
  return config;
}
