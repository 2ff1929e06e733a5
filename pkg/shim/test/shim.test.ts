/** Unit tests against a local mock of the reward service. */

import { createServer, type Server } from "node:http";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import {
  ShimConfig,
  ShimConfigError,
  ShimTransportError,
  computeScore,
  configFromEnv,
  fetchRewards,
} from "../src/index.js";

const FIXTURE_RESPONSE = {
  id: "fx",
  scores: [3, 1, -1, -3],
  advantages: [1.3416407864998738, 0.4472135954999579, -0.4472135954999579, -1.3416407864998738],
  diagnostics: {
    conflict_found: false,
    removed_edges: [],
    reversed_edges: [],
    fas_method: "exact",
    fallback_verdicts: 0,
    scc_sizes: [1, 1, 1, 1],
    degenerate: false,
    notes: [],
  },
};

let server: Server;
let baseUrl: string;
let failuresBeforeSuccess = 0;
let lastBody: any = null;

beforeAll(async () => {
  server = createServer((req, res) => {
    let raw = "";
    req.on("data", (chunk) => (raw += chunk));
    req.on("end", () => {
      lastBody = JSON.parse(raw);
      if (req.url !== "/v1/rewards") {
        res.writeHead(404).end();
        return;
      }
      if (lastBody.strategy === "pointwise" && lastBody.responses.length === 0) {
        res.writeHead(422, { "Content-Type": "application/json" });
        res.end(JSON.stringify({ error: "empty group" }));
        return;
      }
      if (failuresBeforeSuccess > 0) {
        failuresBeforeSuccess--;
        res.writeHead(503).end("overloaded");
        return;
      }
      res.writeHead(200, { "Content-Type": "application/json" });
      res.end(JSON.stringify({ ...FIXTURE_RESPONSE, id: lastBody.id }));
    });
  });
  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  const address = server.address();
  if (typeof address === "object" && address) {
    baseUrl = `http://127.0.0.1:${address.port}`;
  }
});

afterAll(() => server.close());

function config(overrides: Partial<ShimConfig> = {}): ShimConfig {
  return {
    serviceUrl: baseUrl,
    strategy: "dgr",
    retries: 2,
    retryBackoffMs: 1,
    ...overrides,
  };
}

describe("computeScore", () => {
  it("returns the advantages array untouched", async () => {
    const result = await computeScore("q", ["a", "b", "c", "d"], config());
    expect(result).toEqual(FIXTURE_RESPONSE.advantages);
  });

  it("passes query, responses, strategy, and seed through", async () => {
    await computeScore("the query", ["r0", "r1"], config({ seed: 9 }), "req-1");
    expect(lastBody).toMatchObject({
      id: "req-1",
      query: "the query",
      responses: ["r0", "r1"],
      strategy: "dgr",
      seed: 9,
    });
  });

  it("omits seed when unset", async () => {
    await computeScore("q", ["a", "b"], config());
    expect("seed" in lastBody).toBe(false);
  });

  it("can select raw scores instead", async () => {
    const result = await computeScore(
      "q",
      ["a", "b", "c", "d"],
      config({ returnField: "scores" })
    );
    expect(result).toEqual(FIXTURE_RESPONSE.scores);
  });

  it("retries 5xx and then succeeds", async () => {
    failuresBeforeSuccess = 2;
    const result = await computeScore("q", ["a", "b"], config({ retries: 2 }));
    expect(result).toEqual(FIXTURE_RESPONSE.advantages);
  });

  it("gives up after the retry budget", async () => {
    failuresBeforeSuccess = 5;
    await expect(
      computeScore("q", ["a", "b"], config({ retries: 1 }))
    ).rejects.toBeInstanceOf(ShimTransportError);
    failuresBeforeSuccess = 0;
  });

  it("maps 422 to a configuration error without retrying", async () => {
    await expect(
      computeScore("q", [], config({ strategy: "pointwise" }))
    ).rejects.toBeInstanceOf(ShimConfigError);
  });

  it("raises a transport error when nothing is listening", async () => {
    await expect(
      computeScore(
        "q",
        ["a", "b"],
        config({ serviceUrl: "http://127.0.0.1:9", retries: 0, timeoutMs: 500 })
      )
    ).rejects.toBeInstanceOf(ShimTransportError);
  });
});

describe("fetchRewards", () => {
  it("exposes the full response document", async () => {
    const document = await fetchRewards("q", ["a", "b"], config(), "doc-1");
    expect(document.id).toBe("doc-1");
    expect(document.diagnostics.fas_method).toBe("exact");
  });
});

describe("config validation", () => {
  it("rejects an empty service url", async () => {
    await expect(
      computeScore("q", ["a"], config({ serviceUrl: "" }))
    ).rejects.toBeInstanceOf(ShimConfigError);
  });

  it("rejects unknown strategies", async () => {
    await expect(
      computeScore("q", ["a"], config({ strategy: "votes" as never }))
    ).rejects.toBeInstanceOf(ShimConfigError);
  });

  it("reads env vars mirroring the service's", () => {
    const env = {
      DECONFLICT_SERVICE_URL: "http://svc:8000",
      DECONFLICT_STRATEGY: "pref",
      DECONFLICT_TIMEOUT_MS: "1500",
      DECONFLICT_SEED: "4",
    } as NodeJS.ProcessEnv;
    const fromEnv = configFromEnv(env);
    expect(fromEnv).toEqual({
      serviceUrl: "http://svc:8000",
      strategy: "pref",
      timeoutMs: 1500,
      seed: 4,
    });
    expect(() => configFromEnv({} as NodeJS.ProcessEnv)).toThrow(ShimConfigError);
  });
});
