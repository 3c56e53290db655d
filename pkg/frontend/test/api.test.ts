import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import frontierRaw from "./fixtures/frontier_c3.json";

const ok = (obj: unknown, status = 200) =>
  new Response(JSON.stringify(obj), {
    status,
    headers: { "content-type": "application/json" },
  });

describe("api client", () => {
  it("builds workspace-scoped urls and parses the diagram", async () => {
    const urls: string[] = [];
    const api = new ApiClient("", (async (input: RequestInfo | URL) => {
      urls.push(String(input));
      return ok(frontierRaw);
    }) as typeof fetch);
    const diagram = await api.frontier("demo", "c3", "pci");
    expect(urls).toEqual(["/v1/workspaces/demo/frontier/c3?value=pci"]);
    expect(diagram.location).toBe("c3");
    expect(diagram.points.length).toBe(4);
  });

  it("raises ApiError carrying the service error code", async () => {
    const api = new ApiClient("", (async () =>
      ok({ code: "unknown_workspace", message: "no workspace 'nope'" }, 404)) as typeof fetch);
    const err = await api.frontier("nope", "c3", "pci").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
    expect(err.code).toBe("unknown_workspace");
  });

  it("rejects a payload that drifted from the contract", async () => {
    const broken = { ...frontierRaw, points: [{ activity: "p1" }] };
    const api = new ApiClient("", (async () => ok(broken)) as typeof fetch);
    await expect(api.frontier("demo", "c3", "pci")).rejects.toThrow(/omega/);
  });

  it("escapes ids when building urls", async () => {
    const urls: string[] = [];
    const api = new ApiClient("", (async (input: RequestInfo | URL) => {
      urls.push(String(input));
      return ok(frontierRaw);
    }) as typeof fetch);
    await api.frontier("demo", "c/3", "pci");
    expect(urls[0]).toContain("/frontier/c%2F3");
  });
});
