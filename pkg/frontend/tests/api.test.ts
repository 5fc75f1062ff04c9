import { describe, expect, it } from "vitest";

import { ApiError, Client } from "../src/api.js";
import type { RecommendResponse } from "../src/types.js";

import planLambda02 from "./fixtures/recommend_lambda02.json";

function fakeFetch(status: number, body: unknown) {
  return async () =>
    new Response(JSON.stringify(body), {
      status,
      headers: { "Content-Type": "application/json" },
    });
}

describe("client", () => {
  it("returns parsed JSON on success", async () => {
    const client = new Client("", fakeFetch(200, planLambda02));
    const plan = await client.recommend([1, 2, 3], 0.2);
    expect(plan).toEqual(planLambda02 as RecommendResponse);
  });

  it("sends the documented request body", async () => {
    let captured: { url?: string; body?: string } = {};
    const client = new Client("http://host", async (url, init) => {
      captured = { url, body: init?.body as string };
      return new Response("{}", { status: 200 });
    });
    await client.recommend([1, 2], 0.35, "per_student");
    expect(captured.url).toBe("http://host/recommend");
    expect(JSON.parse(captured.body!)).toEqual({
      features: [1, 2],
      lambda: 0.35,
      weight_source: "per_student",
    });
  });

  it("maps 400 payload errors to ApiError with the offending field", async () => {
    const client = new Client(
      "",
      fakeFetch(400, { error: "features must have length 15, got 14", field: "features" }),
    );
    const err = await client.predict([1]).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.field).toBe("features");
    expect(err.message).toContain("15");
  });

  it("maps 422 baseline errors to ApiError with the field", async () => {
    const client = new Client(
      "",
      fakeFetch(422, { error: "baseline 99 for 'room_ventilation' outside bounds", field: "room_ventilation" }),
    );
    const err = await client.recommend([99], 0.2).catch((e) => e);
    expect(err.status).toBe(422);
    expect(err.field).toBe("room_ventilation");
  });

  it("maps network failures to status 0", async () => {
    const client = new Client("", async () => {
      throw new TypeError("fetch failed");
    });
    const err = await client.health().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(0);
    expect(err.isNetwork).toBe(true);
  });

  it("tolerates non-JSON error bodies", async () => {
    const client = new Client("", async () => new Response("oops", { status: 500 }));
    const err = await client.health().catch((e) => e);
    expect(err.status).toBe(500);
  });
});
