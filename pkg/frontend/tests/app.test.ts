import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiError, Client } from "../src/api.js";
import { createApp } from "../src/app.js";
import { FIELDS } from "../src/schema.js";
import type { RecommendResponse } from "../src/types.js";

import planLambda02 from "./fixtures/recommend_lambda02.json";
import planLambda05 from "./fixtures/recommend_lambda05.json";
import planAllMax from "./fixtures/recommend_allmax.json";
import explainFixture from "./fixtures/explain.json";
import predictFixture from "./fixtures/predict.json";
import sweepFixture from "./fixtures/sweep.json";
import paretoFixture from "./fixtures/pareto.json";
import profiles from "./fixtures/profile_features.json";

interface StubOptions {
  down?: boolean;
}

/** Client stub that replays the recorded service fixtures. */
function stubClient(options: StubOptions = {}) {
  const calls = { recommend: 0, inFlight: 0, maxInFlight: 0 };
  const allMax = profiles.all_max.join(",");
  const client = {
    async recommend(features: number[], lambda: number): Promise<RecommendResponse> {
      if (options.down) throw new ApiError(0, "service unreachable");
      calls.recommend += 1;
      calls.inFlight += 1;
      calls.maxInFlight = Math.max(calls.maxInFlight, calls.inFlight);
      await new Promise((r) => setTimeout(r, 5));
      calls.inFlight -= 1;
      if (features.join(",") === allMax) return planAllMax as RecommendResponse;
      if (lambda >= 0.5) return planLambda05 as RecommendResponse;
      return planLambda02 as RecommendResponse;
    },
    async predict() {
      if (options.down) throw new ApiError(0, "service unreachable");
      return predictFixture;
    },
    async explain() {
      if (options.down) throw new ApiError(0, "service unreachable");
      return explainFixture;
    },
    async sweep() {
      if (options.down) throw new ApiError(0, "service unreachable");
      return sweepFixture;
    },
    async pareto() {
      if (options.down) throw new ApiError(0, "service unreachable");
      return paretoFixture;
    },
    async health() {
      return { status: "ok", artifact_hash: "x".repeat(64) };
    },
  };
  return { client: client as unknown as Client, calls };
}

function appWith(options: StubOptions = {}) {
  const { client, calls } = stubClient(options);
  const app = createApp(client, 10);
  document.body.replaceChildren(app.element);
  return { app, calls };
}

function fillProfile(app: ReturnType<typeof createApp>, values: number[]) {
  FIELDS.forEach((field, i) => {
    const control = app.element.querySelector(
      `[data-field="${field.name}"] select, [data-field="${field.name}"] input`,
    ) as HTMLInputElement | HTMLSelectElement;
    control.value = String(values[i]);
    control.dispatchEvent(new Event("input", { bubbles: true }));
  });
}

beforeEach(() => {
  document.body.replaceChildren();
});

describe("what-if app", () => {
  it("submit stays disabled until the profile is complete", () => {
    const { app } = appWith();
    const submit = app.element.querySelector("button.evaluate") as HTMLButtonElement;
    expect(submit.disabled).toBe(true);
    fillProfile(app, profiles.full_headroom);
    expect(submit.disabled).toBe(false);
  });

  it("renders the server plan verbatim after submit", async () => {
    const { app } = appWith();
    fillProfile(app, profiles.full_headroom);
    await app.submitProfile();
    expect(app.plan).toEqual(planLambda02);
    const rows = app.element.querySelectorAll(".plan-area tbody tr");
    expect(rows.length).toBe((planLambda02 as RecommendResponse).variables.length);
    expect(app.element.querySelectorAll(".plan-area tr.changed").length).toBe(6);
    expect(app.element.querySelector(".prediction-area .gauge")).not.toBeNull();
    expect(app.element.querySelectorAll(".prediction-area rect.bar").length).toBe(15);
  });

  it("slider move 0.2 -> 0.5 transitions six highlighted rows to the no-change state", async () => {
    vi.useFakeTimers();
    const { app } = appWith();
    fillProfile(app, profiles.full_headroom);
    const submitDone = app.submitProfile();
    await vi.runAllTimersAsync();
    await submitDone;
    expect(app.element.querySelectorAll(".plan-area tr.changed").length).toBe(6);

    app.setLambda(0.5);
    await vi.runAllTimersAsync();
    await app.idle();

    expect(app.plan).toEqual(planLambda05);
    expect(app.element.querySelector(".plan-area .banner.no-change")).not.toBeNull();
    expect(app.element.querySelectorAll(".plan-area tr.changed").length).toBe(0);
    vi.useRealTimers();
  });

  it("an all-max profile shows the no-change banner", async () => {
    const { app } = appWith();
    fillProfile(app, profiles.all_max);
    await app.submitProfile();
    expect(app.plan).toEqual(planAllMax);
    expect(app.element.querySelector(".plan-area .banner.no-change")).not.toBeNull();
  });

  it("rapid slider movement debounces to at most one in-flight request", async () => {
    vi.useFakeTimers();
    const { app, calls } = appWith();
    fillProfile(app, profiles.full_headroom);
    const submitDone = app.submitProfile();
    await vi.runAllTimersAsync();
    await submitDone;
    const before = calls.recommend;

    for (const v of [0.25, 0.3, 0.35, 0.4, 0.45, 0.5]) {
      app.setLambda(v);
      vi.advanceTimersByTime(3); // within the debounce window
    }
    await vi.runAllTimersAsync();
    await app.idle();

    expect(calls.maxInFlight).toBe(1);
    expect(calls.recommend - before).toBe(1); // one trailing request
    expect(app.plan).toEqual(planLambda05); // latest slider position wins
    vi.useRealTimers();
  });

  it("service outage shows a retry banner and no stale table", async () => {
    vi.useFakeTimers();
    const good = appWith();
    fillProfile(good.app, profiles.full_headroom);
    const submitDone = good.app.submitProfile();
    await vi.runAllTimersAsync();
    await submitDone;
    expect(good.app.element.querySelector(".plan-area table")).not.toBeNull();

    const down = appWith({ down: true });
    fillProfile(down.app, profiles.full_headroom);
    const failDone = down.app.submitProfile();
    await vi.runAllTimersAsync();
    await failDone;
    expect(down.app.element.querySelector(".prediction-area .banner.error")).not.toBeNull();
    expect(down.app.element.querySelector(".plan-area table")).toBeNull();
    expect(down.app.plan).toBeNull();
    vi.useRealTimers();
  });

  it("frontier tab renders the pareto chart with the plan marker", async () => {
    const { app } = appWith();
    fillProfile(app, profiles.full_headroom);
    await app.submitProfile();
    await app.selectTab("frontier");
    expect(app.element.querySelector(".chart-area .pareto svg")).not.toBeNull();
    expect(app.element.querySelectorAll(".chart-area circle.marker").length).toBe(1);
  });

  it("sensitivity tab renders the sweep chart", async () => {
    const { app } = appWith();
    fillProfile(app, profiles.full_headroom);
    await app.submitProfile();
    await app.selectTab("sweep");
    expect(app.element.querySelector(".chart-area .sweep svg")).not.toBeNull();
    expect(
      app.element.querySelectorAll(".chart-area circle.dot").length,
    ).toBe(sweepFixture.points.length);
  });
});
