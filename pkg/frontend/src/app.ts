import { ApiError, Client } from "./api.js";
import {
  FIELDS,
  LAMBDA_DEFAULT,
  LAMBDA_MAX,
  LAMBDA_MIN,
  LAMBDA_STEP,
} from "./schema.js";
import { SingleFlight, debounce } from "./state.js";
import {
  buildProfileForm,
  renderAttribution,
  renderErrorBanner,
  renderPareto,
  renderProbability,
  renderRecommendation,
  renderSweep,
} from "./render.js";
import type { RecommendResponse, WeightSource } from "./types.js";

const SWEEP_GRID = Array.from({ length: 13 }, (_, i) => i * 0.05);
const K_MAX = FIELDS.filter((f) => f.actionable).length;

type Tab = "plan" | "frontier" | "sweep";

export interface App {
  element: HTMLElement;
  /** Current plan exactly as the server returned it (null before first fetch). */
  readonly plan: RecommendResponse | null;
  setLambda(value: number): void;
  setWeightSource(source: WeightSource): void;
  submitProfile(): Promise<void>;
  selectTab(tab: Tab): Promise<void>;
  /** Resolves when no recommend request is running or queued (test hook). */
  idle(): Promise<void>;
}

export function createApp(client: Client, debounceMs = 250): App {
  const root = document.createElement("div");
  root.className = "whatif-app";

  // --- left pane: profile + controls ---------------------------------------
  const form = buildProfileForm(FIELDS);
  const submit = document.createElement("button");
  submit.type = "button";
  submit.className = "evaluate";
  submit.textContent = "Evaluate profile";
  submit.disabled = true;

  const slider = document.createElement("input");
  slider.type = "range";
  slider.min = String(LAMBDA_MIN);
  slider.max = String(LAMBDA_MAX);
  slider.step = String(LAMBDA_STEP);
  slider.value = String(LAMBDA_DEFAULT);
  const sliderLabel = document.createElement("span");
  sliderLabel.className = "lambda-value";
  sliderLabel.textContent = LAMBDA_DEFAULT.toFixed(2);

  const weightToggle = document.createElement("select");
  weightToggle.className = "weight-source";
  for (const source of ["population", "per_student"]) {
    const opt = document.createElement("option");
    opt.value = source;
    opt.textContent = source === "population" ? "Population weights" : "Personal weights";
    weightToggle.append(opt);
  }

  const exportButton = document.createElement("button");
  exportButton.type = "button";
  exportButton.className = "export";
  exportButton.textContent = "Export plan JSON";
  exportButton.disabled = true;

  const controls = document.createElement("div");
  controls.className = "controls";
  const sliderRow = document.createElement("label");
  sliderRow.className = "lambda-row";
  sliderRow.append("Resistance to change λ ", slider, sliderLabel);
  controls.append(submit, sliderRow, weightToggle, exportButton);

  const left = document.createElement("div");
  left.className = "pane left";
  left.append(form.element, controls);

  // --- right pane: tabs + result areas --------------------------------------
  const tabBar = document.createElement("nav");
  tabBar.className = "tabs";
  const tabButtons = new Map<Tab, HTMLButtonElement>();
  for (const tab of ["plan", "frontier", "sweep"] as Tab[]) {
    const b = document.createElement("button");
    b.type = "button";
    b.dataset.tab = tab;
    b.textContent = tab === "plan" ? "Recommendation" : tab === "frontier" ? "Frontier" : "Sensitivity";
    tabBar.append(b);
    tabButtons.set(tab, b);
  }

  const predictionArea = document.createElement("div");
  predictionArea.className = "area prediction-area";
  const planArea = document.createElement("div");
  planArea.className = "area plan-area";
  const chartArea = document.createElement("div");
  chartArea.className = "area chart-area";
  chartArea.hidden = true;

  const right = document.createElement("div");
  right.className = "pane right";
  right.append(tabBar, predictionArea, planArea, chartArea);

  root.append(left, right);

  // --- state -----------------------------------------------------------------
  let features: number[] | null = null;
  let lambda = LAMBDA_DEFAULT;
  let weightSource: WeightSource = "population";
  let plan: RecommendResponse | null = null;
  let activeTab: Tab = "plan";

  function setPlan(next: RecommendResponse | null): void {
    plan = next;
    exportButton.disabled = next === null;
    planArea.replaceChildren();
    if (next !== null) {
      planArea.append(renderRecommendation(next));
    }
  }

  function showPlanError(message: string): void {
    plan = null;
    exportButton.disabled = true;
    // never leave a stale table under an error banner
    planArea.replaceChildren(renderErrorBanner(message, () => requestPlan()));
  }

  const recommendFlight = new SingleFlight<{
    features: number[];
    lambda: number;
    source: WeightSource;
  }>(async (args) => {
    try {
      const result = await client.recommend(args.features, args.lambda, args.source);
      form.clearInvalid();
      setPlan(result);
      if (activeTab !== "plan") await refreshChart();
    } catch (err) {
      if (err instanceof ApiError) {
        if (err.field) form.markInvalid(err.field);
        showPlanError(err.isNetwork ? "Service unreachable." : err.message);
      } else {
        showPlanError("Unexpected failure.");
      }
    }
  });

  function requestPlan(): void {
    if (features === null) return;
    recommendFlight.submit({ features, lambda, source: weightSource });
  }

  const debouncedRequestPlan = debounce(requestPlan, debounceMs);

  async function refreshChart(): Promise<void> {
    if (features === null) return;
    chartArea.replaceChildren();
    try {
      if (activeTab === "frontier") {
        const frontier = await client.pareto(features, K_MAX);
        const marker = plan
          ? { count: plan.intervention_count, benefit: plan.benefit }
          : undefined;
        chartArea.append(renderPareto(frontier, marker));
      } else if (activeTab === "sweep") {
        const sweep = await client.sweep(features, SWEEP_GRID);
        chartArea.append(renderSweep(sweep));
      }
    } catch (err) {
      const message = err instanceof ApiError && err.isNetwork ? "Service unreachable." : "Request failed.";
      chartArea.append(renderErrorBanner(message, () => void refreshChart()));
    }
  }

  async function submitProfile(): Promise<void> {
    const values = form.read();
    if (values === null) return;
    features = values;
    form.clearInvalid();
    predictionArea.replaceChildren();
    try {
      const [prediction, explanation] = await Promise.all([
        client.predict(features),
        client.explain(features),
      ]);
      predictionArea.append(renderProbability(prediction), renderAttribution(explanation));
    } catch (err) {
      if (err instanceof ApiError && err.field) form.markInvalid(err.field);
      const message = err instanceof ApiError && err.isNetwork ? "Service unreachable." : "Prediction failed.";
      predictionArea.append(renderErrorBanner(message, () => void submitProfile()));
      return;
    }
    requestPlan();
    await recommendFlight.idle();
  }

  async function selectTab(tab: Tab): Promise<void> {
    activeTab = tab;
    for (const [name, button] of tabButtons) {
      button.classList.toggle("active", name === tab);
    }
    const showChart = tab !== "plan";
    chartArea.hidden = !showChart;
    planArea.hidden = showChart;
    predictionArea.hidden = showChart;
    if (showChart) await refreshChart();
  }

  // --- events ------------------------------------------------------------------
  form.onChange(() => {
    submit.disabled = form.read() === null;
  });
  submit.addEventListener("click", () => void submitProfile());
  slider.addEventListener("input", () => {
    lambda = Number(slider.value);
    sliderLabel.textContent = lambda.toFixed(2);
    debouncedRequestPlan();
  });
  weightToggle.addEventListener("change", () => {
    weightSource = weightToggle.value as WeightSource;
    requestPlan();
  });
  exportButton.addEventListener("click", () => {
    if (plan === null) return;
    const blob = new Blob([JSON.stringify(plan, null, 1)], { type: "application/json" });
    const url = URL.createObjectURL(blob);
    const a = document.createElement("a");
    a.href = url;
    a.download = `intervention-plan-lambda-${plan.lambda}.json`;
    a.click();
    URL.revokeObjectURL(url);
  });

  void selectTab("plan");

  return {
    element: root,
    get plan() {
      return plan;
    },
    setLambda(value: number) {
      slider.value = String(value);
      slider.dispatchEvent(new Event("input"));
    },
    setWeightSource(source: WeightSource) {
      weightToggle.value = source;
      weightToggle.dispatchEvent(new Event("change"));
    },
    submitProfile,
    selectTab,
    idle: () => recommendFlight.idle(),
  };
}
