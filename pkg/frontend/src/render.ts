import { barChart, lineChart } from "./charts.js";
import type { FieldDef } from "./schema.js";
import type {
  ExplainResponse,
  ParetoResponse,
  PredictResponse,
  RecommendResponse,
  SweepResponse,
} from "./types.js";

// All builders return detached nodes and render exactly the payload they
// are given; any math shown to the user happened on the server.

function h<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Array<Node | string> = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function formatDelta(delta: number): string {
  return delta > 0 ? `+${delta}` : String(delta);
}

export function renderPlanTable(plan: RecommendResponse): HTMLTableElement {
  const table = h("table", { class: "plan-table" });
  const head = h("tr", {}, [
    h("th", {}, ["Actionable variable"]),
    h("th", {}, ["Baseline"]),
    h("th", {}, ["Change"]),
    h("th", {}, ["Optimized"]),
  ]);
  table.append(h("thead", {}, [head]));
  const body = h("tbody");
  for (const v of plan.variables) {
    const row = h("tr", { "data-variable": v.name }, [
      h("td", { class: "var-name" }, [v.name]),
      h("td", {}, [String(v.baseline)]),
      h("td", {}, [formatDelta(v.delta)]),
      h("td", {}, [String(v.optimized)]),
    ]);
    if (v.delta !== 0) row.classList.add("changed");
    body.append(row);
  }
  table.append(body);
  return table;
}

export function renderPlanBanner(plan: RecommendResponse): HTMLElement {
  if (plan.status === "no_change_optimal") {
    return h("div", { class: "banner no-change" }, [
      "No change recommended: keeping the current routine is optimal at this resistance level.",
    ]);
  }
  return h("div", { class: "banner plan-summary" }, [
    h("span", { class: "count" }, [`${plan.intervention_count} intervention(s)`]),
    h("span", { class: "benefit" }, [`expected benefit ${plan.benefit.toFixed(3)}`]),
    h("span", { class: "objective" }, [`objective ${plan.objective.toFixed(3)}`]),
  ]);
}

export function renderRecommendation(plan: RecommendResponse): HTMLElement {
  const wrap = h("div", { class: "recommendation" });
  wrap.append(renderPlanBanner(plan));
  wrap.append(renderPlanTable(plan));
  return wrap;
}

export function renderProbability(pred: PredictResponse): HTMLElement {
  const pct = (pred.probability * 100).toFixed(1);
  const gauge = h("div", { class: "gauge" }, [
    h("div", {
      class: `gauge-fill ${pred.label === 1 ? "good" : "poor"}`,
      style: `width: ${pct}%`,
    }),
  ]);
  return h("div", { class: "prediction" }, [
    h("div", { class: "gauge-label" }, [
      `Predicted probability of good sleep: ${pct}%`,
    ]),
    gauge,
  ]);
}

export function renderAttribution(explain: ExplainResponse): HTMLElement {
  const entries = explain.feature_names
    .map((name, i) => ({ label: name, value: explain.phi[i] }))
    .sort((a, b) => Math.abs(b.value) - Math.abs(a.value));
  const wrap = h("div", { class: "attribution" });
  wrap.append(
    h("div", { class: "chart-caption" }, [
      `Per-feature contribution to this prediction (base value ${explain.base_value.toFixed(3)})`,
    ]),
  );
  wrap.append(barChart(entries, { label: "feature attribution" }));
  return wrap;
}

export function renderSweep(sweep: SweepResponse): HTMLElement {
  const wrap = h("div", { class: "sweep" });
  wrap.append(
    lineChart(
      sweep.points.map((p) => ({ x: p.lambda, y: p.intervention_count })),
      {
        label: "sensitivity sweep",
        xTitle: "resistance penalty",
        yTitle: "interventions",
      },
    ),
  );
  return wrap;
}

export function renderPareto(
  pareto: ParetoResponse,
  current?: { count: number; benefit: number },
): HTMLElement {
  const wrap = h("div", { class: "pareto" });
  wrap.append(
    lineChart(
      pareto.points.map((p) => ({ x: p.k, y: p.benefit })),
      {
        label: "benefit frontier",
        xTitle: "intervention count cap",
        yTitle: "expected benefit",
        marker: current ? { x: current.count, y: current.benefit } : undefined,
      },
    ),
  );
  return wrap;
}

export function renderErrorBanner(message: string, onRetry: () => void): HTMLElement {
  const button = h("button", { class: "retry", type: "button" }, ["Retry"]);
  button.addEventListener("click", onRetry);
  return h("div", { class: "banner error" }, [h("span", {}, [message]), button]);
}

// --- profile form -------------------------------------------------------------

export interface ProfileForm {
  element: HTMLFormElement;
  read(): number[] | null;
  setValues(values: number[]): void;
  markInvalid(fieldName: string): void;
  clearInvalid(): void;
  onChange(listener: () => void): void;
}

export function buildProfileForm(fields: FieldDef[], initial?: number[]): ProfileForm {
  const form = h("form", { class: "profile-form" });
  const inputs = new Map<string, HTMLSelectElement | HTMLInputElement>();
  const listeners: Array<() => void> = [];

  fields.forEach((field, idx) => {
    const row = h("label", { class: "field-row", "data-field": field.name }, [
      h("span", { class: "field-label" }, [
        field.label + (field.actionable ? " *" : ""),
      ]),
    ]);
    let input: HTMLSelectElement | HTMLInputElement;
    if (field.options) {
      input = h("select", { name: field.name });
      for (const opt of field.options) {
        input.append(h("option", { value: String(opt.value) }, [opt.label]));
      }
    } else {
      input = h("input", {
        name: field.name,
        type: "number",
        min: String(field.lower),
        max: String(field.upper),
        step: "1",
        required: "required",
      });
    }
    if (initial) input.value = String(initial[idx]);
    input.addEventListener("input", () => listeners.forEach((fn) => fn()));
    input.addEventListener("change", () => listeners.forEach((fn) => fn()));
    row.append(input);
    form.append(row);
    inputs.set(field.name, input);
  });

  return {
    element: form,
    read() {
      const values: number[] = [];
      for (const field of fields) {
        const input = inputs.get(field.name)!;
        const value = Number(input.value);
        if (input.value === "" || Number.isNaN(value)) return null;
        if (value < field.lower || value > field.upper) return null;
        values.push(value);
      }
      return values;
    },
    setValues(values: number[]) {
      fields.forEach((field, idx) => {
        inputs.get(field.name)!.value = String(values[idx]);
      });
    },
    markInvalid(fieldName: string) {
      const row = form.querySelector(`[data-field="${fieldName}"]`);
      row?.classList.add("invalid");
    },
    clearInvalid() {
      form.querySelectorAll(".invalid").forEach((row) => row.classList.remove("invalid"));
    },
    onChange(listener: () => void) {
      listeners.push(listener);
    },
  };
}
