// Wire types of the what-if service. These mirror the JSON bodies exactly;
// the UI never reshapes or recomputes server results.

export interface PlanVariable {
  name: string;
  baseline: number;
  delta: number;
  optimized: number;
}

export type PlanStatus = "optimal" | "no_change_optimal";

export interface RecommendResponse {
  variables: PlanVariable[];
  objective: number;
  benefit: number;
  intervention_count: number;
  status: PlanStatus;
  lambda: number;
  weight_source: string;
}

export interface PredictResponse {
  probability: number;
  label: number;
  margin: number;
}

export interface ExplainResponse {
  phi: number[];
  base_value: number;
  feature_names: string[];
  margin: number;
}

export interface SweepPoint {
  lambda: number;
  intervention_count: number;
  benefit: number;
  objective: number;
}

export interface SweepResponse {
  points: SweepPoint[];
}

export interface ParetoPoint {
  k: number;
  benefit: number;
}

export interface ParetoResponse {
  points: ParetoPoint[];
}

export interface HealthResponse {
  status: string;
  artifact_hash: string;
}

export type WeightSource = "population" | "per_student";
