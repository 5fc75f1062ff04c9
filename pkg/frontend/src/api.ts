import type {
  ExplainResponse,
  HealthResponse,
  ParetoResponse,
  PredictResponse,
  RecommendResponse,
  SweepResponse,
  WeightSource,
} from "./types.js";

/** Error with enough context to highlight the offending form field.
 *  status 0 means the server was unreachable. */
export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
    public readonly field?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }

  get isNetwork(): boolean {
    return this.status === 0;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, body?: unknown): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, {
        method: body === undefined ? "GET" : "POST",
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch {
      throw new ApiError(0, "service unreachable");
    }
    if (!resp.ok) {
      let detail: { error?: string; field?: string } = {};
      try {
        detail = await resp.json();
      } catch {
        // non-JSON error body: fall through to statusText
      }
      throw new ApiError(resp.status, detail.error ?? resp.statusText, detail.field);
    }
    return (await resp.json()) as T;
  }

  health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/health");
  }

  predict(features: number[]): Promise<PredictResponse> {
    return this.request<PredictResponse>("/predict", { features });
  }

  explain(features: number[]): Promise<ExplainResponse> {
    return this.request<ExplainResponse>("/explain", { features });
  }

  recommend(
    features: number[],
    lambda: number,
    weightSource: WeightSource = "population",
  ): Promise<RecommendResponse> {
    return this.request<RecommendResponse>("/recommend", {
      features,
      lambda,
      weight_source: weightSource,
    });
  }

  sweep(features: number[], lambdas: number[]): Promise<SweepResponse> {
    return this.request<SweepResponse>("/sweep", { features, lambdas });
  }

  pareto(features: number[], kMax: number): Promise<ParetoResponse> {
    return this.request<ParetoResponse>("/pareto", { features, k_max: kMax });
  }
}
