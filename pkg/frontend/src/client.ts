import { type AnnotationRecord, type TaskView, taskViewSchema } from './schema';

/**
 * Thin HTTP client for the harness annotation service. Transient failures
 * (network errors, 5xx) are retried with exponential backoff; validation
 * rejections (400) are surfaced as field errors and never retried.
 */

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export interface ClientOptions {
  retries?: number;
  backoffMs?: number;
  fetchImpl?: FetchLike;
  sleep?: (ms: number) => Promise<void>;
}

export type SubmitResult =
  | { ok: true }
  | { ok: false; errors: string[] };

export interface AggregateResult {
  item_id: string;
  n_workers: number;
  result:
    | { verdict: 'majority'; answer: string }
    | { verdict: 'abstain' }
    | { verdict: 'excluded' }
    | null;
}

const defaultSleep = (ms: number) => new Promise<void>((r) => setTimeout(r, ms));

export class HarnessClient {
  private readonly baseUrl: string;
  private readonly retries: number;
  private readonly backoffMs: number;
  private readonly fetchImpl: FetchLike;
  private readonly sleep: (ms: number) => Promise<void>;

  constructor(baseUrl: string, options: ClientOptions = {}) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
    this.retries = options.retries ?? 3;
    this.backoffMs = options.backoffMs ?? 200;
    this.fetchImpl = options.fetchImpl ?? ((url, init) => fetch(url, init));
    this.sleep = options.sleep ?? defaultSleep;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let lastError: unknown;
    for (let attempt = 0; attempt <= this.retries; attempt++) {
      if (attempt > 0) {
        await this.sleep(this.backoffMs * 2 ** (attempt - 1));
      }
      try {
        const response = await this.fetchImpl(this.baseUrl + path, init);
        if (response.status >= 500) {
          lastError = new Error(`server error ${response.status}`);
          continue;
        }
        return response;
      } catch (error) {
        lastError = error;
      }
    }
    throw new Error(`request to ${path} failed after ${this.retries + 1} attempts: ${lastError}`);
  }

  async nextTask(worker: string): Promise<TaskView | null> {
    const response = await this.request(`/tasks/next?worker=${encodeURIComponent(worker)}`);
    const body = (await response.json()) as { task: unknown };
    if (body.task === null) return null;
    return taskViewSchema.parse(body.task);
  }

  async submitAnnotation(record: AnnotationRecord): Promise<SubmitResult> {
    const response = await this.request('/annotations', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(record),
    });
    if (response.status === 400) {
      const body = (await response.json()) as { detail: { errors: string[] } };
      return { ok: false, errors: body.detail.errors };
    }
    if (!response.ok) {
      throw new Error(`submission rejected with status ${response.status}`);
    }
    return { ok: true };
  }

  async aggregate(itemId: string): Promise<AggregateResult> {
    const response = await this.request(`/aggregate/${encodeURIComponent(itemId)}`);
    if (!response.ok) {
      throw new Error(`aggregate lookup failed with status ${response.status}`);
    }
    return (await response.json()) as AggregateResult;
  }
}
