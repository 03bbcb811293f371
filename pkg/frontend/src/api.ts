import type {
  BottlenecksPayload,
  DepsPayload,
  GrowthPayload,
  LoopStatus,
  SectionsPayload,
} from './types.js';

export const SECRET_HEADER = 'X-Afloop-Secret';

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = 'ApiError';
  }
}

async function raiseForStatus(response: Response): Promise<void> {
  if (response.ok) return;
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.error === 'string') detail = body.error;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail);
}

/** Thin client over the harness API. Reads are GETs; the only writes the
 * dashboard ever performs are the three POST endpoints below. */
export class DashboardApi {
  constructor(private baseUrl: string, private secret: string = '') {}

  private async get<T>(path: string): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`);
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method: 'POST',
      headers: {
        'Content-Type': 'application/json',
        [SECRET_HEADER]: this.secret,
      },
      body: JSON.stringify(body ?? {}),
    });
    await raiseForStatus(response);
    return (await response.json()) as T;
  }

  getStatus(): Promise<LoopStatus> {
    return this.get('/status');
  }

  getDeps(): Promise<DepsPayload> {
    return this.get('/deps');
  }

  getSections(): Promise<SectionsPayload> {
    return this.get('/sections');
  }

  getBottlenecks(): Promise<BottlenecksPayload> {
    return this.get('/bottlenecks');
  }

  getGrowth(stride = 1): Promise<GrowthPayload> {
    return this.get(`/growth?stride=${stride}`);
  }

  postOverride(text: string): Promise<{ status: LoopStatus }> {
    return this.post('/override', { text });
  }

  postPause(): Promise<{ status: LoopStatus }> {
    return this.post('/pause', {});
  }

  postResume(): Promise<{ status: LoopStatus }> {
    return this.post('/resume', {});
  }
}
