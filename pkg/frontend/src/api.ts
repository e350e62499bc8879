/** REST client for the session server. */
import {
  Catalogue,
  CatalogueSchema,
  Cell,
  Frame,
  parseFrame,
} from "./types.js";

export interface MutateRequest {
  add?: Cell[];
  remove?: Cell[];
  place_gadget?: { name: string; anchor: Cell; orientation: number };
  collapse_to_branch?: number;
}

export class ApiError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
  }
}

async function request(url: string, init?: RequestInit): Promise<unknown> {
  const resp = await fetch(url, init);
  const body = await resp.json().catch(() => ({}));
  if (!resp.ok) {
    const detail =
      typeof body === "object" && body !== null && "detail" in body
        ? String((body as { detail: unknown }).detail)
        : resp.statusText;
    throw new ApiError(resp.status, detail);
  }
  return body;
}

function post(url: string, payload: unknown): Promise<unknown> {
  return request(url, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body: JSON.stringify(payload),
  });
}

export class SessionClient {
  constructor(readonly base: string, readonly sessionId: string) {}

  static async create(base: string, scene: unknown): Promise<SessionClient> {
    const body = (await post(`${base}/sessions`, scene)) as { id: string };
    return new SessionClient(base, body.id);
  }

  private url(suffix: string): string {
    return `${this.base}/sessions/${this.sessionId}${suffix}`;
  }

  async snapshot(): Promise<Frame> {
    return parseFrame(await request(this.url("/snapshot")));
  }

  async advance(n: number): Promise<Frame> {
    return parseFrame(await post(this.url("/advance"), { n }));
  }

  async mutate(edit: MutateRequest): Promise<Frame> {
    return parseFrame(await post(this.url("/mutate"), edit));
  }

  async reset(): Promise<Frame> {
    return parseFrame(await post(this.url("/reset"), {}));
  }

  streamUrl(): string {
    return `${this.base.replace(/^http/, "ws")}/sessions/${this.sessionId}/stream`;
  }
}

export async function fetchCatalogue(base: string): Promise<Catalogue> {
  return CatalogueSchema.parse(await request(`${base}/gadgets`));
}

export async function fetchRulesReport(base: string): Promise<string> {
  const resp = await fetch(`${base}/rules/report`);
  if (!resp.ok) throw new ApiError(resp.status, resp.statusText);
  return resp.text();
}
