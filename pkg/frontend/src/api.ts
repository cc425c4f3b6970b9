/**
 * Typed client for the portalis gateway.
 *
 * Every displayed value in the UI originates from one of these calls; the
 * client adds no filtering or defaulting of its own. Failures normalize to
 * GatewayError carrying the server's status/code/message verbatim (status 0
 * for network-level failures so the UI can show a connection state).
 */

export interface SessionInfo {
  token: string;
  persona: string;
  rank: string;
  dims: Record<string, string>;
}

export interface PageItem {
  value: unknown;
  asOf: number;
  absent: boolean;
}

export interface RenderedPage {
  page: string;
  items: Record<string, PageItem>;
  overlay: Record<string, Record<string, unknown>>;
  stale: boolean;
  refreshedAt: number;
}

export interface EventEffect {
  type: string;
  [key: string]: unknown;
}

export interface EventSummary {
  event: string;
  timestamp: number;
  effects: EventEffect[];
}

export interface MetadataRecord {
  subject: string;
  dimensions: string[];
  integrityConstraints: string[];
  accessRights: string;
  extras: Record<string, string>;
}

export interface WarehouseChange {
  op: "add" | "update";
  id: string;
  values: Record<string, unknown>;
}

export class GatewayError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "GatewayError";
  }

  get sessionGone(): boolean {
    return this.status === 401;
  }

  describe(): string {
    if (this.status === 0) return `connection failed: ${this.message}`;
    return `${this.status} ${this.code}: ${this.message}`;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class GatewayClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method,
        headers: { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (error) {
      throw new GatewayError(0, "connection", String(error));
    }
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      throw new GatewayError(response.status, "BadResponse",
        "gateway returned a non-JSON body");
    }
    if (!response.ok) {
      const record = payload as { error?: string; message?: string };
      throw new GatewayError(
        response.status,
        record?.error ?? "UnknownError",
        record?.message ?? "request failed",
      );
    }
    return payload as T;
  }

  openSession(profile: string): Promise<SessionInfo> {
    return this.request("POST", "/session", { profile });
  }

  closeSession(token: string): Promise<{ closed: boolean }> {
    return this.request("DELETE", `/session/${encodeURIComponent(token)}`);
  }

  listPages(token: string): Promise<{ pages: string[] }> {
    return this.request("GET", `/pages?token=${encodeURIComponent(token)}`);
  }

  getPage(token: string, pageId: string): Promise<RenderedPage> {
    return this.request(
      "GET",
      `/page/${encodeURIComponent(pageId)}?token=${encodeURIComponent(token)}`,
    );
  }

  submitEvent(
    token: string,
    name: string,
    args: Record<string, unknown>,
    idempotencyKey?: string,
  ): Promise<EventSummary> {
    return this.request("POST", "/event", {
      token,
      name,
      args,
      idempotencyKey,
    });
  }

  getMetadata(token: string, objectId: string): Promise<MetadataRecord> {
    return this.request(
      "GET",
      `/meta/${encodeURIComponent(objectId)}?token=${encodeURIComponent(token)}`,
    );
  }

  warehouseUpdate(
    repo: string,
    change: WarehouseChange,
    contentCritical: boolean,
  ): Promise<{ accepted: boolean }> {
    return this.request(
      "POST",
      `/warehouse/${encodeURIComponent(repo)}/update`,
      { change, contentCritical },
    );
  }

  runAgent(tick: number): Promise<{ refreshed: string[] }> {
    return this.request("POST", "/agent/run", { tick });
  }
}
