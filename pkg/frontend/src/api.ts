/** Thin typed client for the serve endpoints.
 *
 * Each method maps to one HTTP call and returns the parsed JSON body.
 * Non-2xx responses raise ApiRejection carrying the server's structured
 * error payload, so callers can render the code, message, and offending
 * vertices inline.  The client performs no game logic of its own.
 */

import type {
  ApiErrorBody,
  BoardWindow,
  CloseResult,
  Coords,
  SessionCreated,
  SessionRequest,
  SessionState,
} from "./types.js";

export class ApiRejection extends Error {
  readonly status: number;
  readonly code: string;
  readonly vertices: Coords[];

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.name = "ApiRejection";
    this.status = status;
    this.code = body.code;
    this.vertices = body.vertices ?? [];
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class SessionApi {
  readonly baseUrl: string;
  private readonly doFetch: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    this.doFetch = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.doFetch(this.baseUrl + path, init);
    if (!resp.ok) {
      let payload: ApiErrorBody;
      try {
        payload = (await resp.json()) as ApiErrorBody;
      } catch {
        payload = { code: "http-error", message: `HTTP ${resp.status}` };
      }
      throw new ApiRejection(resp.status, payload);
    }
    return (await resp.json()) as T;
  }

  createSession(req: SessionRequest): Promise<SessionCreated> {
    return this.request<SessionCreated>("POST", "/session", req);
  }

  getState(id: string): Promise<SessionState> {
    return this.request<SessionState>("GET", `/session/${id}`);
  }

  protect(id: string, vertices: Coords[]): Promise<SessionState> {
    return this.request<SessionState>("POST", `/session/${id}/protect`, vertices);
  }

  undo(id: string): Promise<SessionState> {
    return this.request<SessionState>("POST", `/session/${id}/undo`);
  }

  board(id: string, margin: number): Promise<BoardWindow> {
    return this.request<BoardWindow>("GET", `/session/${id}/board?margin=${margin}`);
  }

  async trace(id: string): Promise<string> {
    const resp = await this.doFetch(`${this.baseUrl}/session/${id}/trace`);
    if (!resp.ok) {
      const payload = (await resp.json()) as ApiErrorBody;
      throw new ApiRejection(resp.status, payload);
    }
    return await resp.text();
  }

  close(id: string, save?: string): Promise<CloseResult> {
    const body = save === undefined ? {} : { save };
    return this.request<CloseResult>("POST", `/session/${id}/close`, body);
  }
}
