/**
 * Thin typed client for the annotation service.  Every request carries the
 * identity header; error bodies with a stable `code` become ApiError so the
 * app can distinguish "not assigned" from "document missing" from transport
 * trouble.
 */

import type { PageLayout } from "./geometry.js";
import type {
  AnnotationSet,
  AnnotationSetResponse,
  DocumentEntry,
  Schema,
  StatusRecord,
} from "./types.js";

export const IDENTITY_HEADER = "X-Annotator";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** The slice of the service the annotation workspace consumes. */
export interface AnnotationApi {
  labels(): Promise<Schema>;
  tokens(doc: string): Promise<PageLayout[]>;
  annotations(doc: string): Promise<AnnotationSetResponse>;
  saveAnnotations(doc: string, set: AnnotationSet): Promise<AnnotationSetResponse>;
}

export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly violations: { code: string; message: string; subjectId: string }[];

  constructor(
    status: number,
    code: string,
    message: string,
    violations: { code: string; message: string; subjectId: string }[] = [],
  ) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.code = code;
    this.violations = violations;
  }
}

export class ApiClient {
  readonly annotator: string;
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(annotator: string, base = "", fetchFn: FetchLike = (...args) => fetch(...args)) {
    this.annotator = annotator;
    this.base = base.replace(/\/$/, "");
    this.fetchFn = fetchFn;
  }

  pdfUrl(doc: string): string {
    return `${this.base}/api/doc/${encodeURIComponent(doc)}/pdf`;
  }

  async listDocuments(): Promise<DocumentEntry[]> {
    const body = await this.request<{ documents: DocumentEntry[] }>("GET", "/api/docs");
    return body.documents;
  }

  async labels(): Promise<Schema> {
    return this.request<Schema>("GET", "/api/config/labels");
  }

  async tokens(doc: string): Promise<PageLayout[]> {
    return this.request<PageLayout[]>("GET", `/api/doc/${encodeURIComponent(doc)}/tokens`);
  }

  async annotations(doc: string): Promise<AnnotationSetResponse> {
    return this.request<AnnotationSetResponse>(
      "GET",
      `/api/doc/${encodeURIComponent(doc)}/annotations`,
    );
  }

  async saveAnnotations(doc: string, set: AnnotationSet): Promise<AnnotationSetResponse> {
    return this.request<AnnotationSetResponse>(
      "POST",
      `/api/doc/${encodeURIComponent(doc)}/annotations`,
      set,
    );
  }

  async setStatus(doc: string, status: Partial<StatusRecord>): Promise<StatusRecord> {
    return this.request<StatusRecord>(
      "POST",
      `/api/doc/${encodeURIComponent(doc)}/status`,
      status,
    );
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = {
      method,
      headers: {
        [IDENTITY_HEADER]: this.annotator,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
    };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchFn(`${this.base}${path}`, init);
    if (!response.ok) {
      let code = "http-error";
      let message = `${method} ${path} failed with ${response.status}`;
      let violations: { code: string; message: string; subjectId: string }[] = [];
      try {
        const payload = await response.json();
        if (payload && typeof payload.code === "string") {
          code = payload.code;
        }
        if (payload && typeof payload.message === "string") {
          message = payload.message;
        }
        if (payload && Array.isArray(payload.violations)) {
          violations = payload.violations;
        }
      } catch {
        // non-JSON error body: keep the transport-level message
      }
      throw new ApiError(response.status, code, message, violations);
    }
    return (await response.json()) as T;
  }
}
