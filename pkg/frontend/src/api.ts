/** Typed client for the notebook service JSON API.
 *
 * The session token lives only in this object (memory, never storage).
 * Every request goes through the route table; errors carry the server's
 * machine code and message verbatim.
 */

import { ROUTES, RouteName } from "./routes.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public fields: string[] = [],
    public changePasswordRoute?: string,
  ) {
    super(message);
  }
}

export interface SessionInfo {
  token: string;
  username: string;
  issued_utc: string;
  expires_utc: string;
}

export interface Notebook {
  id: number;
  title: string;
  creator: string;
  created_utc: string;
  archived: boolean;
}

export interface AttachmentInfo {
  filename: string;
  content_digest: string;
  size_bytes: number;
}

export interface Entry {
  id: number;
  notebook_id: number;
  title: string;
  description: string;
  keywords: string[];
  file: AttachmentInfo | null;
  author: string;
  created_utc: string;
}

export interface Comment {
  id: number;
  entry_id: number;
  text: string;
  file: AttachmentInfo | null;
  author: string;
  created_utc: string;
}

export interface Notarization {
  id: number;
  entry_id: number;
  notary: string;
  created_utc: string;
}

export interface EntryThread {
  entry: Entry;
  comments: Comment[];
  notarizations: Notarization[];
}

export interface TocRow {
  entry_id: number;
  title: string;
  created_utc: string;
}

export interface AnalysisResult {
  id: number;
  owner: string;
  kind: "primer" | "sequence";
  payload: [string, string][];
  created_utc: string;
}

export interface VerificationReport {
  record_kind: string;
  record_id: number;
  status: "consistent" | "tampered" | "unsigned";
  first_divergent_batch: number | null;
  details: Record<string, boolean>;
}

export interface PrimerInput {
  left: string;
  right: string;
  monovalent_mM: number;
  divalent_mM: number;
  primer_concentration_M: number;
}

export class ApiClient {
  private token: string | null = null;
  username: string | null = null;

  constructor(private base: string = "") {}

  get authenticated(): boolean {
    return this.token !== null;
  }

  forgetSession(): void {
    this.token = null;
    this.username = null;
  }

  private async request<T>(
    name: RouteName,
    options: { body?: unknown; query?: Record<string, string>; form?: FormData } = {},
  ): Promise<T> {
    const route = ROUTES[name];
    let url = this.base + route.path;
    if (options.query) {
      url += "?" + new URLSearchParams(options.query).toString();
    }
    const headers: Record<string, string> = {};
    if (route.auth || name === "logout") {
      if (!this.token) throw new ApiError(401, "no_session", "not logged in");
      headers["Authorization"] = `Bearer ${this.token}`;
    }
    let body: BodyInit | undefined;
    if (options.form) {
      body = options.form;
    } else if (options.body !== undefined) {
      headers["Content-Type"] = "application/json";
      body = JSON.stringify(options.body);
    }
    const response = await fetch(url, { method: route.method, headers, body });
    const text = await response.text();
    const data = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(
        response.status,
        data?.code ?? "error",
        data?.message ?? response.statusText,
        data?.fields ?? [],
        data?.change_password_route,
      );
    }
    return data as T;
  }

  // -- account ------------------------------------------------------

  async createAccount(username: string, password: string) {
    return this.request<{ username: string; authorized: boolean }>("newaccount", {
      body: { username, password },
    });
  }

  async login(username: string, password: string): Promise<SessionInfo> {
    const session = await this.request<SessionInfo>("login", {
      body: { username, password },
    });
    this.token = session.token;
    this.username = session.username;
    return session;
  }

  async logout(): Promise<void> {
    try {
      await this.request("logout", { body: {} });
    } finally {
      this.forgetSession();
    }
  }

  async changePassword(username: string, oldPassword: string, newPassword: string) {
    return this.request<{ ok: boolean }>("changepassword", {
      body: { username, old_password: oldPassword, new_password: newPassword },
    });
  }

  async authorize(target: string) {
    return this.request<{ username: string; authorized: boolean }>("authorize", {
      body: { target },
    });
  }

  async deauthorize(target: string) {
    return this.request<{ username: string; authorized: boolean }>("deauthorize", {
      body: { target },
    });
  }

  // -- notebook content ----------------------------------------------

  async newNotebook(title: string): Promise<Notebook> {
    return this.request<Notebook>("newNotebook", { body: { title } });
  }

  async notebooks(): Promise<Notebook[]> {
    return this.request<Notebook[]>("notebooks");
  }

  async newEntry(input: {
    notebook_id: number;
    title: string;
    description: string;
    keywords: string[];
    file?: File;
  }): Promise<Entry> {
    if (input.file) {
      const form = new FormData();
      form.set("notebook_id", String(input.notebook_id));
      form.set("title", input.title);
      form.set("description", input.description);
      form.set("keywords", input.keywords.join(", "));
      form.set("file", input.file);
      return this.request<Entry>("newEntry", { form });
    }
    return this.request<Entry>("newEntry", { body: input });
  }

  async newComment(entryId: number, text: string): Promise<Comment> {
    return this.request<Comment>("newComment", {
      body: { entry_id: entryId, text },
    });
  }

  async listEntries(notebookId?: number): Promise<Entry[]> {
    const query: Record<string, string> = {};
    if (notebookId !== undefined) query.notebook_id = String(notebookId);
    return this.request<Entry[]>("listEntries", { query });
  }

  async entryThread(entryId: number): Promise<EntryThread> {
    return this.request<EntryThread>("entryThread", {
      query: { entry_id: String(entryId) },
    });
  }

  async toc(notebookId: number): Promise<TocRow[]> {
    return this.request<TocRow[]>("toc", { query: { notebook_id: String(notebookId) } });
  }

  async notarize(entryId: number): Promise<Notarization> {
    return this.request<Notarization>("notarize", { body: { entry_id: entryId } });
  }

  async setArchived(notebookId: number, archived: boolean): Promise<Notebook> {
    return this.request<Notebook>(archived ? "archive" : "unarchive", {
      body: { notebook_id: notebookId },
    });
  }

  async generateSignatures(): Promise<{ batch_id: number }> {
    return this.request<{ batch_id: number }>("generateSignatures", { body: {} });
  }

  async verify(recordKind: "entry" | "comment", recordId: number) {
    return this.request<VerificationReport>("verify", {
      query: { record_kind: recordKind, record_id: String(recordId) },
    });
  }

  async results(): Promise<AnalysisResult[]> {
    return this.request<AnalysisResult[]>("results");
  }

  // -- analysis --------------------------------------------------------

  async analyzePrimers(input: PrimerInput): Promise<AnalysisResult> {
    return this.request<AnalysisResult>("primerAnalyze", { body: input });
  }

  async sequenceTransform(operation: string, sequence: string): Promise<AnalysisResult> {
    return this.request<AnalysisResult>("sequenceTransform", {
      body: { operation, sequence },
    });
  }

  async sequenceProtein(sequence: string): Promise<AnalysisResult> {
    return this.request<AnalysisResult>("sequenceProtein", { body: { sequence } });
  }

  async sequenceRestriction(sequence: string, enzymes?: string[]): Promise<AnalysisResult> {
    const body: Record<string, unknown> = { sequence };
    if (enzymes) body.enzymes = enzymes;
    return this.request<AnalysisResult>("sequenceRestriction", { body });
  }

  async statsDescriptive(values: number[]): Promise<Record<string, number>> {
    return this.request<Record<string, number>>("statsDescriptive", { body: { values } });
  }

  async statsRegression(xs: number[], ys: number[]): Promise<Record<string, number>> {
    return this.request<Record<string, number>>("statsRegression", { body: { xs, ys } });
  }

  async statsTable2x2(a: number, b: number, c: number, d: number) {
    return this.request<Record<string, unknown>>("statsTable2x2", {
      body: { a, b, c, d },
    });
  }

  async statsTableRxC(counts: number[][]) {
    return this.request<Record<string, unknown>>("statsTableRxC", { body: { counts } });
  }

  async backup() {
    return this.request<{
      remote_dir: string;
      dump_name: string;
      attachment_names: string[];
      created_utc: string;
    }>("backup", { body: {} });
  }
}
