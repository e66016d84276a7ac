// Typed client for the corpusforge HTTP API. All displayed numbers come
// from these payloads untouched: the client computes no business results.

export type Role = "admin" | "translator" | "reviewer";

export interface Session {
  token: string;
  user_id: string;
  role: Role;
  expires_at: number;
}

export interface Sentence {
  id: string;
  english_text: string;
  batch_id: string;
  status: string;
  attempt_count: number;
  claim: { translator_id: string; lease_expiry: number; prior_status: string } | null;
}

export interface Translation {
  id: string;
  sentence_id: string;
  hula_text: string;
  audio_ref: string | null;
  attempt_index: number;
  status: string;
}

export interface ClaimedTask {
  sentence_id: string;
  english_text: string;
  batch_id: string;
  attempt_count: number;
  lease_expiry: number;
  flag_comments: string[];
}

export interface TranslatorTasks {
  role: "translator";
  claimed: ClaimedTask[];
  available_count: number;
  needs_revision_count: number;
}

export interface ReviewQueueItem {
  sentence_id: string;
  english_text: string;
  batch_id: string;
  translation_id: string;
  hula_text: string;
  audio_ref: string | null;
  translator_id: string;
  attempt_index: number;
  flag_comments: string[];
}

export interface ReviewerTasks {
  role: "reviewer";
  queue: ReviewQueueItem[];
}

export interface AdminTasks {
  role: "admin";
  batches: Record<string, Record<string, number>>;
}

export type Tasks = TranslatorTasks | ReviewerTasks | AdminTasks;

export interface CorpusStats {
  pair_count: number;
  unique_source_words: number;
  unique_target_words: number;
  median_words: number;
  median_chars: number;
  approval_distribution: Record<string, number>;
  source_median_words: number;
  source_median_chars: number;
}

export interface StatsPayload {
  corpus: CorpusStats;
  progress: Record<string, Record<string, number>>;
  participation: { translators: number; reviewers: number; admins: number };
  sus: { respondents: number; mean: number | null };
}

export interface LeaderboardRow {
  translator_id: string;
  display_name: string;
  approved_count: number;
  submitted_count: number;
  rank: number;
}

export interface Balances {
  pool_minor: number;
  owed_minor: Record<string, number>;
  disbursed_total_minor: number;
  contributed_total_minor: number;
}

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  token: string | null = null;

  constructor(
    readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (...args) => fetch(...args)
  ) {}

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    const headers: Record<string, string> = { ...extra };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async request<T>(method: string, path: string, init: RequestInit = {}): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, { method, ...init });
    if (!response.ok) {
      let code = "error";
      let message = `${response.status} ${response.statusText}`;
      try {
        const body = await response.json();
        code = body.error ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body: keep the status line
      }
      throw new ApiError(code, message, response.status);
    }
    const text = await response.text();
    return (text ? JSON.parse(text) : null) as T;
  }

  private json<T>(method: string, path: string, body: unknown): Promise<T> {
    return this.request<T>(method, path, {
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify(body),
    });
  }

  async login(credential: string): Promise<Session> {
    const session = await this.json<Session>("POST", "/auth/login", { credential });
    this.token = session.token;
    return session;
  }

  logout(): void {
    this.token = null;
  }

  claim(leaseSeconds?: number): Promise<Sentence | null> {
    return this.json<{ sentence: Sentence | null }>("POST", "/tasks/claim", {
      lease_seconds: leaseSeconds ?? null,
    }).then((body) => body.sentence);
  }

  submitTranslation(sentenceId: string, hulaText: string, audio?: Blob): Promise<Translation> {
    const path = `/sentences/${encodeURIComponent(sentenceId)}/translations`;
    if (!audio) {
      return this.json<Translation>("POST", path, { hula_text: hulaText });
    }
    const form = new FormData();
    form.append("hula_text", hulaText);
    form.append("audio", audio, "recording");
    return this.request<Translation>("POST", path, { headers: this.headers(), body: form });
  }

  review(translationId: string, decision: "approve" | "flag", comment = ""): Promise<unknown> {
    return this.json("POST", `/translations/${encodeURIComponent(translationId)}/review`, {
      decision,
      comment,
    });
  }

  tasks(): Promise<Tasks> {
    return this.request<Tasks>("GET", "/tasks", { headers: this.headers() });
  }

  stats(): Promise<StatsPayload> {
    return this.request<StatsPayload>("GET", "/stats", { headers: this.headers() });
  }

  leaderboard(limit = 10): Promise<LeaderboardRow[]> {
    return this.request<{ rows: LeaderboardRow[] }>("GET", `/leaderboard?limit=${limit}`, {
      headers: this.headers(),
    }).then((body) => body.rows);
  }

  balances(): Promise<Balances> {
    return this.request<Balances>("GET", "/ledger/balances", { headers: this.headers() });
  }

  importBatch(
    batchId: string,
    lines: string[]
  ): Promise<{ batch_id: string; imported: number; skipped_duplicates: number }> {
    return this.json("POST", `/batches/${encodeURIComponent(batchId)}/import`, {
      items: lines.map((en) => ({ en })),
    });
  }

  async exportApproved(mark = false): Promise<string> {
    const response = await this.fetchFn(`${this.baseUrl}/export?mark=${mark}`, {
      headers: this.headers(),
    });
    if (!response.ok) throw new ApiError("error", `export failed (${response.status})`, response.status);
    return response.text();
  }

  submitSus(responses: number[]): Promise<{ id: string; score: number }> {
    return this.json("POST", "/sus", { responses });
  }

  audioUrl(audioRef: string): string {
    return `${this.baseUrl}/audio/${encodeURIComponent(audioRef)}`;
  }

  async fetchAudio(audioRef: string): Promise<Blob> {
    const response = await this.fetchFn(this.audioUrl(audioRef), { headers: this.headers() });
    if (!response.ok) throw new ApiError("error", `audio fetch failed (${response.status})`, response.status);
    return response.blob();
  }
}
