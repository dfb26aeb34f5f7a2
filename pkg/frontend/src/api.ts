// Typed client for the topicrec /v1 endpoints.

export interface InterestEntry {
  topic: string;
  weight: number | "manual";
}

export interface InterestsResponse {
  user_id: string;
  interests: InterestEntry[];
}

export interface RecomputeResponse extends InterestsResponse {
  iterations_run: number;
  final_log_likelihood: number | null;
}

export interface RecommendationItem {
  tweet_id: string;
  text: string;
  topic: string;
  topical_rank: number;
  final_rank: number;
  explanation: string;
}

export interface RecommendationsResponse {
  user_id: string;
  items: RecommendationItem[];
  generated_at: number;
}

export interface TopicTweet {
  tweet_id: string;
  text: string;
  score: number;
}

export interface TopicTweetsResponse {
  topic: string;
  tweets: TopicTweet[];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<{
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}>;

async function asApiError(status: number, body: unknown): Promise<ApiError> {
  const record = (body ?? {}) as Record<string, unknown>;
  const code = typeof record.error === "string" ? record.error : "http_error";
  const message =
    typeof record.message === "string" ? record.message : `HTTP ${status}`;
  return new ApiError(status, code, message);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      throw await asApiError(response.status, body);
    }
    return body as T;
  }

  listUsers(): Promise<{ users: string[] }> {
    return this.request("/v1/users");
  }

  getInterests(userId: string): Promise<InterestsResponse> {
    return this.request(`/v1/users/${encodeURIComponent(userId)}/interests`);
  }

  addTopic(userId: string, topic: string): Promise<InterestsResponse> {
    return this.request(
      `/v1/users/${encodeURIComponent(userId)}/interests/edits`,
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ add: [topic], remove: [] }),
      },
    );
  }

  removeTopic(userId: string, topic: string): Promise<InterestsResponse> {
    return this.request(
      `/v1/users/${encodeURIComponent(userId)}/interests/${encodeURIComponent(topic)}`,
      { method: "DELETE" },
    );
  }

  recompute(userId: string): Promise<RecomputeResponse> {
    return this.request(
      `/v1/users/${encodeURIComponent(userId)}/interests/recompute`,
      { method: "POST" },
    );
  }

  getRecommendations(
    userId: string,
    limit: number,
  ): Promise<RecommendationsResponse> {
    return this.request(
      `/v1/users/${encodeURIComponent(userId)}/recommendations?limit=${limit}`,
    );
  }

  getTopicTweets(topic: string, limit: number): Promise<TopicTweetsResponse> {
    return this.request(
      `/v1/topics/${encodeURIComponent(topic)}/tweets?limit=${limit}`,
    );
  }
}
