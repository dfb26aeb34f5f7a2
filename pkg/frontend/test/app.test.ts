import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient, RecommendationsResponse } from "../src/api.js";
import { RECOMMENDATION_LIMIT, UiSession } from "../src/app.js";
import { MockApi } from "./mock_api.js";

const USER = "u1";
const INTERESTS_URL = `/v1/users/${USER}/interests`;
const RECS_URL = `/v1/users/${USER}/recommendations?limit=${RECOMMENDATION_LIMIT}`;

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

// Deliberately not sorted by weight or topic: the DOM must mirror it as-is.
const INTERESTS = {
  user_id: USER,
  interests: [
    { topic: "breeze", weight: 0.21 },
    { topic: "alpine", weight: 0.55 },
    { topic: "cosmos", weight: "manual" as const },
  ],
};

const RECS: RecommendationsResponse = {
  user_id: USER,
  generated_at: 1700000000,
  items: [
    {
      tweet_id: "T9",
      text: "tide and harbor",
      topic: "breeze",
      topical_rank: 1,
      final_rank: 1,
      explanation: "recommended because you are interested in breeze",
    },
    {
      tweet_id: "T2",
      text: "ridge and glacier",
      topic: "alpine",
      topical_rank: 1,
      final_rank: 2,
      explanation: "recommended because you are interested in alpine",
    },
    {
      tweet_id: "T5",
      text: "nebula weather",
      topic: "cosmos — Café ☕ / 青空",
      topical_rank: 2,
      final_rank: 3,
      explanation: "recommended because you are interested in cosmos — Café ☕ / 青空",
    },
  ],
};

function setup(mock: MockApi): UiSession {
  document.body.innerHTML = "<div id='app'></div>";
  const root = document.getElementById("app")!;
  return new UiSession(root, new ApiClient("", mock.fetchFn));
}

function baseMock(): MockApi {
  return new MockApi()
    .on("GET", "/v1/users", { users: [USER] })
    .on("GET", INTERESTS_URL, INTERESTS)
    .on("GET", RECS_URL, RECS);
}

describe("order fidelity against the mocked API (B1)", () => {
  let mock: MockApi;
  let session: UiSession;

  beforeEach(async () => {
    mock = baseMock();
    session = setup(mock);
    await session.start();
    await session.selectUser(USER);
  });

  it("renders recommendation cards in exact payload order", () => {
    const ids = [...document.querySelectorAll(".card")].map(
      (card) => (card as HTMLElement).dataset.tweetId,
    );
    expect(ids).toEqual(RECS.items.map((item) => item.tweet_id));
  });

  it("displays every explanation string verbatim", () => {
    const texts = [...document.querySelectorAll(".card .explanation")].map(
      (node) => node.textContent,
    );
    expect(texts).toEqual(RECS.items.map((item) => item.explanation));
  });

  it("renders interests in exact payload order without re-sorting", () => {
    const topics = [...document.querySelectorAll(".interest-item")].map(
      (item) => (item as HTMLElement).dataset.topic,
    );
    expect(topics).toEqual(["breeze", "alpine", "cosmos"]);
  });

  it("marks manual additions", () => {
    const manual = document.querySelector(
      ".interest-item[data-topic='cosmos'] .interest-weight",
    );
    expect(manual?.textContent).toBe("manual");
  });
});

describe("interaction loop issues the right calls (B2)", () => {
  it("remove button sends DELETE and re-renders from the response", async () => {
    const afterRemove = {
      user_id: USER,
      interests: [{ topic: "alpine", weight: 0.55 }],
    };
    const mock = baseMock().on(
      "DELETE", `${INTERESTS_URL}/breeze`, afterRemove,
    );
    const session = setup(mock);
    await session.start();
    await session.selectUser(USER);

    const remove = document.querySelector(
      ".interest-item[data-topic='breeze'] .remove-topic",
    ) as HTMLButtonElement;
    remove.click();
    await flush();

    expect(mock.callsTo("DELETE", `${INTERESTS_URL}/breeze`)).toHaveLength(1);
    const topics = [...document.querySelectorAll(".interest-item")].map(
      (item) => (item as HTMLElement).dataset.topic,
    );
    expect(topics).toEqual(["alpine"]);
  });

  it("add field sends a POST edit and re-renders from the response", async () => {
    const afterAdd = {
      user_id: USER,
      interests: [...INTERESTS.interests, { topic: "harbor", weight: "manual" as const }],
    };
    const mock = baseMock().on("POST", `${INTERESTS_URL}/edits`, afterAdd);
    const session = setup(mock);
    await session.start();
    await session.selectUser(USER);

    const input = document.querySelector(".add-topic-input") as HTMLInputElement;
    input.value = "harbor";
    (document.querySelector(".add-topic") as HTMLButtonElement).click();
    await flush();

    const calls = mock.callsTo("POST", `${INTERESTS_URL}/edits`);
    expect(calls).toHaveLength(1);
    expect(calls[0].body).toEqual({ add: ["harbor"], remove: [] });
    const topics = [...document.querySelectorAll(".interest-item")].map(
      (item) => (item as HTMLElement).dataset.topic,
    );
    expect(topics).toContain("harbor");
  });

  it("shows an inline error when adding an unknown topic", async () => {
    const mock = baseMock().on(
      "POST", `${INTERESTS_URL}/edits`,
      { error: "unknown_topic", message: "topic 'atlantis' is not in the catalog" },
      404,
    );
    const session = setup(mock);
    await session.start();
    await session.selectUser(USER);

    const input = document.querySelector(".add-topic-input") as HTMLInputElement;
    input.value = "atlantis";
    (document.querySelector(".add-topic") as HTMLButtonElement).click();
    await flush();

    const error = document.querySelector(".interests-panel .error");
    expect(error?.textContent).toContain("unknown_topic");
    expect(error?.textContent).toContain("atlantis");
  });

  it("recompute posts once, disables the button while pending, then re-renders", async () => {
    let release!: () => void;
    const gate = new Promise<void>((resolve) => (release = resolve));
    let resolved = false;
    const recomputed = {
      user_id: USER,
      iterations_run: 4,
      final_log_likelihood: -1.25,
      interests: [{ topic: "alpine", weight: 0.9 }],
    };
    const mock = baseMock();
    // Hand-rolled pending response: fetch resolves only after release().
    mock.fetchFn = (((url: string, init?: RequestInit) => {
      const method = init?.method ?? "GET";
      mock.calls.push({ method, url, body: undefined });
      if (method === "POST" && url === `${INTERESTS_URL}/recompute`) {
        return gate.then(() => {
          resolved = true;
          return { ok: true, status: 200, json: async () => recomputed };
        });
      }
      if (url === "/v1/users") {
        return Promise.resolve({ ok: true, status: 200, json: async () => ({ users: [USER] }) });
      }
      if (url === INTERESTS_URL) {
        return Promise.resolve({ ok: true, status: 200, json: async () => INTERESTS });
      }
      return Promise.resolve({ ok: true, status: 200, json: async () => RECS });
    }) as typeof mock.fetchFn);

    const session = setup(mock);
    await session.start();
    await session.selectUser(USER);

    const button = document.querySelector(".recompute") as HTMLButtonElement;
    button.click();
    await flush();
    expect(button.disabled).toBe(true);
    expect(resolved).toBe(false);

    // A second click while pending must not issue another request.
    button.click();
    await flush();
    const posts = mock.calls.filter(
      (c) => c.method === "POST" && c.url === `${INTERESTS_URL}/recompute`,
    );
    expect(posts).toHaveLength(1);

    release();
    await flush();
    const topics = [...document.querySelectorAll(".interest-item")].map(
      (item) => (item as HTMLElement).dataset.topic,
    );
    expect(topics).toEqual(["alpine"]);
    const fresh = document.querySelector(".recompute") as HTMLButtonElement;
    expect(fresh.disabled).toBe(false);
  });

  it("renders a call to action on 409 and empty state on empty feeds", async () => {
    const mock = new MockApi()
      .on("GET", "/v1/users", { users: [USER] })
      .on("GET", INTERESTS_URL,
          { error: "interests_not_computed", message: "not yet" }, 409)
      .on("GET", RECS_URL, { user_id: USER, generated_at: 0, items: [] });
    const session = setup(mock);
    await session.start();
    await session.selectUser(USER);

    expect(document.querySelector(".interests-panel .cta")).toBeTruthy();
    expect(
      document.querySelector(".recommendations-panel .empty-state"),
    ).toBeTruthy();
  });

  it("topic badge click fetches and renders the per-topic view", async () => {
    const mock = baseMock().on(
      "GET", "/v1/topics/breeze/tweets?limit=10",
      {
        topic: "breeze",
        tweets: [
          { tweet_id: "T9", text: "tide and harbor", score: 3.2 },
          { tweet_id: "T4", text: "gull waves", score: 2.1 },
        ],
      },
    );
    const session = setup(mock);
    await session.start();
    await session.selectUser(USER);

    const badge = [...document.querySelectorAll(".topic-badge")].find(
      (b) => b.textContent === "breeze",
    ) as HTMLButtonElement;
    badge.click();
    await flush();

    expect(mock.callsTo("GET", "/v1/topics/breeze/tweets?limit=10")).toHaveLength(1);
    const ids = [...document.querySelectorAll(".topic-tweet")].map(
      (item) => (item as HTMLElement).dataset.tweetId,
    );
    expect(ids).toEqual(["T9", "T4"]);
  });
});
