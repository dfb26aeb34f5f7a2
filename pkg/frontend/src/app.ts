// Interaction loop: pick a user, view and edit inferred interests,
// trigger recomputation, browse explained recommendations and
// per-topic tweet lists.
//
// The UI never ranks or filters on its own: interest and
// recommendation lists render in exactly the order the server sent,
// and explanation strings are inserted verbatim as text.

import {
  ApiClient,
  ApiError,
  InterestsResponse,
  RecommendationsResponse,
  TopicTweetsResponse,
} from "./api.js";

export const RECOMMENDATION_LIMIT = 10;
export const TOPIC_BROWSE_LIMIT = 10;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export class UiSession {
  readonly root: HTMLElement;
  private readonly api: ApiClient;

  private userId: string | null = null;
  private recomputePending = false;

  private userSelect!: HTMLSelectElement;
  private interestsPanel!: HTMLElement;
  private recommendationsPanel!: HTMLElement;
  private topicPanel!: HTMLElement;

  constructor(root: HTMLElement, api: ApiClient) {
    this.root = root;
    this.api = api;
    this.buildSkeleton();
  }

  private buildSkeleton(): void {
    clear(this.root);
    const header = el("header");
    header.appendChild(el("h1", "app-title", "topicrec"));
    this.userSelect = el("select", "user-select");
    this.userSelect.addEventListener("change", () => {
      void this.selectUser(this.userSelect.value);
    });
    header.appendChild(this.userSelect);
    this.root.appendChild(header);

    this.interestsPanel = el("section", "interests-panel");
    this.recommendationsPanel = el("section", "recommendations-panel");
    this.topicPanel = el("section", "topic-panel");
    this.root.appendChild(this.interestsPanel);
    this.root.appendChild(this.recommendationsPanel);
    this.root.appendChild(this.topicPanel);
  }

  async start(): Promise<void> {
    const { users } = await this.api.listUsers();
    clear(this.userSelect);
    const placeholder = el("option", undefined, "select a user");
    placeholder.value = "";
    this.userSelect.appendChild(placeholder);
    for (const id of users) {
      const option = el("option", undefined, id);
      option.value = id;
      this.userSelect.appendChild(option);
    }
  }

  async selectUser(userId: string): Promise<void> {
    if (!userId) return;
    this.userId = userId;
    clear(this.topicPanel);
    await this.refreshInterests();
    await this.refreshRecommendations();
  }

  // -- interests ----------------------------------------------------

  private async refreshInterests(): Promise<void> {
    if (!this.userId) return;
    try {
      const view = await this.api.getInterests(this.userId);
      this.renderInterests(view);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.renderInterestsCallToAction();
      } else {
        this.renderError(this.interestsPanel, error);
      }
    }
  }

  renderInterests(view: InterestsResponse): void {
    clear(this.interestsPanel);
    this.interestsPanel.appendChild(el("h2", undefined, "topics of interest"));

    const list = el("ul", "interest-list");
    for (const entry of view.interests) {
      const item = el("li", "interest-item");
      item.dataset.topic = entry.topic;
      item.appendChild(el("span", "interest-topic", entry.topic));
      const label =
        entry.weight === "manual" ? "manual" : entry.weight.toFixed(4);
      item.appendChild(el("span", "interest-weight", label));
      const remove = el("button", "remove-topic", "remove");
      remove.addEventListener("click", () => {
        void this.removeTopic(entry.topic);
      });
      item.appendChild(remove);
      list.appendChild(item);
    }
    this.interestsPanel.appendChild(list);
    this.interestsPanel.appendChild(this.buildAddForm());
    this.interestsPanel.appendChild(this.buildRecomputeButton());
  }

  private renderInterestsCallToAction(): void {
    clear(this.interestsPanel);
    const cta = el("div", "cta");
    cta.appendChild(
      el("p", undefined, "no interests computed for this user yet"),
    );
    cta.appendChild(this.buildRecomputeButton("compute interests"));
    this.interestsPanel.appendChild(cta);
  }

  private buildAddForm(): HTMLElement {
    const form = el("div", "add-topic-form");
    const input = el("input", "add-topic-input");
    input.placeholder = "add a topic";
    const button = el("button", "add-topic", "add");
    button.addEventListener("click", () => {
      if (input.value.trim()) void this.addTopic(input.value.trim());
    });
    form.appendChild(input);
    form.appendChild(button);
    return form;
  }

  private buildRecomputeButton(label = "recompute interests"): HTMLButtonElement {
    const button = el("button", "recompute", label);
    button.disabled = this.recomputePending;
    if (this.recomputePending) button.classList.add("pending");
    button.addEventListener("click", () => {
      void this.recompute();
    });
    return button;
  }

  private async addTopic(topic: string): Promise<void> {
    if (!this.userId) return;
    try {
      const view = await this.api.addTopic(this.userId, topic);
      this.renderInterests(view);
      await this.refreshRecommendations();
    } catch (error) {
      this.renderInlineError(this.interestsPanel, error);
    }
  }

  private async removeTopic(topic: string): Promise<void> {
    if (!this.userId) return;
    try {
      const view = await this.api.removeTopic(this.userId, topic);
      this.renderInterests(view);
      await this.refreshRecommendations();
    } catch (error) {
      this.renderInlineError(this.interestsPanel, error);
    }
  }

  private async recompute(): Promise<void> {
    if (!this.userId || this.recomputePending) return;
    this.recomputePending = true;
    this.setRecomputeButtonsDisabled(true);
    try {
      const view = await this.api.recompute(this.userId);
      this.recomputePending = false;
      this.renderInterests(view);
      await this.refreshRecommendations();
    } catch (error) {
      this.recomputePending = false;
      this.setRecomputeButtonsDisabled(false);
      this.renderInlineError(this.interestsPanel, error);
    }
  }

  private setRecomputeButtonsDisabled(disabled: boolean): void {
    for (const node of this.root.querySelectorAll("button.recompute")) {
      (node as HTMLButtonElement).disabled = disabled;
      node.classList.toggle("pending", disabled);
    }
  }

  // -- recommendations ----------------------------------------------

  private async refreshRecommendations(): Promise<void> {
    if (!this.userId) return;
    try {
      const view = await this.api.getRecommendations(
        this.userId,
        RECOMMENDATION_LIMIT,
      );
      this.renderRecommendations(view);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        clear(this.recommendationsPanel);
        const cta = el("div", "cta");
        cta.appendChild(
          el("p", undefined, "run interest inference to get recommendations"),
        );
        this.recommendationsPanel.appendChild(cta);
      } else {
        this.renderError(this.recommendationsPanel, error);
      }
    }
  }

  renderRecommendations(view: RecommendationsResponse): void {
    clear(this.recommendationsPanel);
    this.recommendationsPanel.appendChild(
      el("h2", undefined, "recommended tweets"),
    );
    if (view.items.length === 0) {
      this.recommendationsPanel.appendChild(
        el("div", "empty-state", "nothing to recommend yet"),
      );
      return;
    }
    const feed = el("div", "feed");
    for (const item of view.items) {
      const card = el("article", "card");
      card.dataset.tweetId = item.tweet_id;
      card.appendChild(el("p", "tweet-text", item.text));
      const badge = el("button", "topic-badge", item.topic);
      badge.addEventListener("click", () => {
        void this.browseTopic(item.topic);
      });
      card.appendChild(badge);
      card.appendChild(el("span", "explanation", item.explanation));
      feed.appendChild(card);
    }
    this.recommendationsPanel.appendChild(feed);
  }

  // -- per-topic browsing --------------------------------------------

  private async browseTopic(topic: string): Promise<void> {
    try {
      const view = await this.api.getTopicTweets(topic, TOPIC_BROWSE_LIMIT);
      this.renderTopicTweets(view);
    } catch (error) {
      this.renderError(this.topicPanel, error);
    }
  }

  renderTopicTweets(view: TopicTweetsResponse): void {
    clear(this.topicPanel);
    this.topicPanel.appendChild(el("h2", undefined, `top tweets: ${view.topic}`));
    const list = el("ul", "topic-tweets");
    for (const tweet of view.tweets) {
      const item = el("li", "topic-tweet");
      item.dataset.tweetId = tweet.tweet_id;
      item.appendChild(el("span", "tweet-text", tweet.text));
      list.appendChild(item);
    }
    this.topicPanel.appendChild(list);
  }

  // -- errors ---------------------------------------------------------

  private renderError(panel: HTMLElement, error: unknown): void {
    clear(panel);
    panel.appendChild(el("div", "error", describeError(error)));
  }

  private renderInlineError(panel: HTMLElement, error: unknown): void {
    for (const old of panel.querySelectorAll(".error")) old.remove();
    panel.appendChild(el("div", "error", describeError(error)));
  }
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}
