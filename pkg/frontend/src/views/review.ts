// Reviewer queue: approve or flag-with-comment, one card per submitted
// translation. Flagging without a comment is blocked before any request
// is made (the server enforces it again).

import type { ApiClient, ReviewQueueItem, ReviewerTasks } from "../api.js";
import { banner, clear, el } from "../dom.js";
import { STRINGS } from "../strings.js";

export interface ReviewView {
  element: HTMLElement;
  refresh(): Promise<void>;
  /** Exposed for tests: false means blocked client-side, no API call. */
  decide(item: ReviewQueueItem, decision: "approve" | "flag", comment: string): Promise<boolean>;
}

export function reviewView(client: ApiClient): ReviewView {
  const root = el("section", { class: "view review" });
  const status = el("div", { class: "status" });
  const queueBox = el("div", { class: "queue" });

  async function decide(
    item: ReviewQueueItem,
    decision: "approve" | "flag",
    comment: string
  ): Promise<boolean> {
    clear(status);
    if (decision === "flag" && !comment.trim()) {
      status.append(banner("error", STRINGS.flagNeedsComment));
      return false;
    }
    try {
      await client.review(item.translation_id, decision, comment);
      await refresh(); // the item leaves the queue
      status.append(banner("info", decision === "approve" ? STRINGS.approved : STRINGS.flagged));
      return true;
    } catch (err) {
      status.append(banner("error", err instanceof Error ? err.message : STRINGS.reviewFailed));
      await refresh();
      return false;
    }
  }

  function card(item: ReviewQueueItem): HTMLElement {
    const commentInput = el("input", {
      type: "text",
      placeholder: STRINGS.commentPlaceholder,
      "aria-label": "review comment",
    });
    const approveButton = el("button", { class: "primary" }, STRINGS.approve);
    const flagButton = el("button", { class: "danger" }, STRINGS.flag);
    approveButton.addEventListener("click", () => void decide(item, "approve", commentInput.value));
    flagButton.addEventListener("click", () => void decide(item, "flag", commentInput.value));

    const box = el(
      "article",
      { class: "card review-item" },
      el("p", { class: "english" }, item.english_text),
      el("p", { class: "hula" }, item.hula_text),
      el("p", { class: "muted" }, `attempt ${item.attempt_index} by ${item.translator_id}`)
    );
    if (item.audio_ref) {
      const player = el("audio", { controls: "" });
      void client.fetchAudio(item.audio_ref).then((blob) => {
        player.src = URL.createObjectURL(blob);
      });
      box.append(player);
    }
    if (item.flag_comments.length) {
      const list = el("ul", { class: "flag-comments" });
      for (const comment of item.flag_comments) list.append(el("li", {}, comment));
      box.append(el("p", {}, STRINGS.earlierGuidance), list);
    }
    box.append(el("div", { class: "actions" }, commentInput, approveButton, flagButton));
    return box;
  }

  async function refresh(): Promise<void> {
    try {
      const tasks = (await client.tasks()) as ReviewerTasks;
      clear(queueBox);
      if (!tasks.queue.length) {
        queueBox.append(el("p", { class: "muted" }, STRINGS.reviewEmpty));
        return;
      }
      for (const item of tasks.queue) queueBox.append(card(item));
    } catch (err) {
      clear(status);
      status.append(
        banner("error", err instanceof Error ? err.message : STRINGS.queueUnavailable,
               () => void refresh())
      );
    }
  }

  root.append(el("h2", {}, STRINGS.reviewHeading), queueBox, status);
  return { element: root, refresh, decide };
}
