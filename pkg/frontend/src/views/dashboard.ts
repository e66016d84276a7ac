// Progress dashboard: per-batch counts, corpus statistics, leaderboard,
// and (for admins only) the prize-pool balance. Values are rendered
// straight from the view model, which copies API payloads verbatim.

import type { ApiClient, Role } from "../api.js";
import { banner, clear, el } from "../dom.js";
import { STRINGS } from "../strings.js";
import { buildDashboardViewModel, canSeeLedger, type DashboardViewModel } from "../state.js";

export interface DashboardView {
  element: HTMLElement;
  refresh(): Promise<void>;
  /** Last rendered view model; tests compare it against raw payloads. */
  model(): DashboardViewModel | null;
}

export function dashboardView(client: ApiClient, role: Role): DashboardView {
  const root = el("section", { class: "view dashboard" });
  const status = el("div", { class: "status" });
  const content = el("div", { class: "dashboard-grid" });
  let lastModel: DashboardViewModel | null = null;

  function statList(model: DashboardViewModel): HTMLElement {
    const corpus = model.corpus;
    const dist = corpus.approval_distribution;
    const rows: [string, string][] = [
      ["Sentence pairs", String(corpus.pair_count)],
      ["Unique English words", String(corpus.unique_source_words)],
      ["Unique Hula words", String(corpus.unique_target_words)],
      ["Median length", `${corpus.median_words} words / ${corpus.median_chars} chars`],
      ["Translators", String(model.participation.translators)],
      ["Reviewers", String(model.participation.reviewers)],
    ];
    if (Object.keys(dist).length) {
      rows.push([
        "Approved after 1 / 2 / 3+",
        ["1", "2", "3+"].map((k) => `${((dist[k] ?? 0) * 100).toFixed(1)}%`).join(" / "),
      ]);
    }
    const list = el("dl", { class: "stat-list" });
    for (const [label, value] of rows) {
      list.append(el("dt", {}, label), el("dd", {}, value));
    }
    return el("div", { class: "card" }, el("h2", {}, STRINGS.corpusHeading), list);
  }

  function progressTable(model: DashboardViewModel): HTMLElement {
    const box = el("div", { class: "card" }, el("h2", {}, STRINGS.batchesHeading));
    const batches = Object.keys(model.progress).sort();
    if (!batches.length) {
      box.append(el("p", { class: "muted" }, STRINGS.noBatches));
      return box;
    }
    for (const batch of batches) {
      const counts = model.progress[batch];
      const total = Object.values(counts).reduce((a, b) => a + b, 0);
      const done = (counts["approved"] ?? 0) + (counts["exported"] ?? 0);
      const line = el(
        "div",
        { class: "batch-line" },
        el("span", { class: "batch-name" }, batch),
        el("progress", { max: String(total || 1), value: String(done) }),
        el("span", { class: "muted" }, `${done}/${total} approved`)
      );
      box.append(line);
    }
    return box;
  }

  function leaderboardTable(model: DashboardViewModel): HTMLElement {
    const box = el("div", { class: "card" }, el("h2", {}, STRINGS.leaderboardHeading));
    if (!model.leaderboard.length) {
      box.append(el("p", { class: "muted" }, STRINGS.noApprovals));
      return box;
    }
    const table = el("table", { class: "leaderboard" });
    table.append(
      el("tr", {}, el("th", {}, "#"), el("th", {}, "Translator"), el("th", {}, "Approved"),
         el("th", {}, "Submitted"))
    );
    for (const row of model.leaderboard) {
      table.append(
        el(
          "tr",
          {},
          el("td", {}, String(row.rank)),
          el("td", {}, row.display_name),
          el("td", {}, String(row.approved_count)),
          el("td", {}, String(row.submitted_count))
        )
      );
    }
    box.append(table);
    return box;
  }

  function ledgerCard(model: DashboardViewModel): HTMLElement | null {
    if (model.poolToea === null) return null;
    return el(
      "div",
      { class: "card ledger" },
      el("h2", {}, STRINGS.prizePoolHeading),
      el("p", {}, `${(model.poolToea / 100).toFixed(2)} PGK (${model.poolToea} toea)`)
    );
  }

  async function refresh(): Promise<void> {
    clear(status);
    try {
      const [stats, rows] = await Promise.all([client.stats(), client.leaderboard(10)]);
      const balances = canSeeLedger(role) ? await client.balances() : null;
      lastModel = buildDashboardViewModel(stats, rows, balances);
      clear(content);
      content.append(statList(lastModel), progressTable(lastModel), leaderboardTable(lastModel));
      const ledger = ledgerCard(lastModel);
      if (ledger) content.append(ledger);
    } catch (err) {
      status.append(
        banner("error", err instanceof Error ? err.message : STRINGS.dashboardUnavailable,
               () => void refresh())
      );
    }
  }

  root.append(el("h2", {}, STRINGS.dashboardHeading), status, content);
  return { element: root, refresh, model: () => lastModel };
}
