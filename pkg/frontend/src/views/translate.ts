// Translator workspace: claim a sentence, type the translation, record
// or attach audio (with playback before submitting), and see batch
// progress after each submission. Flag comments from reviewers guide
// revisions.

import type { ApiClient, ClaimedTask, TranslatorTasks } from "../api.js";
import { ApiError } from "../api.js";
import { captureSupported, startRecording, type RecorderHandle } from "../audio.js";
import { banner, clear, el } from "../dom.js";
import { STRINGS } from "../strings.js";

export interface TranslateView {
  element: HTMLElement;
  refresh(): Promise<void>;
  /** Exposed for tests: returns false (and makes no API call) on blank text. */
  submit(): Promise<boolean>;
}

export function translateView(client: ApiClient): TranslateView {
  const root = el("section", { class: "view translate" });
  const status = el("div", { class: "status" });
  const taskBox = el("div", { class: "card task" });
  const counters = el("div", { class: "counters" });
  const textArea = el("textarea", {
    placeholder: STRINGS.translatePlaceholder,
    rows: "4",
    "aria-label": "translation text",
  });
  const audioControls = el("div", { class: "audio-controls" });
  const playback = el("div", { class: "playback" });
  const submitButton = el("button", { class: "primary" }, STRINGS.submitTranslation);
  const claimButton = el("button", {}, STRINGS.claimButton);

  let currentTask: ClaimedTask | null = null;
  let recorder: RecorderHandle | null = null;
  let pendingAudio: Blob | null = null;

  function setAudio(blob: Blob | null) {
    pendingAudio = blob;
    clear(playback);
    if (blob) {
      const player = el("audio", { controls: "" });
      player.src = URL.createObjectURL(blob);
      playback.append(player, el("span", { class: "muted" }, ` ${blob.size} bytes ready`));
    }
  }

  function renderTask() {
    clear(taskBox);
    if (!currentTask) {
      taskBox.append(el("p", { class: "muted" }, STRINGS.noClaim), claimButton);
      return;
    }
    taskBox.append(
      el("h2", {}, STRINGS.translateHeading),
      el("p", { class: "english" }, currentTask.english_text),
      el("p", { class: "muted" }, `batch ${currentTask.batch_id}, attempt ${currentTask.attempt_count + 1}`)
    );
    if (currentTask.flag_comments.length) {
      const list = el("ul", { class: "flag-comments" });
      for (const comment of currentTask.flag_comments) {
        list.append(el("li", {}, comment));
      }
      taskBox.append(el("p", {}, STRINGS.reviewerGuidance), list);
    }
  }

  function renderCounters(tasks: TranslatorTasks) {
    clear(counters);
    counters.append(
      el("span", {}, `${tasks.available_count} ${STRINGS.availableSuffix}`),
      el("span", {}, `${tasks.needs_revision_count} ${STRINGS.revisionSuffix}`)
    );
  }

  async function refresh(): Promise<void> {
    clear(status);
    try {
      const tasks = (await client.tasks()) as TranslatorTasks;
      renderCounters(tasks);
      currentTask = tasks.claimed[0] ?? null;
      renderTask();
    } catch (err) {
      clear(status);
      status.append(banner("error", describe(err), () => void refresh()));
    }
  }

  async function claim(): Promise<void> {
    clear(status);
    try {
      const sentence = await client.claim();
      if (!sentence) {
        status.append(banner("info", STRINGS.nothingToTranslate));
        return;
      }
      await refresh();
    } catch (err) {
      status.append(banner("error", describe(err), () => void claim()));
    }
  }

  async function submit(): Promise<boolean> {
    clear(status);
    if (!currentTask) {
      status.append(banner("info", STRINGS.claimFirst));
      return false;
    }
    const text = textArea.value.trim();
    if (!text) {
      status.append(banner("error", STRINGS.blankTranslation));
      return false; // inline validation: no API call
    }
    submitButton.disabled = true;
    try {
      const translation = await client.submitTranslation(currentTask.sentence_id, text, pendingAudio ?? undefined);
      textArea.value = "";
      setAudio(null);
      currentTask = null;
      const confirmation = translation.audio_ref
        ? `Submitted (attempt ${translation.attempt_index}, audio ${translation.audio_ref}).`
        : `Submitted (attempt ${translation.attempt_index}).`;
      await refresh();
      status.append(banner("info", confirmation));
      return true;
    } catch (err) {
      if (err instanceof ApiError && (err.code === "lease_expired" || err.code === "not_claimant")) {
        status.append(banner("error", `${err.message} — ${STRINGS.reclaimPrompt}`, () => void claim()));
        currentTask = null;
        renderTask();
      } else {
        status.append(banner("error", describe(err)));
      }
      return false;
    } finally {
      submitButton.disabled = false;
    }
  }

  function buildAudioControls() {
    const recordButton = el("button", {}, STRINGS.record);
    const stopButton = el("button", { disabled: "" }, STRINGS.stopRecording);
    const fileInput = el("input", { type: "file", accept: "audio/*", "aria-label": "attach audio" });
    recordButton.addEventListener("click", async () => {
      try {
        recorder = await startRecording();
        recordButton.disabled = true;
        stopButton.disabled = false;
      } catch {
        clear(status);
        status.append(banner("error", STRINGS.microphoneUnavailable));
      }
    });
    stopButton.addEventListener("click", async () => {
      if (!recorder) return;
      setAudio(await recorder.stop());
      recorder = null;
      recordButton.disabled = false;
      stopButton.disabled = true;
    });
    fileInput.addEventListener("change", () => {
      const file = fileInput.files?.[0];
      if (file) setAudio(file);
    });
    if (captureSupported()) audioControls.append(recordButton, stopButton);
    audioControls.append(fileInput);
  }

  claimButton.addEventListener("click", () => void claim());
  submitButton.addEventListener("click", () => void submit());
  buildAudioControls();

  root.append(
    counters,
    taskBox,
    el("div", { class: "card editor" }, textArea, audioControls, playback, submitButton),
    status
  );
  return { element: root, refresh, submit };
}

function describe(err: unknown): string {
  return err instanceof Error ? err.message : STRINGS.unexpectedError;
}
