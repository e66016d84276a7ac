import type { ApiClient, Session } from "../api.js";
import { ApiError } from "../api.js";
import { clear, el } from "../dom.js";
import { STRINGS } from "../strings.js";

export function loginView(client: ApiClient, onLogin: (session: Session) => void): HTMLElement {
  const status = el("div", { class: "status" });
  const input = el("input", {
    type: "password",
    placeholder: STRINGS.credentialPlaceholder,
    autocomplete: "current-password",
    "aria-label": "credential",
  });
  const button = el("button", { class: "primary" }, STRINGS.signIn);

  const submit = async () => {
    clear(status);
    const credential = input.value.trim();
    if (!credential) {
      status.append(STRINGS.credentialMissing);
      return;
    }
    button.disabled = true;
    try {
      onLogin(await client.login(credential));
    } catch (err) {
      status.append(err instanceof ApiError ? err.message : STRINGS.serverUnreachable);
    } finally {
      button.disabled = false;
    }
  };
  button.addEventListener("click", submit);
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") void submit();
  });

  return el(
    "section",
    { class: "card login" },
    el("h1", {}, STRINGS.appName),
    el("p", {}, STRINGS.tagline),
    input,
    button,
    status
  );
}
