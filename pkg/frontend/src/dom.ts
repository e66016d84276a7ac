// Tiny DOM helpers: explicit element construction, no innerHTML for
// user-provided strings.

import { STRINGS } from "./strings.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  for (const child of children) {
    node.append(child);
  }
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function banner(kind: "error" | "info", text: string, onRetry?: () => void): HTMLElement {
  const box = el("div", { class: `banner banner-${kind}`, role: "alert" }, text);
  if (onRetry) {
    const retry = el("button", { class: "link" }, STRINGS.retry);
    retry.addEventListener("click", onRetry);
    box.append(" ", retry);
  }
  return box;
}
