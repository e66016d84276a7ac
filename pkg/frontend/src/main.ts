// Hash-routed single-page client. Route guards mirror server roles; the
// server remains the authority on every action.

import { ApiClient, type Session } from "./api.js";
import { clear, el } from "./dom.js";
import { STRINGS } from "./strings.js";
import { homeRoute, routeAllowed, type Route } from "./state.js";
import { dashboardView } from "./views/dashboard.js";
import { loginView } from "./views/login.js";
import { reviewView } from "./views/review.js";
import { translateView } from "./views/translate.js";

function apiBaseUrl(): string {
  const meta = document.querySelector<HTMLMetaElement>('meta[name="corpusforge-api"]');
  return meta?.content ?? "";
}

const client = new ApiClient(apiBaseUrl());
let session: Session | null = null;

const outlet = el("main", { class: "outlet" });
const nav = el("nav", { class: "topbar" });

function navButton(label: string, route: Route): HTMLElement {
  const button = el("button", { class: "nav" }, label);
  button.addEventListener("click", () => {
    window.location.hash = route;
  });
  return button;
}

function renderNav(): void {
  clear(nav);
  nav.append(el("span", { class: "brand" }, STRINGS.appName));
  if (!session) return;
  if (routeAllowed(session, "translate")) nav.append(navButton(STRINGS.navTranslate, "translate"));
  if (routeAllowed(session, "review")) nav.append(navButton(STRINGS.navReview, "review"));
  nav.append(navButton(STRINGS.navDashboard, "dashboard"));
  const who = el("span", { class: "who" }, `${session.user_id} (${session.role})`);
  const logout = el("button", { class: "nav" }, STRINGS.signOut);
  logout.addEventListener("click", () => {
    client.logout();
    session = null;
    window.location.hash = "login";
  });
  nav.append(who, logout);
}

async function renderRoute(): Promise<void> {
  const route = (window.location.hash.replace("#", "") || "login") as Route;
  renderNav();
  clear(outlet);
  if (!routeAllowed(session, route)) {
    if (session) {
      window.location.hash = homeRoute(session.role);
    } else if (route !== "login") {
      window.location.hash = "login";
    } else {
      outlet.append(loginView(client, (fresh) => {
        session = fresh;
        window.location.hash = homeRoute(fresh.role);
      }));
    }
    return;
  }
  if (route === "login") {
    outlet.append(loginView(client, (fresh) => {
      session = fresh;
      window.location.hash = homeRoute(fresh.role);
    }));
    return;
  }
  if (route === "translate") {
    const view = translateView(client);
    outlet.append(view.element);
    await view.refresh();
    return;
  }
  if (route === "review") {
    const view = reviewView(client);
    outlet.append(view.element);
    await view.refresh();
    return;
  }
  const view = dashboardView(client, session!.role);
  outlet.append(view.element);
  await view.refresh();
}

window.addEventListener("hashchange", () => void renderRoute());
document.body.append(nav, outlet);
void renderRoute();
