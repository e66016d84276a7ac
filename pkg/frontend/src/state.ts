// View models and route guards. Thin-client rule: every displayed value
// is copied verbatim from an API payload.

import type { Balances, LeaderboardRow, Role, Session, StatsPayload } from "./api.js";

export type Route = "login" | "dashboard" | "translate" | "review";

export interface DashboardViewModel {
  corpus: StatsPayload["corpus"];
  progress: StatsPayload["progress"];
  participation: StatsPayload["participation"];
  sus: StatsPayload["sus"];
  leaderboard: LeaderboardRow[];
  poolToea: number | null; // only populated for admins
}

export function buildDashboardViewModel(
  stats: StatsPayload,
  leaderboard: LeaderboardRow[],
  balances: Balances | null
): DashboardViewModel {
  return {
    corpus: stats.corpus,
    progress: stats.progress,
    participation: stats.participation,
    sus: stats.sus,
    leaderboard,
    poolToea: balances ? balances.pool_minor : null,
  };
}

export function canSeeLedger(role: Role): boolean {
  return role === "admin";
}

export function allowedRoutes(role: Role): Route[] {
  switch (role) {
    case "translator":
      return ["dashboard", "translate"];
    case "reviewer":
      return ["dashboard", "review"];
    case "admin":
      return ["dashboard"];
  }
}

export function homeRoute(role: Role): Route {
  return role === "translator" ? "translate" : role === "reviewer" ? "review" : "dashboard";
}

export function routeAllowed(session: Session | null, route: Route): boolean {
  if (route === "login") return true;
  if (!session) return false;
  return allowedRoutes(session.role).includes(route);
}
