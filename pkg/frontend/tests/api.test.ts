import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";

interface Recorded {
  url: string;
  method?: string;
  headers?: Record<string, string>;
  body?: unknown;
}

function stubFetch(status: number, payload: unknown, log: Recorded[]) {
  return (async (url: any, init?: any) => {
    log.push({ url: String(url), method: init?.method, headers: init?.headers, body: init?.body });
    return new Response(payload === null ? "" : JSON.stringify(payload), {
      status,
      headers: { "Content-Type": "application/json" },
    });
  }) as typeof fetch;
}

describe("ApiClient", () => {
  it("stores the token on login and sends it as a bearer header", async () => {
    const log: Recorded[] = [];
    const client = new ApiClient(
      "http://api",
      stubFetch(200, { token: "tok123", user_id: "t1", role: "translator", expires_at: 1 }, log)
    );
    await client.login("cred");
    expect(client.token).toBe("tok123");
    await client.tasks().catch(() => undefined);
    expect(log[1].headers).toMatchObject({ Authorization: "Bearer tok123" });
  });

  it("maps error bodies onto ApiError with code and status", async () => {
    const log: Recorded[] = [];
    const client = new ApiClient(
      "",
      stubFetch(409, { error: "lease_expired", message: "claim on sentence s1 expired" }, log)
    );
    client.token = "t";
    const err = await client.claim().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("lease_expired");
    expect(err.status).toBe(409);
    expect(err.message).toContain("expired"); // surfaced verbatim to views
  });

  it("returns null when no sentence is claimable", async () => {
    const client = new ApiClient("", stubFetch(200, { sentence: null }, []));
    client.token = "t";
    expect(await client.claim()).toBeNull();
  });

  it("sends JSON when no audio and multipart when audio is attached", async () => {
    const log: Recorded[] = [];
    const fetchFn = stubFetch(200, { id: "tr1", attempt_index: 1, audio_ref: null }, log);
    const client = new ApiClient("", fetchFn);
    client.token = "t";
    await client.submitTranslation("s1", "walo");
    expect(log[0].headers).toMatchObject({ "Content-Type": "application/json" });
    expect(JSON.parse(log[0].body as string)).toEqual({ hula_text: "walo" });

    await client.submitTranslation("s1", "walo", new Blob([new Uint8Array([1, 2, 3])]));
    expect(log[1].body).toBeInstanceOf(FormData);
    const form = log[1].body as FormData;
    expect(form.get("hula_text")).toBe("walo");
    expect(form.get("audio")).toBeTruthy();
    // no manual content-type: the runtime sets the multipart boundary
    expect((log[1].headers as any)["Content-Type"]).toBeUndefined();
  });

  it("escapes path segments", async () => {
    const log: Recorded[] = [];
    const client = new ApiClient("", stubFetch(200, {}, log));
    client.token = "t";
    await client.review("a/b c", "approve");
    expect(log[0].url).toBe("/translations/a%2Fb%20c/review");
  });
});
