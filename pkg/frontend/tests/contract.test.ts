import { describe, expect, it } from "vitest";

import { FORBIDDEN_ROUTE_VERBS, ROUTES } from "../src/routes.js";

describe("route table contract", () => {
  it("uses only the application/controller/function scheme", () => {
    for (const route of Object.values(ROUTES)) {
      expect(route.path).toMatch(/^\/cynote\/(account|cynote|primer|sequence|statistics|savedatabase)\/[a-z0-9_]+$/);
    }
  });

  it("contains no content update or delete routes", () => {
    for (const route of Object.values(ROUTES)) {
      expect(["GET", "POST"]).toContain(route.method);
      for (const verb of FORBIDDEN_ROUTE_VERBS) {
        expect(route.path).not.toContain(verb);
      }
    }
  });

  it("requires auth everywhere except account bootstrap routes", () => {
    const publicRoutes = Object.entries(ROUTES)
      .filter(([, route]) => !route.auth)
      .map(([name]) => name)
      .sort();
    expect(publicRoutes).toEqual(["changepassword", "login", "newaccount"]);
  });

  it("has no duplicate paths", () => {
    const paths = Object.values(ROUTES).map((route) => route.path);
    expect(new Set(paths).size).toBe(paths.length);
  });
});
