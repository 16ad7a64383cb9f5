/** The service's route table. The client refuses to issue a request to any
 * path not listed here, and the e2e suite checks this list against the
 * running server's schema. There is intentionally no update or delete route
 * for notebook content. */

export type RouteMethod = "GET" | "POST";

export interface Route {
  method: RouteMethod;
  path: string;
  auth: boolean;
}

export const ROUTES = {
  newaccount: { method: "POST", path: "/cynote/account/newaccount", auth: false },
  login: { method: "POST", path: "/cynote/account/login", auth: false },
  logout: { method: "POST", path: "/cynote/account/logout", auth: true },
  changepassword: { method: "POST", path: "/cynote/account/changepassword", auth: false },
  authorize: { method: "POST", path: "/cynote/account/authorize", auth: true },
  deauthorize: { method: "POST", path: "/cynote/account/deauthorize", auth: true },
  newNotebook: { method: "POST", path: "/cynote/cynote/new_notebook", auth: true },
  notebooks: { method: "GET", path: "/cynote/cynote/notebooks", auth: true },
  newEntry: { method: "POST", path: "/cynote/cynote/new_entry", auth: true },
  newComment: { method: "POST", path: "/cynote/cynote/new_comment", auth: true },
  listEntries: { method: "GET", path: "/cynote/cynote/list_entries", auth: true },
  entryThread: { method: "GET", path: "/cynote/cynote/entry", auth: true },
  toc: { method: "GET", path: "/cynote/cynote/toc", auth: true },
  notarize: { method: "POST", path: "/cynote/cynote/notarize", auth: true },
  archive: { method: "POST", path: "/cynote/cynote/archive", auth: true },
  unarchive: { method: "POST", path: "/cynote/cynote/unarchive", auth: true },
  generateSignatures: { method: "POST", path: "/cynote/cynote/generate_signatures", auth: true },
  verify: { method: "GET", path: "/cynote/cynote/verify", auth: true },
  results: { method: "GET", path: "/cynote/cynote/results", auth: true },
  primerAnalyze: { method: "POST", path: "/cynote/primer/analyze", auth: true },
  sequenceTransform: { method: "POST", path: "/cynote/sequence/transform", auth: true },
  sequenceProtein: { method: "POST", path: "/cynote/sequence/protein", auth: true },
  sequenceRestriction: { method: "POST", path: "/cynote/sequence/restriction", auth: true },
  sequenceBlast: { method: "POST", path: "/cynote/sequence/blast", auth: true },
  statsDescriptive: { method: "POST", path: "/cynote/statistics/descriptive", auth: true },
  statsRegression: { method: "POST", path: "/cynote/statistics/regression", auth: true },
  statsTable2x2: { method: "POST", path: "/cynote/statistics/table2x2", auth: true },
  statsTableRxC: { method: "POST", path: "/cynote/statistics/tablerxc", auth: true },
  backup: { method: "POST", path: "/cynote/savedatabase/backup", auth: true },
} as const satisfies Record<string, Route>;

export type RouteName = keyof typeof ROUTES;

export const FORBIDDEN_ROUTE_VERBS = ["update", "delete", "remove", "edit", "amend"];
