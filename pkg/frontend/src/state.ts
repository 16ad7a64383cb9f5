/** View state and the pure pieces of the flows.
 *
 * The pending analysis result is clipboard staging: "copy to entry" only
 * ever fills a draft that the user edits and submits themselves.
 */

import { AnalysisResult } from "./api.js";

export type Screen = "login" | "main";
export type Tab = "entries" | "notebooks" | "thread" | "results" | "analysis" | "admin";

export interface EntryDraft {
  title: string;
  description: string;
  keywords: string;
}

export interface ViewState {
  screen: Screen;
  tab: Tab;
  username: string | null;
  mustChangePassword: boolean;
  activeNotebookId: number | null;
  threadEntryId: number | null;
  pendingResult: AnalysisResult | null;
  entryDraft: EntryDraft;
  lastError: string | null;
}

export function initialState(): ViewState {
  return {
    screen: "login",
    tab: "entries",
    username: null,
    mustChangePassword: false,
    activeNotebookId: null,
    threadEntryId: null,
    pendingResult: null,
    entryDraft: { title: "", description: "", keywords: "" },
    lastError: null,
  };
}

/** Renders a stored result as the text block users paste into entries. */
export function resultAsText(result: AnalysisResult): string {
  return result.payload.map(([key, value]) => `${key}: ${value}`).join("\n");
}

/** Pre-fills the new-entry draft from a stored result. Never submits. */
export function prefillDraftFromResult(state: ViewState, result: AnalysisResult): void {
  state.pendingResult = result;
  state.entryDraft = {
    title: `${result.kind} analysis result #${result.id}`,
    description: resultAsText(result),
    keywords: result.kind,
  };
  state.tab = "entries";
}
