/** The single-page app: screens, flows, and rendering.
 *
 * Content on the server is append-only, and the interface mirrors that: no
 * control edits or deletes a notebook, entry, or comment. Lists re-fetch
 * from the server after every mutation instead of updating optimistically.
 */

import {
  AnalysisResult,
  ApiClient,
  ApiError,
  Entry,
  EntryThread,
  Notebook,
  TocRow,
  VerificationReport,
} from "./api.js";
import { initialState, prefillDraftFromResult, resultAsText, ViewState } from "./state.js";

type Child = Node | string | null | undefined;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [name, value] of Object.entries(attrs)) {
    node.setAttribute(name, value);
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child);
  }
  return node;
}

function labelled(text: string, control: HTMLElement, hint = ""): HTMLElement {
  const wrap = el("label", { class: "field" }, el("span", {}, text), control);
  if (hint) wrap.append(el("small", { class: "hint" }, hint));
  return wrap;
}

export class App {
  state: ViewState = initialState();
  notebooks: Notebook[] = [];
  entries: Entry[] = [];
  toc: TocRow[] = [];
  thread: EntryThread | null = null;
  results: AnalysisResult[] = [];
  verification: VerificationReport | null = null;
  lastBatchId: number | null = null;
  analysisOutput: string | null = null;
  statisticsOutput: string | null = null;
  notice: string | null = null;

  private chain: Promise<void> = Promise.resolve();

  constructor(private root: HTMLElement, private api: ApiClient) {
    this.render();
  }

  /** Awaited by tests: resolves when all in-flight actions settled. */
  idle(): Promise<void> {
    return this.chain;
  }

  private track(action: () => Promise<void>): void {
    this.chain = this.chain
      .then(async () => {
        this.state.lastError = null;
        try {
          await action();
        } catch (error) {
          if (error instanceof ApiError) {
            if (error.code === "password_expired") {
              this.state.mustChangePassword = true;
            }
            // machine code shown verbatim alongside the message
            this.state.lastError = `${error.code}: ${error.message}`;
            if (error.fields.length) {
              this.state.lastError += ` (fields: ${error.fields.join(", ")})`;
            }
          } else {
            this.state.lastError = String(error);
          }
        }
        this.render();
      });
  }

  private async refreshNotebooks(): Promise<void> {
    this.notebooks = await this.api.notebooks();
  }

  private async refreshEntries(): Promise<void> {
    this.entries = await this.api.listEntries(this.state.activeNotebookId ?? undefined);
    if (this.state.activeNotebookId !== null) {
      this.toc = await this.api.toc(this.state.activeNotebookId);
    } else {
      this.toc = [];
    }
  }

  private async refreshResults(): Promise<void> {
    this.results = await this.api.results();
  }

  private activeNotebook(): Notebook | null {
    if (this.state.activeNotebookId === null) return null;
    return this.notebooks.find((n) => n.id === this.state.activeNotebookId) ?? null;
  }

  // -- flows ----------------------------------------------------------

  logIn(username: string, password: string): void {
    this.track(async () => {
      await this.api.login(username, password);
      this.state.screen = "main";
      this.state.username = username;
      this.state.mustChangePassword = false;
      await this.refreshNotebooks();
      await this.refreshEntries();
    });
  }

  register(username: string, password: string): void {
    this.track(async () => {
      const account = await this.api.createAccount(username, password);
      this.notice = account.authorized
        ? `account ${account.username} created and authorized`
        : `account ${account.username} created; an authorized user must enable it`;
    });
  }

  changePassword(username: string, oldPassword: string, newPassword: string): void {
    this.track(async () => {
      await this.api.changePassword(username, oldPassword, newPassword);
      this.state.mustChangePassword = false;
      this.notice = "password changed; log in with the new password";
    });
  }

  logOut(): void {
    this.track(async () => {
      await this.api.logout();
      this.state = initialState();
      this.notebooks = [];
      this.entries = [];
      this.results = [];
      this.thread = null;
    });
  }

  createNotebook(title: string): void {
    this.track(async () => {
      const notebook = await this.api.newNotebook(title);
      this.state.activeNotebookId = notebook.id;
      await this.refreshNotebooks();
      await this.refreshEntries();
    });
  }

  selectNotebook(id: number | null): void {
    this.track(async () => {
      this.state.activeNotebookId = id;
      await this.refreshEntries();
    });
  }

  setArchived(id: number, archived: boolean): void {
    this.track(async () => {
      await this.api.setArchived(id, archived);
      await this.refreshNotebooks();
    });
  }

  submitEntry(file?: File): void {
    this.track(async () => {
      const notebookId = this.state.activeNotebookId;
      if (notebookId === null) {
        throw new ApiError(0, "no_notebook", "select or create a notebook first");
      }
      const draft = this.state.entryDraft;
      const keywords = draft.keywords
        .split(",")
        .map((k) => k.trim())
        .filter(Boolean);
      await this.api.newEntry({
        notebook_id: notebookId,
        title: draft.title,
        description: draft.description,
        keywords,
        file,
      });
      this.state.entryDraft = { title: "", description: "", keywords: "" };
      this.state.pendingResult = null;
      await this.refreshEntries();
    });
  }

  openThread(entryId: number): void {
    this.track(async () => {
      this.thread = await this.api.entryThread(entryId);
      this.verification = null;
      this.state.threadEntryId = entryId;
      this.state.tab = "thread";
    });
  }

  submitComment(text: string): void {
    this.track(async () => {
      if (this.state.threadEntryId === null) return;
      await this.api.newComment(this.state.threadEntryId, text);
      this.thread = await this.api.entryThread(this.state.threadEntryId);
    });
  }

  notarize(): void {
    this.track(async () => {
      if (this.state.threadEntryId === null) return;
      await this.api.notarize(this.state.threadEntryId);
      this.thread = await this.api.entryThread(this.state.threadEntryId);
    });
  }

  verifyCurrentEntry(): void {
    this.track(async () => {
      if (this.state.threadEntryId === null) return;
      this.verification = await this.api.verify("entry", this.state.threadEntryId);
    });
  }

  generateSignatures(): void {
    this.track(async () => {
      const batch = await this.api.generateSignatures();
      this.lastBatchId = batch.batch_id;
      this.notice = `signature batch ${batch.batch_id} generated`;
    });
  }

  openResults(): void {
    this.track(async () => {
      await this.refreshResults();
      this.state.tab = "results";
    });
  }

  copyResultToEntry(result: AnalysisResult): void {
    // pure staging: fills the draft form; the user edits and submits it
    prefillDraftFromResult(this.state, result);
    this.render();
  }

  runPrimerAnalysis(input: {
    left: string;
    right: string;
    monovalent: number;
    divalent: number;
    concentration: number;
  }): void {
    this.track(async () => {
      const stored = await this.api.analyzePrimers({
        left: input.left,
        right: input.right,
        monovalent_mM: input.monovalent,
        divalent_mM: input.divalent,
        primer_concentration_M: input.concentration,
      });
      this.analysisOutput = resultAsText(stored);
      await this.refreshResults();
    });
  }

  runSequenceTransform(operation: string, sequence: string): void {
    this.track(async () => {
      const stored = await this.api.sequenceTransform(operation, sequence);
      this.analysisOutput = resultAsText(stored);
      await this.refreshResults();
    });
  }

  runProteinAnalysis(sequence: string): void {
    this.track(async () => {
      const stored = await this.api.sequenceProtein(sequence);
      this.analysisOutput = resultAsText(stored);
      await this.refreshResults();
    });
  }

  runRestrictionMap(sequence: string): void {
    this.track(async () => {
      const stored = await this.api.sequenceRestriction(sequence);
      this.analysisOutput = resultAsText(stored);
      await this.refreshResults();
    });
  }

  runDescriptive(valuesText: string): void {
    this.track(async () => {
      const values = valuesText
        .split(/[\s,]+/)
        .filter(Boolean)
        .map(Number);
      const stats = await this.api.statsDescriptive(values);
      // statistics are never persisted server-side; shown with copy-as-text
      this.statisticsOutput = Object.entries(stats)
        .map(([key, value]) => `${key}: ${value}`)
        .join("\n");
    });
  }

  runTable2x2(a: number, b: number, c: number, d: number): void {
    this.track(async () => {
      const stats = await this.api.statsTable2x2(a, b, c, d);
      this.statisticsOutput = JSON.stringify(stats, null, 2);
    });
  }

  authorize(target: string, enabled: boolean): void {
    this.track(async () => {
      const user = enabled
        ? await this.api.authorize(target)
        : await this.api.deauthorize(target);
      this.notice = `${user.username} authorized=${user.authorized}`;
    });
  }

  runBackup(): void {
    this.track(async () => {
      const manifest = await this.api.backup();
      this.notice = `backed up as ${manifest.remote_dir}/${manifest.dump_name} (${manifest.attachment_names.length} attachment(s))`;
    });
  }

  // -- rendering --------------------------------------------------------

  render(): void {
    this.root.replaceChildren(
      this.state.screen === "login" ? this.renderLogin() : this.renderMain(),
    );
  }

  private renderBanner(): HTMLElement {
    const banner = el("div", { class: "banner" });
    if (this.state.lastError) {
      banner.append(el("p", { class: "error", "data-role": "error" }, this.state.lastError));
    }
    if (this.notice) {
      banner.append(el("p", { class: "notice", "data-role": "notice" }, this.notice));
      this.notice = null;
    }
    return banner;
  }

  private renderLogin(): HTMLElement {
    const username = el("input", { name: "username", autocomplete: "username" });
    const password = el("input", { name: "password", type: "password" });
    const form = el(
      "form",
      { "data-form": "login" },
      el("h1", {}, "Laboratory notebook"),
      labelled("Username", username),
      labelled("Password", password),
      el("button", { type: "submit", "data-action": "login" }, "Log in"),
      el("button", { type: "button", "data-action": "register" }, "Create account"),
    );
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.logIn(username.value, password.value);
    });
    form.querySelector('[data-action="register"]')!.addEventListener("click", () => {
      this.register(username.value, password.value);
    });

    const wrap = el("div", { class: "screen login" }, this.renderBanner(), form);
    if (this.state.mustChangePassword) {
      wrap.append(this.renderPasswordInterstitial(username.value));
    }
    return wrap;
  }

  private renderPasswordInterstitial(prefillUsername: string): HTMLElement {
    const username = el("input", { name: "username", value: prefillUsername });
    const oldPassword = el("input", { name: "old_password", type: "password" });
    const newPassword = el("input", { name: "new_password", type: "password" });
    const form = el(
      "form",
      { "data-form": "change-password", class: "interstitial" },
      el("h2", {}, "Password expired"),
      el("p", {}, "Your password has aged out. Set a new one to continue."),
      labelled("Username", username),
      labelled("Old password", oldPassword),
      labelled("New password", newPassword),
      el("button", { type: "submit", "data-action": "change-password" }, "Change password"),
    );
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.changePassword(username.value, oldPassword.value, newPassword.value);
    });
    return form;
  }

  private renderMain(): HTMLElement {
    const tabs: [string, ViewState["tab"]][] = [
      ["Entries", "entries"],
      ["Notebooks", "notebooks"],
      ["Entry thread", "thread"],
      ["Show all Results", "results"],
      ["Analysis", "analysis"],
      ["Admin", "admin"],
    ];
    const nav = el("nav", {});
    for (const [label, tab] of tabs) {
      const button = el(
        "button",
        { "data-tab": tab, class: this.state.tab === tab ? "active" : "" },
        label,
      );
      button.addEventListener("click", () => {
        if (tab === "results") {
          this.openResults();
        } else {
          this.state.tab = tab;
          this.render();
        }
      });
      nav.append(button);
    }
    const logout = el("button", { "data-action": "logout" }, `Log out (${this.state.username})`);
    logout.addEventListener("click", () => this.logOut());
    nav.append(logout);

    const body =
      this.state.tab === "entries"
        ? this.renderEntriesTab()
        : this.state.tab === "notebooks"
          ? this.renderNotebooksTab()
          : this.state.tab === "thread"
            ? this.renderThreadTab()
            : this.state.tab === "results"
              ? this.renderResultsTab()
              : this.state.tab === "analysis"
                ? this.renderAnalysisTab()
                : this.renderAdminTab();

    return el("div", { class: "screen main" }, nav, this.renderBanner(), body);
  }

  private renderNotebooksTab(): HTMLElement {
    const title = el("input", { name: "title" });
    const form = el(
      "form",
      { "data-form": "new-notebook" },
      labelled("Title", title, "required"),
      el("button", { type: "submit", "data-action": "create-notebook" }, "Create New Notebook"),
    );
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.createNotebook(title.value);
    });

    const list = el("ul", { class: "notebooks", "data-role": "notebook-list" });
    for (const notebook of this.notebooks) {
      const select = el("button", { "data-action": `select-notebook-${notebook.id}` }, "open");
      select.addEventListener("click", () => {
        this.selectNotebook(notebook.id);
        this.state.tab = "entries";
      });
      const toggle = el(
        "button",
        { "data-action": `${notebook.archived ? "unarchive" : "archive"}-notebook-${notebook.id}` },
        notebook.archived ? "Unarchive" : "Archive",
      );
      toggle.addEventListener("click", () => this.setArchived(notebook.id, !notebook.archived));
      list.append(
        el(
          "li",
          { "data-notebook": String(notebook.id) },
          el("strong", {}, `#${notebook.id} ${notebook.title}`),
          notebook.archived ? el("em", {}, " [archived]") : "",
          select,
          toggle,
        ),
      );
    }
    return el("section", {}, el("h2", {}, "Notebooks"), form, list);
  }

  private renderEntriesTab(): HTMLElement {
    const active = this.activeNotebook();
    const scope = active
      ? `Notebook #${active.id}: ${active.title}`
      : "All notebooks (reverse chronology)";

    const section = el("section", {}, el("h2", {}, "Entries"), el("p", {}, scope));

    // table of contents for the active notebook
    if (active) {
      const tocList = el("ol", { "data-role": "toc" });
      for (const row of this.toc) {
        tocList.append(el("li", {}, `${row.entry_id}: ${row.title} (${row.created_utc})`));
      }
      section.append(el("details", {}, el("summary", {}, "Table of Contents"), tocList));
    }

    section.append(this.renderEntryForm(active));

    const list = el("ul", { class: "entries", "data-role": "entry-list" });
    for (const entry of this.entries) {
      const open = el("button", { "data-action": `open-entry-${entry.id}` }, "open thread");
      open.addEventListener("click", () => this.openThread(entry.id));
      list.append(
        el(
          "li",
          { "data-entry": String(entry.id) },
          el("strong", {}, `#${entry.id} ${entry.title}`),
          el("span", {}, ` by ${entry.author} at ${entry.created_utc}`),
          entry.file ? el("span", {}, ` [file: ${entry.file.filename}]`) : "",
          el("p", {}, entry.description),
          open,
        ),
      );
    }
    section.append(list);
    return section;
  }

  private renderEntryForm(active: Notebook | null): HTMLElement {
    if (active?.archived) {
      return el(
        "p",
        { class: "archived-notice", "data-role": "archived-notice" },
        "This notebook is archived: no further entries or comments can be added. " +
          "Unarchive it from the Notebooks tab to continue.",
      );
    }
    const draft = this.state.entryDraft;
    const title = el("input", { name: "title", value: draft.title });
    const description = el("textarea", { name: "description" });
    description.value = draft.description;
    const keywords = el("input", { name: "keywords", value: draft.keywords });
    const file = el("input", { name: "file", type: "file" });
    const form = el(
      "form",
      { "data-form": "new-entry" },
      el("h3", {}, "Create New Entry"),
      this.state.pendingResult
        ? el(
            "p",
            { "data-role": "prefill-note" },
            `pre-filled from result #${this.state.pendingResult.id}; edit and submit`,
          )
        : "",
      labelled("Title", title, "required"),
      labelled("Description", description, "required"),
      labelled("Keywords", keywords, "comma-separated"),
      labelled("File", file),
      el("button", { type: "submit", "data-action": "create-entry" }, "Submit"),
    );
    title.addEventListener("input", () => (this.state.entryDraft.title = title.value));
    description.addEventListener(
      "input",
      () => (this.state.entryDraft.description = description.value),
    );
    keywords.addEventListener("input", () => (this.state.entryDraft.keywords = keywords.value));
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      this.state.entryDraft = {
        title: title.value,
        description: description.value,
        keywords: keywords.value,
      };
      this.submitEntry(file.files?.[0]);
    });
    return form;
  }

  private renderThreadTab(): HTMLElement {
    if (!this.thread) {
      return el("section", {}, el("p", {}, "Open an entry from the Entries tab."));
    }
    const { entry, comments, notarizations } = this.thread;
    const section = el(
      "section",
      { "data-role": "thread" },
      el("h2", {}, `#${entry.id} ${entry.title}`),
      el("p", {}, `by ${entry.author} at ${entry.created_utc}`),
      el("p", {}, entry.description),
    );

    const commentList = el("ul", { "data-role": "comment-list" });
    for (const comment of comments) {
      commentList.append(
        el(
          "li",
          { "data-comment": String(comment.id) },
          el("strong", {}, comment.author),
          ` at ${comment.created_utc}: ${comment.text}`,
        ),
      );
    }
    section.append(el("h3", {}, `Comments (${comments.length})`), commentList);

    const text = el("textarea", { name: "text" });
    const commentForm = el(
      "form",
      { "data-form": "new-comment" },
      labelled("Comment", text, "required"),
      el("button", { type: "submit", "data-action": "create-comment" }, "Append comment"),
    );
    commentForm.addEventListener("submit", (event) => {
      event.preventDefault();
      this.submitComment(text.value);
    });
    section.append(commentForm);

    const notarizationList = el("ul", { "data-role": "notarization-list" });
    for (const notarization of notarizations) {
      notarizationList.append(
        el("li", {}, `notarized by ${notarization.notary} at ${notarization.created_utc}`),
      );
    }
    const notarizeButton = el("button", { "data-action": "notarize" }, "Notarize this entry");
    notarizeButton.addEventListener("click", () => this.notarize());
    section.append(
      el("h3", {}, `Notarizations (${notarizations.length})`),
      notarizationList,
      notarizeButton,
    );

    const verifyButton = el("button", { "data-action": "verify" }, "Verify signatures");
    verifyButton.addEventListener("click", () => this.verifyCurrentEntry());
    section.append(el("h3", {}, "Integrity"), verifyButton);
    if (this.verification) {
      const report = this.verification;
      const detail = Object.entries(report.details)
        .map(([algorithm, matched]) => `${algorithm}=${matched ? "ok" : "MISMATCH"}`)
        .join(" ");
      section.append(
        el(
          "p",
          { "data-role": "verification", class: `verify-${report.status}` },
          `status: ${report.status}` +
            (report.first_divergent_batch !== null
              ? ` (first divergent batch ${report.first_divergent_batch})`
              : "") +
            ` — ${detail}`,
        ),
      );
    }
    return section;
  }

  private renderResultsTab(): HTMLElement {
    const section = el("section", {}, el("h2", {}, "Show all Results"));
    const list = el("ul", { "data-role": "result-list" });
    for (const result of this.results) {
      const copy = el(
        "button",
        { "data-action": `copy-result-${result.id}` },
        "copy to entry",
      );
      copy.addEventListener("click", () => this.copyResultToEntry(result));
      list.append(
        el(
          "li",
          { "data-result": String(result.id) },
          el("strong", {}, `#${result.id} ${result.kind}`),
          el("pre", {}, resultAsText(result)),
          copy,
        ),
      );
    }
    if (!this.results.length) {
      list.append(el("li", {}, "no stored results yet"));
    }
    section.append(list);
    return section;
  }

  private renderAnalysisTab(): HTMLElement {
    const section = el("section", {}, el("h2", {}, "Analysis"));

    // primer pair
    const left = el("input", { name: "left" });
    const right = el("input", { name: "right" });
    const monovalent = el("input", { name: "monovalent", value: "50" });
    const divalent = el("input", { name: "divalent", value: "2.5" });
    const concentration = el("input", { name: "concentration", value: "4e-6" });
    const primerForm = el(
      "form",
      { "data-form": "primer" },
      el("h3", {}, "Primer annealing temperature"),
      labelled("Left primer", left),
      labelled("Right primer", right),
      labelled("Monovalent ions (mM)", monovalent),
      labelled("Divalent ions (mM)", divalent),
      labelled("Primer concentration (M)", concentration),
      el("button", { type: "submit", "data-action": "analyze-primers" }, "Analyze"),
    );
    primerForm.addEventListener("submit", (event) => {
      event.preventDefault();
      this.runPrimerAnalysis({
        left: left.value,
        right: right.value,
        monovalent: Number(monovalent.value),
        divalent: Number(divalent.value),
        concentration: Number(concentration.value),
      });
    });
    section.append(primerForm);

    // sequence toolbox
    const operation = el("select", { name: "operation" });
    for (const name of [
      "complement",
      "reverse_complement",
      "transcribe",
      "back_transcribe",
      "translate",
      "back_translate",
    ]) {
      operation.append(el("option", { value: name }, name));
    }
    const sequence = el("input", { name: "sequence" });
    const transformForm = el(
      "form",
      { "data-form": "sequence-transform" },
      el("h3", {}, "Sequence transform"),
      labelled("Operation", operation),
      labelled("Sequence", sequence),
      el("button", { type: "submit", "data-action": "transform" }, "Run"),
    );
    transformForm.addEventListener("submit", (event) => {
      event.preventDefault();
      this.runSequenceTransform(operation.value, sequence.value);
    });
    section.append(transformForm);

    const proteinSequence = el("input", { name: "protein" });
    const proteinForm = el(
      "form",
      { "data-form": "protein" },
      el("h3", {}, "Protein properties"),
      labelled("Amino acid sequence", proteinSequence),
      el("button", { type: "submit", "data-action": "analyze-protein" }, "Analyze"),
    );
    proteinForm.addEventListener("submit", (event) => {
      event.preventDefault();
      this.runProteinAnalysis(proteinSequence.value);
    });
    section.append(proteinForm);

    const restrictionSequence = el("input", { name: "dna" });
    const restrictionForm = el(
      "form",
      { "data-form": "restriction" },
      el("h3", {}, "Restriction map"),
      labelled("DNA sequence", restrictionSequence),
      el("button", { type: "submit", "data-action": "map-restriction" }, "Map sites"),
    );
    restrictionForm.addEventListener("submit", (event) => {
      event.preventDefault();
      this.runRestrictionMap(restrictionSequence.value);
    });
    section.append(restrictionForm);

    if (this.analysisOutput) {
      section.append(
        el("h3", {}, "Latest analysis (also saved under Show all Results)"),
        el("pre", { "data-role": "analysis-output" }, this.analysisOutput),
      );
    }

    // statistics: returned only, never stored server-side
    const values = el("input", { name: "values" });
    const descriptiveForm = el(
      "form",
      { "data-form": "descriptive" },
      el("h3", {}, "Descriptive statistics"),
      labelled("Sample values", values, "comma or space separated"),
      el("button", { type: "submit", "data-action": "describe" }, "Compute"),
    );
    descriptiveForm.addEventListener("submit", (event) => {
      event.preventDefault();
      this.runDescriptive(values.value);
    });
    section.append(descriptiveForm);

    const cells = ["a", "b", "c", "d"].map((name) => el("input", { name, size: "4" }));
    const tableForm = el(
      "form",
      { "data-form": "table2x2" },
      el("h3", {}, "2x2 contingency table"),
      labelled("a (row1,col1)", cells[0]),
      labelled("b (row1,col2)", cells[1]),
      labelled("c (row2,col1)", cells[2]),
      labelled("d (row2,col2)", cells[3]),
      el("button", { type: "submit", "data-action": "table2x2" }, "Compute"),
    );
    tableForm.addEventListener("submit", (event) => {
      event.preventDefault();
      const [a, b, c, d] = cells.map((cell) => Number(cell.value));
      this.runTable2x2(a, b, c, d);
    });
    section.append(tableForm);

    if (this.statisticsOutput) {
      const copyButton = el("button", { "data-action": "copy-stats-text" }, "copy as text");
      copyButton.addEventListener("click", () => {
        void navigator.clipboard?.writeText(this.statisticsOutput ?? "");
      });
      section.append(
        el("h3", {}, "Statistics output (not stored server-side)"),
        el("pre", { "data-role": "statistics-output" }, this.statisticsOutput),
        copyButton,
      );
    }
    return section;
  }

  private renderAdminTab(): HTMLElement {
    const target = el("input", { name: "target" });
    const authorizeButton = el("button", { "data-action": "authorize" }, "Authorize");
    const deauthorizeButton = el("button", { "data-action": "deauthorize" }, "De-authorize");
    authorizeButton.addEventListener("click", () => this.authorize(target.value, true));
    deauthorizeButton.addEventListener("click", () => this.authorize(target.value, false));

    const signaturesButton = el(
      "button",
      { "data-action": "generate-signatures" },
      "Generate Digital Signature (all entries and comments)",
    );
    signaturesButton.addEventListener("click", () => this.generateSignatures());

    const backupButton = el("button", { "data-action": "backup" }, "Back up database");
    backupButton.addEventListener("click", () => this.runBackup());

    return el(
      "section",
      {},
      el("h2", {}, "Administration"),
      el("h3", {}, "User authorization"),
      labelled("Username", target),
      el("div", {}, authorizeButton, deauthorizeButton),
      el("h3", {}, "Integrity"),
      signaturesButton,
      this.lastBatchId !== null
        ? el("p", { "data-role": "batch" }, `last batch: ${this.lastBatchId}`)
        : "",
      el("h3", {}, "Backup"),
      backupButton,
    );
  }
}
