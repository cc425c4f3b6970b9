/**
 * Controller: wires the gateway client, state transitions and renderers
 * onto a root element. All user actions funnel through delegated listeners;
 * views re-render in place (single page, no reloads).
 */

import { GatewayClient, GatewayError } from "./api.js";
import {
  AppState,
  initialState,
  isAdministrator,
  loggedIn,
  loggedOut,
  loginFailed,
  metadataClosed,
  metadataLoaded,
  pageOpened,
  pageRefreshed,
  sessionExpired,
  toastCleared,
  toastShown,
} from "./state.js";
import { renderApp } from "./views.js";

function freshKey(): string {
  return `ui-${Date.now()}-${Math.random().toString(36).slice(2, 10)}`;
}

export class PortalApp {
  state: AppState = initialState();

  constructor(
    private readonly root: HTMLElement,
    private readonly client: GatewayClient,
  ) {
    root.addEventListener("click", (event) => this.onClick(event));
    root.addEventListener("submit", (event) => this.onSubmit(event));
    this.paint();
  }

  paint(): void {
    this.root.innerHTML = renderApp(this.state);
  }

  private set(next: AppState): void {
    this.state = next;
    this.paint();
  }

  private fail(error: unknown): void {
    if (error instanceof GatewayError && error.sessionGone) {
      this.set(sessionExpired(error.code));
      return;
    }
    const message =
      error instanceof GatewayError ? error.describe() : String(error);
    this.set(toastShown(this.state, message));
  }

  // -- flows ------------------------------------------------------------

  async login(persona: string): Promise<void> {
    try {
      const session = await this.client.openSession(persona);
      const listing = await this.client.listPages(session.token);
      this.set(loggedIn(session, listing.pages));
      if (listing.pages.length > 0) {
        await this.openPage(listing.pages[0]);
      }
    } catch (error) {
      if (error instanceof GatewayError) {
        this.set(loginFailed(error.describe()));
      } else {
        this.set(loginFailed(`connection failed: ${error}`));
      }
    }
  }

  async logout(): Promise<void> {
    const token = this.state.session?.token;
    if (token) {
      try {
        await this.client.closeSession(token);
      } catch {
        // the session dies either way; nothing to surface
      }
    }
    this.set(loggedOut());
  }

  async openPage(pageId: string): Promise<void> {
    const token = this.state.session?.token;
    if (!token) return;
    try {
      const render = await this.client.getPage(token, pageId);
      this.set(pageOpened(this.state, pageId, render));
    } catch (error) {
      this.fail(error);
    }
  }

  async refreshActive(): Promise<void> {
    const token = this.state.session?.token;
    const pageId = this.state.activePage;
    if (!token || !pageId) return;
    try {
      const render = await this.client.getPage(token, pageId);
      this.set(pageRefreshed(this.state, render));
    } catch (error) {
      this.fail(error);
    }
  }

  /** Exactly one POST /event per invocation, then re-fetch the open view. */
  async triggerEvent(
    name: string,
    args: Record<string, unknown>,
  ): Promise<void> {
    const token = this.state.session?.token;
    if (!token) return;
    try {
      await this.client.submitEvent(token, name, args, freshKey());
    } catch (error) {
      this.fail(error);
      return;
    }
    await this.refreshActive();
  }

  async fetchMetadata(objectId: string): Promise<void> {
    const token = this.state.session?.token;
    if (!token || !objectId) return;
    try {
      const record = await this.client.getMetadata(token, objectId);
      this.set(metadataLoaded(this.state, record));
    } catch (error) {
      this.fail(error);
    }
  }

  async updateVacancy(recordId: string, open: boolean): Promise<void> {
    if (!isAdministrator(this.state)) return;
    try {
      await this.client.warehouseUpdate(
        "hrMain",
        { op: "update", id: recordId, values: { openVacancy: open } },
        true,
      );
    } catch (error) {
      this.fail(error);
      return;
    }
    await this.refreshActive();
  }

  // -- event delegation ---------------------------------------------------

  private onClick(event: Event): void {
    const target = (event.target as HTMLElement).closest<HTMLElement>(
      "[data-action]",
    );
    if (!target || target.tagName === "FORM") return;
    const action = target.dataset.action;
    if (action === "login") {
      event.preventDefault();
      void this.login(target.dataset.persona ?? "");
    } else if (action === "logout") {
      event.preventDefault();
      void this.logout();
    } else if (action === "open-page") {
      event.preventDefault();
      void this.openPage(target.dataset.page ?? "");
    } else if (action === "report-event") {
      event.preventDefault();
      void this.triggerEvent("report-requested", {});
    } else if (action === "close-metadata") {
      event.preventDefault();
      this.set(metadataClosed(this.state));
    } else if (action === "dismiss-toast") {
      event.preventDefault();
      this.set(toastCleared(this.state));
    }
  }

  private onSubmit(event: Event): void {
    const form = event.target as HTMLFormElement;
    const action = form.dataset.action;
    if (!action) return;
    event.preventDefault();
    const data = new FormData(form);
    if (action === "login-custom") {
      void this.login(String(data.get("persona") ?? "").trim());
    } else if (action === "preference-event") {
      void this.triggerEvent("preference-changed", {
        theme: String(data.get("theme") ?? "dark"),
      });
    } else if (action === "vacancy-update") {
      void this.updateVacancy(
        String(data.get("recordId") ?? "vac_eng"),
        String(data.get("openVacancy")) === "true",
      );
    } else if (action === "fetch-metadata") {
      void this.fetchMetadata(String(data.get("objectId") ?? "").trim());
    }
  }
}
