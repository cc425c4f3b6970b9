/**
 * Application state and its pure transitions.
 *
 * The state mirrors gateway responses and holds no authority of its own:
 * pages, renders and metadata live here exactly as the server sent them.
 */

import type { MetadataRecord, RenderedPage, SessionInfo } from "./api.js";

export type Phase = "login" | "portal";

export interface AppState {
  phase: Phase;
  loginNotice: string | null;
  toast: string | null;
  connecting: boolean;
  session: SessionInfo | null;
  pages: string[];
  activePage: string | null;
  render: RenderedPage | null;
  metadata: MetadataRecord | null;
  metadataOpen: boolean;
}

export function initialState(): AppState {
  return {
    phase: "login",
    loginNotice: null,
    toast: null,
    connecting: false,
    session: null,
    pages: [],
    activePage: null,
    render: null,
    metadata: null,
    metadataOpen: false,
  };
}

export function loggedIn(
  session: SessionInfo,
  pages: string[],
): AppState {
  return {
    ...initialState(),
    phase: "portal",
    session,
    pages: [...pages],
  };
}

export function pageOpened(
  state: AppState,
  pageId: string,
  render: RenderedPage,
): AppState {
  return { ...state, activePage: pageId, render, toast: null };
}

export function pageRefreshed(state: AppState, render: RenderedPage): AppState {
  return { ...state, render };
}

export function sessionExpired(reason: string): AppState {
  return {
    ...initialState(),
    loginNotice: `Session ended (${reason}). Log in again.`,
  };
}

export function loginFailed(message: string): AppState {
  return { ...initialState(), loginNotice: message };
}

export function toastShown(state: AppState, message: string): AppState {
  return { ...state, toast: message };
}

export function toastCleared(state: AppState): AppState {
  return { ...state, toast: null };
}

export function metadataLoaded(
  state: AppState,
  record: MetadataRecord,
): AppState {
  return { ...state, metadata: record, metadataOpen: true, toast: null };
}

export function metadataClosed(state: AppState): AppState {
  return { ...state, metadata: null, metadataOpen: false };
}

export function loggedOut(): AppState {
  return { ...initialState(), loginNotice: "Logged out." };
}

export function isAdministrator(state: AppState): boolean {
  return state.session?.rank === "administrator";
}
