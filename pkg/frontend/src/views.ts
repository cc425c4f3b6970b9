/**
 * Pure HTML renderers: state in, markup out, no DOM access.
 *
 * Every item row carries data-item / data-value-json attributes holding the
 * exact payload value, so tests (and curious operators) can diff rendered
 * DOM values against intercepted gateway JSON. Absent values render as a
 * distinct marker, never as zero or empty text.
 */

import type { PageItem, RenderedPage } from "./api.js";
import type { AppState } from "./state.js";
import { isAdministrator } from "./state.js";

export const PERSONA_SUGGESTIONS = ["visitor", "manager", "admin"];

export const ABSENT_MARKER = "unavailable";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export function formatValue(item: PageItem): string {
  if (item.absent) return ABSENT_MARKER;
  const value = item.value;
  if (value === null || value === undefined) return ABSENT_MARKER;
  if (typeof value === "string") return value;
  if (typeof value === "number" || typeof value === "boolean") {
    return String(value);
  }
  return JSON.stringify(value);
}

export function renderLogin(state: AppState): string {
  const notice = state.loginNotice
    ? `<p class="notice" data-role="login-notice">${escapeHtml(state.loginNotice)}</p>`
    : "";
  const buttons = PERSONA_SUGGESTIONS.map(
    (name) =>
      `<button type="button" class="persona" data-action="login" ` +
      `data-persona="${escapeHtml(name)}">${escapeHtml(name)}</button>`,
  ).join("");
  return `
<section class="login" data-view="login">
  <h1>portalis</h1>
  <p>Choose a persona to open a data exchange session.</p>
  ${notice}
  <div class="persona-row">${buttons}</div>
  <form data-action="login-custom" class="login-form">
    <input name="persona" placeholder="persona name" autocomplete="off">
    <button type="submit">open session</button>
  </form>
</section>`;
}

export function renderHeader(state: AppState): string {
  const session = state.session;
  if (!session) return "";
  const dims = ["s", "p", "v", "e"]
    .filter((dim) => session.dims[dim] !== undefined)
    .map(
      (dim) =>
        `<span class="dim-badge" data-dim="${dim}">${dim}=` +
        `${escapeHtml(session.dims[dim])}</span>`,
    )
    .join("");
  return `
<header class="topbar" data-view="header">
  <span class="brand">portalis</span>
  <span class="who">
    <strong data-role="persona">${escapeHtml(session.persona)}</strong>
    <span class="rank rank-${escapeHtml(session.rank)}" data-role="rank">${escapeHtml(session.rank)}</span>
  </span>
  <span class="dims">${dims}</span>
  <button type="button" data-action="logout">close session</button>
</header>`;
}

export function renderNav(state: AppState): string {
  const links = state.pages
    .map((pageId) => {
      const active = pageId === state.activePage ? " active" : "";
      return (
        `<a href="#" class="page-link${active}" data-action="open-page" ` +
        `data-page="${escapeHtml(pageId)}">${escapeHtml(pageId)}</a>`
      );
    })
    .join("");
  return `<nav class="pages" data-view="nav">${links}</nav>`;
}

export function renderPage(render: RenderedPage | null): string {
  if (!render) {
    return `<section class="page-view" data-view="page-empty">
  <p>Select a page.</p>
</section>`;
  }
  const staleBadge = render.stale
    ? `<span class="stale-badge" data-role="stale">stale</span>`
    : "";
  const rows = Object.keys(render.items)
    .sort()
    .map((name) => {
      const item = render.items[name];
      const valueJson = escapeHtml(JSON.stringify(item.value ?? null));
      const cssClass = item.absent ? "value absent" : "value";
      return (
        `<tr data-item="${escapeHtml(name)}" data-value-json="${valueJson}" ` +
        `data-absent="${item.absent}">` +
        `<td class="item-name">${escapeHtml(name)}</td>` +
        `<td class="${cssClass}">${escapeHtml(formatValue(item))}</td>` +
        `<td class="asof">v${item.asOf}</td></tr>`
      );
    })
    .join("");
  const overlayEntries = Object.keys(render.overlay)
    .sort()
    .flatMap((objectId) =>
      Object.keys(render.overlay[objectId])
        .sort()
        .map((field) => {
          const value = render.overlay[objectId][field];
          return (
            `<li data-overlay="${escapeHtml(objectId)}.${escapeHtml(field)}">` +
            `${escapeHtml(objectId)}.${escapeHtml(field)} = ` +
            `${escapeHtml(JSON.stringify(value))}</li>`
          );
        }),
    )
    .join("");
  const overlayBlock = overlayEntries
    ? `<div class="overlay-box"><h3>session overlay</h3><ul>${overlayEntries}</ul></div>`
    : "";
  return `
<section class="page-view" data-view="page" data-page-id="${escapeHtml(render.page)}">
  <h2>${escapeHtml(render.page)} ${staleBadge}</h2>
  <table class="items"><tbody>${rows}</tbody></table>
  ${overlayBlock}
  <p class="freshness">refreshed at commit ${render.refreshedAt}</p>
</section>`;
}

export function renderControls(state: AppState): string {
  const eventControls = `
  <fieldset class="control-box" data-view="event-controls">
    <legend>events</legend>
    <form data-action="preference-event" class="inline-form">
      <label>theme
        <select name="theme">
          <option value="dark">dark</option>
          <option value="light">light</option>
          <option value="contrast">contrast</option>
        </select>
      </label>
      <button type="submit">preference-changed</button>
    </form>
    <button type="button" data-action="report-event">report-requested</button>
  </fieldset>`;
  const adminControls = isAdministrator(state)
    ? `
  <fieldset class="control-box admin" data-view="admin-controls">
    <legend>administration</legend>
    <form data-action="vacancy-update" class="inline-form">
      <label>record id <input name="recordId" value="vac_eng"></label>
      <label>open
        <select name="openVacancy">
          <option value="true">true</option>
          <option value="false">false</option>
        </select>
      </label>
      <button type="submit">content-critical update</button>
    </form>
    <form data-action="fetch-metadata" class="inline-form">
      <label>object id <input name="objectId" placeholder="vAnn"></label>
      <button type="submit">inspect metadata</button>
    </form>
  </fieldset>`
    : "";
  return eventControls + adminControls;
}

export function renderMetadata(state: AppState): string {
  if (!state.metadataOpen || !state.metadata) return "";
  const record = state.metadata;
  const listOrDash = (items: string[]) =>
    items.length ? items.map(escapeHtml).join(", ") : "&mdash;";
  const extras = Object.keys(record.extras)
    .sort()
    .map(
      (key) =>
        `<li>${escapeHtml(key)} = ${escapeHtml(record.extras[key])}</li>`,
    )
    .join("");
  return `
<aside class="metadata-panel" data-view="metadata" data-subject="${escapeHtml(record.subject)}">
  <h3>metadata: ${escapeHtml(record.subject)}</h3>
  <dl>
    <dt>dimensions</dt><dd data-role="dimensions">${listOrDash(record.dimensions)}</dd>
    <dt>integrity constraints</dt><dd data-role="constraints">${listOrDash(record.integrityConstraints)}</dd>
    <dt>access rights</dt><dd data-role="access">${escapeHtml(record.accessRights)}</dd>
  </dl>
  ${extras ? `<ul class="extras">${extras}</ul>` : ""}
  <button type="button" data-action="close-metadata">close</button>
</aside>`;
}

export function renderToast(state: AppState): string {
  if (!state.toast) return "";
  return `
<div class="toast" data-role="toast">
  <span>${escapeHtml(state.toast)}</span>
  <button type="button" data-action="dismiss-toast">dismiss</button>
</div>`;
}

export function renderApp(state: AppState): string {
  if (state.phase === "login") {
    return renderLogin(state) + renderToast(state);
  }
  return (
    renderHeader(state) +
    renderNav(state) +
    `<main class="content">` +
    renderPage(state.render) +
    renderControls(state) +
    renderMetadata(state) +
    `</main>` +
    renderToast(state)
  );
}
