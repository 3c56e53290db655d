// Session state <-> URL query string. Everything the explorer shows is
// reconstructable from the address bar: reloading or sharing the URL lands on
// the same workspace, location, hypothetical additions, and slider position.

export interface SessionState {
  workspace: string;
  location: string;
  value: string;
  added: string[];
  eci: number;
}

export const DEFAULT_STATE: SessionState = {
  workspace: "demo",
  location: "",
  value: "pci",
  added: [],
  eci: 0,
};

export function serializeState(state: SessionState): string {
  const params = new URLSearchParams();
  if (state.workspace !== DEFAULT_STATE.workspace) params.set("ws", state.workspace);
  if (state.location !== DEFAULT_STATE.location) params.set("loc", state.location);
  if (state.value !== DEFAULT_STATE.value) params.set("value", state.value);
  if (state.added.length > 0) params.set("add", state.added.join(","));
  if (state.eci !== DEFAULT_STATE.eci) params.set("eci", String(state.eci));
  return params.toString();
}

export function parseState(search: string): SessionState {
  const params = new URLSearchParams(search);
  const added = params.get("add");
  const eci = Number(params.get("eci"));
  return {
    workspace: params.get("ws") ?? DEFAULT_STATE.workspace,
    location: params.get("loc") ?? DEFAULT_STATE.location,
    value: params.get("value") ?? DEFAULT_STATE.value,
    added: added ? added.split(",").filter((a) => a.length > 0) : [],
    eci: Number.isFinite(eci) ? eci : DEFAULT_STATE.eci,
  };
}

/** Reflect state into the address bar without adding history entries. */
export function pushStateToUrl(state: SessionState): void {
  const url = new URL(window.location.toString());
  url.search = serializeState(state);
  window.history.replaceState({}, "", url);
}

export function readStateFromUrl(): SessionState {
  return parseState(window.location.search);
}
