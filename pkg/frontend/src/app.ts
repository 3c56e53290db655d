import { ApiClient, ApiError, Diagram, Instance } from "./api.js";
import { renderBars } from "./bars.js";
import { renderPortfolio } from "./portfolio.js";
import { renderScatter } from "./scatter.js";
import { pushStateToUrl, readStateFromUrl, SessionState } from "./state.js";

// Demo instance for the policy panel: a seven-spoke wheel with one lit spoke —
// the smallest ring size where the myopic policy is strictly slower than the
// plan that grabs the hub early.
export const WHEEL7: Instance = {
  nodes: ["hub", "s1", "s2", "s3", "s4", "s5", "s6", "s7"],
  edges: [
    ["hub", "s1"], ["hub", "s2"], ["hub", "s3"], ["hub", "s4"],
    ["hub", "s5"], ["hub", "s6"], ["hub", "s7"],
    ["s1", "s2"], ["s2", "s3"], ["s3", "s4"], ["s4", "s5"],
    ["s5", "s6"], ["s6", "s7"], ["s7", "s1"],
  ],
  active: ["s1"],
};

const PANEL_HTML = `
  <header class="topbar">
    <h1>ecp explorer</h1>
    <label>workspace <input id="ws-input" size="10"></label>
    <label>location <input id="loc-input" size="8"></label>
    <label>value
      <select id="value-select">
        <option value="pci">pci</option>
        <option value="pgi">pgi</option>
        <option value="pei">pei</option>
      </select>
    </label>
    <button id="load-btn">load</button>
    <span id="status" class="status" role="status"></span>
  </header>
  <main>
    <section class="panel" id="frontier-panel">
      <h2>Diversification frontier</h2>
      <div id="scatter"></div>
      <fieldset id="whatif-box">
        <legend>what if we also did&hellip;</legend>
        <div id="whatif-toggles"></div>
      </fieldset>
    </section>
    <section class="panel" id="portfolio-panel">
      <h2>Portfolio split</h2>
      <label>score position
        <input id="eci-slider" type="range" min="-2.5" max="2.5" step="0.1">
      </label>
      <div id="portfolio"></div>
    </section>
    <section class="panel" id="strategy-panel">
      <h2>Policies on the 7-spoke wheel</h2>
      <div id="bars"></div>
    </section>
  </main>
`;

export class ExplorerApp {
  private state: SessionState;
  private baseline: Diagram | null = null;
  private whatifInflight = false;
  private whatifDirty = false;

  private readonly scatterEl: HTMLElement;
  private readonly togglesEl: HTMLElement;
  private readonly portfolioEl: HTMLElement;
  private readonly barsEl: HTMLElement;
  private readonly statusEl: HTMLElement;
  private readonly slider: HTMLInputElement;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    initial: SessionState,
    private readonly reflectUrl = true,
  ) {
    this.state = { ...initial, added: [...initial.added] };
    root.innerHTML = PANEL_HTML;
    const pick = <T extends HTMLElement>(sel: string): T => {
      const el = root.querySelector<T>(sel);
      if (!el) throw new Error(`missing element: ${sel}`);
      return el;
    };
    this.scatterEl = pick("#scatter");
    this.togglesEl = pick("#whatif-toggles");
    this.portfolioEl = pick("#portfolio");
    this.barsEl = pick("#bars");
    this.statusEl = pick("#status");
    this.slider = pick<HTMLInputElement>("#eci-slider");

    pick<HTMLInputElement>("#ws-input").value = this.state.workspace;
    pick<HTMLInputElement>("#loc-input").value = this.state.location;
    pick<HTMLSelectElement>("#value-select").value = this.state.value;
    this.slider.value = String(this.state.eci);

    pick<HTMLButtonElement>("#load-btn").addEventListener("click", () => {
      this.state.workspace = pick<HTMLInputElement>("#ws-input").value.trim();
      this.state.location = pick<HTMLInputElement>("#loc-input").value.trim();
      this.state.value = pick<HTMLSelectElement>("#value-select").value;
      this.state.added = [];
      this.sync();
      void this.loadFrontier();
    });
    this.slider.addEventListener("input", () => {
      this.state.eci = Number(this.slider.value);
      this.sync();
      void this.loadPortfolio();
    });
  }

  private sync(): void {
    if (this.reflectUrl) pushStateToUrl(this.state);
  }

  private setStatus(text: string): void {
    this.statusEl.textContent = text;
  }

  private report(err: unknown): void {
    if (err instanceof ApiError) {
      this.setStatus(`${err.code}: ${err.message}`);
    } else {
      this.setStatus(String(err));
    }
  }

  async init(): Promise<void> {
    await Promise.all([this.loadFrontier(), this.loadPortfolio(), this.loadBars()]);
  }

  async loadFrontier(): Promise<void> {
    if (!this.state.location) {
      this.setStatus("pick a location");
      return;
    }
    try {
      this.baseline = await this.api.frontier(
        this.state.workspace, this.state.location, this.state.value);
      this.setStatus("");
    } catch (err) {
      this.report(err);
      return;
    }
    this.renderToggles();
    if (this.state.added.length > 0) {
      await this.syncWhatif();
    } else {
      renderScatter(this.scatterEl, this.baseline, null);
    }
  }

  /** One checkbox per activity the location does not already do. */
  private renderToggles(): void {
    if (!this.baseline) return;
    this.togglesEl.replaceChildren();
    for (const p of this.baseline.points) {
      if (p.specialized) continue;
      const label = document.createElement("label");
      label.className = "whatif-toggle";
      const box = document.createElement("input");
      box.type = "checkbox";
      box.value = p.activity;
      box.checked = this.state.added.includes(p.activity);
      box.addEventListener("change", () => this.toggle(p.activity, box.checked));
      label.append(box, document.createTextNode(p.activity));
      this.togglesEl.append(label);
    }
  }

  toggle(activity: string, on: boolean): void {
    const set = new Set(this.state.added);
    if (on) {
      set.add(activity);
    } else {
      set.delete(activity);
    }
    this.state.added = [...set].sort();
    this.sync();
    void this.syncWhatif();
  }

  /**
   * Keep the scatter in step with the toggled set, at most one request in
   * flight. Toggling while a request is pending marks the state dirty; the
   * response for a stale set is dropped and one follow-up request is sent for
   * wherever the toggles ended up. An empty set never needs the network: the
   * baseline diagram is cached, so untoggling everything restores the
   * original view exactly.
   */
  private async syncWhatif(): Promise<void> {
    if (!this.baseline) return;
    if (this.whatifInflight) {
      this.whatifDirty = true;
      return;
    }
    if (this.state.added.length === 0) {
      renderScatter(this.scatterEl, this.baseline, null);
      return;
    }
    this.whatifInflight = true;
    const requested = this.state.added.join(",");
    try {
      const res = await this.api.whatif(
        this.state.workspace, this.state.location,
        [...this.state.added], this.state.value);
      if (!this.whatifDirty && requested === this.state.added.join(",")) {
        renderScatter(this.scatterEl, this.baseline, res);
      }
    } catch (err) {
      this.report(err);
    } finally {
      this.whatifInflight = false;
      if (this.whatifDirty) {
        this.whatifDirty = false;
        void this.syncWhatif();
      }
    }
  }

  async loadPortfolio(): Promise<void> {
    try {
      const split = await this.api.portfolio(this.state.workspace, this.state.eci);
      renderPortfolio(this.portfolioEl, split);
    } catch (err) {
      this.report(err);
    }
  }

  async loadBars(): Promise<void> {
    try {
      const [greedy, optimal] = await Promise.all([
        this.api.simulate(this.state.workspace, WHEEL7, "greedy"),
        this.api.simulate(this.state.workspace, WHEEL7, "optimal"),
      ]);
      renderBars(this.barsEl, [greedy, optimal]);
    } catch (err) {
      this.report(err);
    }
  }
}

export function boot(): void {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const app = new ExplorerApp(root, new ApiClient(), readStateFromUrl());
  void app.init();
}
