import { Evaluation } from "./api.js";

// Policy comparison: one bar per evaluated policy, height proportional to the
// expected completion time (longer bar = slower policy). Exact values live in
// data attributes; the visible label is rounded for reading.

export function renderBars(container: HTMLElement, runs: Evaluation[]): void {
  const max = Math.max(...runs.map((r) => r.expected_time), 1);
  const wrap = document.createElement("div");
  wrap.className = "bars";
  for (const run of runs) {
    const row = document.createElement("div");
    row.className = `bar-row bar-row--${run.policy}`;

    const name = document.createElement("span");
    name.className = "bar-policy";
    name.textContent = run.policy;

    const track = document.createElement("div");
    track.className = "bar-track";
    const bar = document.createElement("div");
    bar.className = "bar-fill";
    bar.dataset.value = String(run.expected_time);
    bar.dataset.plan = run.plan.join(",");
    bar.style.width = `${(run.expected_time / max) * 100}%`;
    track.append(bar);

    const label = document.createElement("span");
    label.className = "bar-label";
    label.textContent = `E = ${run.expected_time.toFixed(3)} steps`;

    const plan = document.createElement("span");
    plan.className = "bar-plan";
    plan.textContent = `plan: ${run.plan.join(" → ")}`;

    row.append(name, track, label, plan);
    wrap.append(row);
  }
  container.replaceChildren(wrap);
}
