import { Portfolio } from "./api.js";

// Two-bucket budget view at the slider's score position. Shares come straight
// from the service response; the segments just scale them to percent widths.

export function renderPortfolio(container: HTMLElement, split: Portfolio): void {
  const bar = document.createElement("div");
  bar.className = "portfolio-bar";

  const related = document.createElement("div");
  related.className = "portfolio-segment portfolio-segment--related";
  related.dataset.share = String(split.related_share);
  related.style.width = `${split.related_share * 100}%`;
  related.textContent = `related ${(split.related_share * 100).toFixed(1)}%`;

  const unrelated = document.createElement("div");
  unrelated.className = "portfolio-segment portfolio-segment--unrelated";
  unrelated.dataset.share = String(split.unrelated_share);
  unrelated.style.width = `${split.unrelated_share * 100}%`;
  unrelated.textContent = `unrelated ${(split.unrelated_share * 100).toFixed(1)}%`;

  bar.append(related, unrelated);

  const caption = document.createElement("p");
  caption.className = "portfolio-caption";
  caption.dataset.eci = String(split.eci);
  caption.textContent =
    `score position ${split.eci.toFixed(2)} — unrelated bets peak at ` +
    `${split.schedule.peak.toFixed(2)} (cap ${(split.schedule.max_unrelated * 100).toFixed(0)}%)`;

  container.replaceChildren(bar, caption);
}
