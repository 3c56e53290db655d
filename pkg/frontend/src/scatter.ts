import { Diagram, WhatIf } from "./api.js";
import { QUADRANT_COLORS, QUADRANT_ORDER, quadrantLabel } from "./names.js";

const SVG_NS = "http://www.w3.org/2000/svg";

const W = 480;
const H = 360;
const MARGIN = { top: 12, right: 16, bottom: 34, left: 46 };

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) {
    node.setAttribute(k, v);
  }
  return node;
}

function linear(d0: number, d1: number, r0: number, r1: number) {
  const span = d1 - d0 || 1;
  return (v: number) => r0 + ((v - d0) / span) * (r1 - r0);
}

const fmt = (v: number) => v.toFixed(3);

/**
 * Relatedness-vs-value scatter for one location.
 *
 * Every displayed number is a response field; this module only maps values to
 * pixels. When a what-if response is supplied, its re-drawn diagram replaces
 * the baseline and each nonzero density delta becomes an arrow from the old
 * position to the new one.
 */
export function renderScatter(
  container: HTMLElement,
  diagram: Diagram,
  whatif: WhatIf | null = null,
): void {
  const shown = whatif ? whatif.diagram : diagram;
  const values = shown.points.map((p) => p.value);
  const lo = Math.min(...values, shown.thresholds.value);
  const hi = Math.max(...values, shown.thresholds.value);
  const pad = (hi - lo || 1) * 0.15;
  const x = linear(0, 1, MARGIN.left, W - MARGIN.right);
  const y = linear(lo - pad, hi + pad, H - MARGIN.bottom, MARGIN.top);

  const svg = svgEl("svg", {
    viewBox: `0 0 ${W} ${H}`,
    class: "scatter",
    role: "img",
  });

  // quadrant shading; skipped when every activity is specialized and the
  // service reports no density threshold
  const omThr = shown.thresholds.omega;
  if (omThr !== null) {
    const xSplit = x(omThr);
    const ySplit = y(shown.thresholds.value);
    const top = shown.orientation === "higher";
    const zones: [string, number, number, number, number][] = [
      ["let_it_be", xSplit, top ? MARGIN.top : ySplit, W - MARGIN.right, top ? ySplit : H - MARGIN.bottom],
      ["wish_you_were_here", MARGIN.left, top ? MARGIN.top : ySplit, xSplit, top ? ySplit : H - MARGIN.bottom],
      ["long_road_ahead", xSplit, top ? ySplit : MARGIN.top, W - MARGIN.right, top ? H - MARGIN.bottom : ySplit],
      ["stuck_in_the_mud", MARGIN.left, top ? ySplit : MARGIN.top, xSplit, top ? H - MARGIN.bottom : ySplit],
    ];
    for (const [id, x0, y0, x1, y1] of zones) {
      svg.append(
        svgEl("rect", {
          class: `zone zone--${id}`,
          x: String(Math.min(x0, x1)),
          y: String(Math.min(y0, y1)),
          width: String(Math.abs(x1 - x0)),
          height: String(Math.abs(y1 - y0)),
          fill: QUADRANT_COLORS[id as keyof typeof QUADRANT_COLORS],
        }),
      );
    }
  }

  // axes
  svg.append(
    svgEl("line", {
      class: "axis",
      x1: String(MARGIN.left), y1: String(H - MARGIN.bottom),
      x2: String(W - MARGIN.right), y2: String(H - MARGIN.bottom),
    }),
    svgEl("line", {
      class: "axis",
      x1: String(MARGIN.left), y1: String(MARGIN.top),
      x2: String(MARGIN.left), y2: String(H - MARGIN.bottom),
    }),
  );
  const xLabel = svgEl("text", {
    class: "axis-label",
    x: String((MARGIN.left + W - MARGIN.right) / 2),
    y: String(H - 8),
    "text-anchor": "middle",
  });
  xLabel.textContent = "relatedness density ω";
  const yLabel = svgEl("text", {
    class: "axis-label",
    x: "12",
    y: String((MARGIN.top + H - MARGIN.bottom) / 2),
    transform: `rotate(-90 12 ${(MARGIN.top + H - MARGIN.bottom) / 2})`,
    "text-anchor": "middle",
  });
  yLabel.textContent = `value (${shown.value_kind}, ${shown.orientation} is better)`;
  svg.append(xLabel, yLabel);

  // what-if arrows under the points: old density -> new density
  if (whatif) {
    const byActivity = new Map(shown.points.map((p) => [p.activity, p]));
    for (const d of whatif.deltas) {
      if (d.delta === 0) continue;
      const point = byActivity.get(d.activity);
      if (!point) continue;
      const yPos = y(point.value);
      const arrow = svgEl("line", {
        class: "delta-arrow",
        x1: fmt(x(d.before)), y1: fmt(yPos),
        x2: fmt(x(d.after)), y2: fmt(yPos),
        "data-activity": d.activity,
        "data-before": String(d.before),
        "data-after": String(d.after),
        "data-delta": String(d.delta),
        "marker-end": "url(#arrowhead)",
      });
      svg.append(arrow);
    }
    const defs = svgEl("defs");
    const marker = svgEl("marker", {
      id: "arrowhead", viewBox: "0 0 8 8", refX: "7", refY: "4",
      markerWidth: "7", markerHeight: "7", orient: "auto",
    });
    marker.append(svgEl("path", { d: "M0,0 L8,4 L0,8 z", class: "arrowhead" }));
    defs.append(marker);
    svg.append(defs);
  }

  for (const p of shown.points) {
    const classes = ["point"];
    classes.push(p.specialized ? "point--specialized" : `quadrant--${p.quadrant}`);
    if (p.on_frontier) classes.push("point--frontier");
    const dot = svgEl("circle", {
      class: classes.join(" "),
      cx: fmt(x(p.omega)),
      cy: fmt(y(p.value)),
      r: "6",
      "data-activity": p.activity,
      "data-omega": String(p.omega),
      "data-value": String(p.value),
      "data-quadrant": p.quadrant ?? "",
    });
    const tip = svgEl("title");
    tip.textContent = `${p.activity} — ${quadrantLabel(p.quadrant)} `
      + `(ω ${fmt(p.omega)}, value ${fmt(p.value)})`;
    dot.append(tip);
    svg.append(dot);
  }

  const caption = document.createElement("p");
  caption.className = "scatter-caption";
  const corr = shown.summary.corr;
  caption.dataset.corr = corr === null ? "" : String(corr);
  caption.textContent = corr === null
    ? "density/value correlation: undefined"
    : `density/value correlation: ${fmt(corr)}`;

  const legend = document.createElement("ul");
  legend.className = "legend";
  for (const id of QUADRANT_ORDER) {
    const item = document.createElement("li");
    item.className = `legend-item legend--${id}`;
    const count = shown.summary.counts[id] ?? 0;
    item.dataset.count = String(count);
    item.textContent = `${quadrantLabel(id)} (${count})`;
    legend.append(item);
  }

  container.replaceChildren(svg, caption, legend);

  if (whatif) {
    const list = document.createElement("ul");
    list.className = "delta-list";
    for (const d of whatif.deltas) {
      if (d.delta === 0) continue;
      const row = document.createElement("li");
      row.dataset.activity = d.activity;
      row.dataset.delta = String(d.delta);
      row.textContent =
        `${d.activity}: ω ${fmt(d.before)} → ${fmt(d.after)}`;
      list.append(row);
    }
    container.append(list);
  }
}
