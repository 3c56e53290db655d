// Display names and colors for the four diagram quadrants. The ids are the
// service's; only the labels are ours.

export const QUADRANT_ORDER = [
  "let_it_be",
  "wish_you_were_here",
  "long_road_ahead",
  "stuck_in_the_mud",
] as const;

export type QuadrantId = (typeof QUADRANT_ORDER)[number];

export const QUADRANT_LABELS: Record<QuadrantId, string> = {
  let_it_be: "Let it be",
  wish_you_were_here: "Wish you were here",
  long_road_ahead: "Long road ahead",
  stuck_in_the_mud: "Stuck in the mud",
};

export const QUADRANT_COLORS: Record<QuadrantId, string> = {
  let_it_be: "#d9f0d3",
  wish_you_were_here: "#fde8c8",
  long_road_ahead: "#d6e4f0",
  stuck_in_the_mud: "#f0d6d6",
};

export function quadrantLabel(id: string | null): string {
  if (id === null) {
    return "specialized";
  }
  return QUADRANT_LABELS[id as QuadrantId] ?? id;
}
