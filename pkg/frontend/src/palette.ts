import type { EventTypeName } from "./types.js";

/** One fixed color per event type, shared by nodes and the legend.
 * Okabe-Ito palette: distinguishable under common color-vision
 * deficiencies. */
export const TYPE_COLORS: Record<EventTypeName, string> = {
  Theory: "#0072B2",
  Discovery: "#56B4E9",
  Invention: "#E69F00",
  Politics: "#009E73",
  Art: "#CC79A7",
  Economics: "#F0E442",
  Other: "#8C8C8C",
};

export const TYPE_ORDER: EventTypeName[] = [
  "Theory",
  "Discovery",
  "Invention",
  "Politics",
  "Art",
  "Economics",
  "Other",
];

export function colorFor(type: EventTypeName): string {
  return TYPE_COLORS[type] ?? TYPE_COLORS.Other;
}
