/** Central palette. KG-sourced and LLM-sourced content get visibly distinct
 * background treatments so the user always knows which one they are reading. */

export const nodeColors: Record<string, string> = {
  knownEntity: "#2563eb", // blue: verified Wikidata entity
  variable: "#f59e0b", // orange: unresolved query variable
  literal: "#6b7280", // gray: data value
};

export const provenanceBackgrounds: Record<string, string> = {
  kg: "#e8f4ea",
  llm: "#efe7fb",
  user: "#ffffff",
  system: "#f3f4f6",
};

export const edgeColor = "#4b5563";
export const errorColor = "#b91c1c";
