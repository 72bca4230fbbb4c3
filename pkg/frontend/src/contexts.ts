/**
 * Parser for the shared injection-context file format.
 *
 * Blocks of `context <id> <name> <channel>` followed by template lines
 * indented with two spaces; `{{INJ}}` marks the single injection point.
 * The same composition modes as the simulator apply: a template without
 * markup is a standalone script resource, a bare placeholder assigned to
 * location is a URI value sink, and a bare placeholder assigned to
 * innerHTML is a fragment sink.
 */

export const PLACEHOLDER = "{{INJ}}";

export const CHANNELS = [
  "html-body",
  "html-attr-dquote",
  "html-attr-squote",
  "html-attr-unquoted",
  "uri-attr",
  "event-handler-attr",
  "js-dquote-string",
  "js-squote-string",
  "js-code",
  "js-line-comment",
  "js-block-comment",
  "html-comment",
  "raw-text-element",
  "innerHTML-sink",
] as const;

export type Channel = (typeof CHANNELS)[number];

export type ComposeMode = "source" | "uri-value" | "innerhtml-value" | "jsfile";

export interface InjectionContext {
  id: number;
  name: string;
  channel: Channel;
  template: string;
  notes: string;
  mode: ComposeMode;
}

const LOCATION_VALUE_RE =
  /(?:document\.|window\.)?location(?:\.href)?\s*=\s*\{\{INJ\}\}/;
const INNERHTML_VALUE_RE = /\.innerHTML\s*=\s*\{\{INJ\}\}/;

function modeOf(channel: Channel, template: string): ComposeMode {
  if (!template.includes("<")) return "jsfile";
  if (channel === "uri-attr" && LOCATION_VALUE_RE.test(template)) return "uri-value";
  if (channel === "innerHTML-sink") {
    if (!INNERHTML_VALUE_RE.test(template)) {
      throw new Error("innerHTML-sink template must assign the bare placeholder");
    }
    return "innerhtml-value";
  }
  return "source";
}

export function parseContexts(text: string): InjectionContext[] {
  const lines = text.split(/\r?\n/);
  const contexts: InjectionContext[] = [];
  let i = 0;
  while (i < lines.length) {
    const line = lines[i];
    if (!line.trim() || line.trimStart().startsWith("#")) {
      i += 1;
      continue;
    }
    const parts = line.split(/\s+/).filter(Boolean);
    if (parts[0] !== "context" || parts.length < 4) {
      throw new Error(`line ${i + 1}: expected \`context <id> <name> <channel>\``);
    }
    const id = Number(parts[1]);
    if (!Number.isInteger(id)) throw new Error(`line ${i + 1}: bad context id`);
    const name = parts[2];
    const channel = parts[3] as Channel;
    if (!CHANNELS.includes(channel)) {
      throw new Error(`line ${i + 1}: unknown channel ${parts[3]}`);
    }
    const notes = parts.slice(4).join(" ");
    i += 1;
    const templateLines: string[] = [];
    while (i < lines.length && lines[i].startsWith("  ")) {
      templateLines.push(lines[i].slice(2));
      i += 1;
    }
    if (templateLines.length === 0) {
      throw new Error(`context ${id} (${name}): empty template`);
    }
    const template = templateLines.join("\n");
    const occurrences = template.split(PLACEHOLDER).length - 1;
    if (occurrences !== 1) {
      throw new Error(`context ${id} (${name}): template must contain ${PLACEHOLDER} exactly once`);
    }
    contexts.push({ id, name, channel, template, notes, mode: modeOf(channel, template) });
  }
  if (contexts.length === 0) throw new Error("context file defines no contexts");
  contexts.forEach((c, k) => {
    if (c.id !== k) throw new Error(`context ids must be exactly 0..${contexts.length - 1} in order`);
  });
  return contexts;
}
