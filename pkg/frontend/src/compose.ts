/**
 * Page composition: inject a payload into a context template and wire in
 * the sentinel bootstrap.
 *
 * The bootstrap defines the marker call xss(), which records a local hit
 * and beacons the (context, payload) pair to the loopback callback
 * endpoint, mirroring a notification-script pattern at lab scale. For
 * value-mode templates the assignment is rewritten to concrete runtime
 * code: a JSON string literal carries the payload, so no payload text
 * ever reaches the page as source. Location sinks go through __navigate,
 * which implements javascript:-URI semantics and records everything else
 * as a navigation attempt (a documented driver shim; jsdom does not
 * navigate).
 */

import { InjectionContext, PLACEHOLDER } from "./contexts.js";

export interface ComposedPage {
  /** full document to serve */
  html: string;
  /** standalone script body for jsfile contexts, served separately */
  externalJs?: string;
}

const LOCATION_ASSIGN_RE =
  /(?:document\.|window\.)?location(?:\.href)?\s*=\s*\{\{INJ\}\}/;
const INNERHTML_ASSIGN_RE = /\.innerHTML\s*=\s*\{\{INJ\}\}/;

export function bootstrap(contextId: number, payloadIndex: number): string {
  return (
    "<script>" +
    "window.__xssHit = false;" +
    "window.xss = function () {" +
    "  window.__xssHit = true;" +
    "  try { var r = new XMLHttpRequest();" +
    `  r.open("GET", "/cb?ctx=${contextId}&idx=${payloadIndex}", true); r.send(); } catch (e) {}` +
    "  return true;" +
    "};" +
    "window.__navigated = null;" +
    "window.__navigate = function (uri) {" +
    '  var v = String(uri == null ? "" : uri).trim();' +
    "  if (/^javascript:/i.test(v)) { try { window.eval(v.slice(11)); } catch (e) {} }" +
    "  else if (v) { window.__navigated = v; }" +
    "};" +
    "</scr" + "ipt>"
  );
}

export function composePage(
  ctx: InjectionContext,
  payload: string,
  payloadIndex: number,
): ComposedPage {
  const boot = bootstrap(ctx.id, payloadIndex);
  switch (ctx.mode) {
    case "jsfile": {
      const body = ctx.template.replace(PLACEHOLDER, payload);
      return {
        html: `${boot}<script src="/asset/${ctx.id}/${payloadIndex}.js"></script>`,
        externalJs: body,
      };
    }
    case "uri-value": {
      const page = ctx.template.replace(
        LOCATION_ASSIGN_RE,
        () => `__navigate(${JSON.stringify(payload)})`,
      );
      return { html: boot + page };
    }
    case "innerhtml-value": {
      const page = ctx.template.replace(PLACEHOLDER, () => JSON.stringify(payload));
      return { html: boot + page };
    }
    default: {
      const page = ctx.template.replace(PLACEHOLDER, () => payload);
      return { html: boot + page };
    }
  }
}
