/**
 * jsdom page driver.
 *
 * jsdom supplies a spec-grade HTML parser and real script execution; the
 * pieces a full browser would add are applied as explicit, itemized
 * shims after load:
 *
 *   click-all-anchors   every anchor is clicked; javascript: hrefs are
 *                       evaluated in the page (jsdom does not navigate)
 *   js-uri-iframes      iframe src="javascript:..." bodies are evaluated
 *   auto-fire-load      load dispatched on svg and iframe elements
 *   auto-fire-error     error dispatched on img elements with a src and
 *                       on script elements whose src is not a local asset
 *   location-sink       value-mode templates route through __navigate
 *                       (see compose.ts)
 *
 * External resources never load: only same-origin /asset/ scripts are
 * fetched. Verdicts come from the in-page hit flag or the loopback
 * callback, whichever lands first.
 */

import { createRequire } from "node:module";

import { JSDOM, ResourceLoader, VirtualConsole } from "jsdom";

import { HarnessServer } from "./server.js";

function jsdomVersion(): string {
  try {
    return createRequire(import.meta.url)("jsdom/package.json").version as string;
  } catch {
    return "unknown";
  }
}

export const BROWSER_INFO = `jsdom/${jsdomVersion()} (shims: click-all-anchors, js-uri-iframes, auto-fire-load, auto-fire-error, location-sink)`;

export interface Verdict {
  contextId: number;
  payloadIndex: number;
  executed: boolean;
  flags: string[];
}

class LocalAssetLoader extends ResourceLoader {
  constructor(private origin: string) {
    super();
  }

  fetch(url: string, options: any) {
    const isDocument = !options || !options.element;
    const isLocalAsset = url.startsWith(this.origin) && url.includes("/asset/");
    if (isDocument || isLocalAsset) {
      return super.fetch(url, options);
    }
    return null; // subresources other than our script assets stay unloaded
  }
}

const JS_URI = /^\s*javascript:/i;

export async function evaluatePage(
  server: HarnessServer,
  contextId: number,
  payloadIndex: number,
  settleMs = 60,
): Promise<Verdict> {
  const flags: string[] = [];
  const virtualConsole = new VirtualConsole();
  virtualConsole.on("jsdomError", (err: Error) => {
    if (/not implemented.*navigation/i.test(String(err.message))) {
      flags.push("navigation-attempt");
    }
  });
  const origin = `http://127.0.0.1:${server.port}`;
  let dom: JSDOM;
  try {
    dom = await JSDOM.fromURL(server.pageUrl(contextId, payloadIndex), {
      runScripts: "dangerously",
      resources: new LocalAssetLoader(origin),
      virtualConsole,
      pretendToBeVisual: true,
    });
  } catch (err) {
    return { contextId, payloadIndex, executed: false, flags: ["load-failure"] };
  }

  const win = dom.window as any;
  try {
    await settled(win, settleMs);
    const doc = win.document;

    for (const el of Array.from(doc.querySelectorAll("svg, iframe")) as any[]) {
      el.dispatchEvent(new win.Event("load"));
    }
    for (const el of Array.from(doc.querySelectorAll("img[src]")) as any[]) {
      el.dispatchEvent(new win.Event("error"));
    }
    for (const el of Array.from(doc.querySelectorAll("script[src]")) as any[]) {
      const src = String(el.getAttribute("src") ?? "");
      if (!src.includes("/asset/")) el.dispatchEvent(new win.Event("error"));
    }
    for (const el of Array.from(doc.querySelectorAll("iframe[src]")) as any[]) {
      const src = String(el.getAttribute("src") ?? "");
      if (JS_URI.test(src)) {
        try {
          win.eval(src.replace(JS_URI, ""));
        } catch {
          /* javascript: URI errors fail silently, as in a browser */
        }
      }
    }
    for (const el of Array.from(doc.querySelectorAll("a[href]")) as any[]) {
      const href = String(el.getAttribute("href") ?? "");
      if (JS_URI.test(href)) {
        try {
          win.eval(href.replace(JS_URI, ""));
        } catch {
          /* ditto */
        }
      } else {
        try {
          el.click();
        } catch {
          flags.push("click-failure");
        }
      }
    }
    await settled(win, settleMs);

    if (win.__navigated) flags.push("navigated-away");
    const executed = win.__xssHit === true || server.sawCallback(contextId, payloadIndex);
    return { contextId, payloadIndex, executed, flags };
  } finally {
    win.close();
  }
}

function settled(win: any, ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}
