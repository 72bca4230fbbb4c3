import { describe, expect, it } from "vitest";

import { InjectionContext } from "../src/contexts.js";
import { composePage } from "../src/compose.js";

function ctx(partial: Partial<InjectionContext>): InjectionContext {
  return {
    id: 0,
    name: "t",
    channel: "html-body",
    template: "<p>{{INJ}}</p>",
    notes: "",
    mode: "source",
    ...partial,
  };
}

describe("composePage", () => {
  it("substitutes the payload literally in source mode", () => {
    const page = composePage(ctx({}), "<b>hi</b>", 3);
    expect(page.html).toContain("<p><b>hi</b></p>");
    expect(page.html).toContain("window.xss = function");
    expect(page.html).toContain("/cb?ctx=0&idx=3");
  });

  it("does not mangle replacement patterns in payloads", () => {
    const page = composePage(ctx({}), "$& $' $` $1", 0);
    expect(page.html).toContain("<p>$& $' $` $1</p>");
  });

  it("rewrites location sinks to runtime values", () => {
    const c = ctx({
      channel: "uri-attr",
      mode: "uri-value",
      template: "<script>document.location = {{INJ}};</script>",
    });
    const page = composePage(c, 'javascript:xss()//"', 0);
    expect(page.html).toContain('__navigate("javascript:xss()//\\"")');
    expect(page.html).not.toContain("{{INJ}}");
  });

  it("rewrites innerHTML sinks to JSON literals", () => {
    const c = ctx({
      channel: "innerHTML-sink",
      mode: "innerhtml-value",
      template: '<div id="p"></div><script>document.getElementById("p").innerHTML = {{INJ}};</script>',
    });
    const page = composePage(c, '<svg onload=xss()>"', 1);
    expect(page.html).toContain('.innerHTML = "<svg onload=xss()>\\""');
  });

  it("serves standalone script contexts through an asset", () => {
    const c = ctx({
      id: 4,
      channel: "js-code",
      mode: "jsfile",
      template: "var foo = {{INJ}};",
    });
    const page = composePage(c, "1;xss();//", 2);
    expect(page.html).toContain('src="/asset/4/2.js"');
    expect(page.externalJs).toBe("var foo = 1;xss();//;");
  });
});
