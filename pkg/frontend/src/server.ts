/**
 * Loopback page server: serves composed context pages, standalone script
 * assets, and the sentinel callback endpoint. Never touches anything
 * beyond 127.0.0.1; every page is built in memory from the context file
 * and the payload list.
 */

import http from "node:http";
import { AddressInfo } from "node:net";

import { InjectionContext } from "./contexts.js";
import { composePage } from "./compose.js";

export class HarnessServer {
  private server: http.Server;
  private hits = new Set<string>();
  readonly contexts: InjectionContext[];
  readonly payloads: string[];

  constructor(contexts: InjectionContext[], payloads: string[]) {
    this.contexts = contexts;
    this.payloads = payloads;
    this.server = http.createServer((req, res) => this.route(req, res));
  }

  private route(req: http.IncomingMessage, res: http.ServerResponse): void {
    const url = new URL(req.url ?? "/", "http://127.0.0.1");
    const page = url.pathname.match(/^\/page\/(\d+)\/(\d+)$/);
    if (page) {
      const ctx = this.contexts[Number(page[1])];
      const idx = Number(page[2]);
      if (!ctx || idx >= this.payloads.length) {
        res.writeHead(404).end();
        return;
      }
      const composed = composePage(ctx, this.payloads[idx], idx);
      res.writeHead(200, { "content-type": "text/html; charset=utf-8" });
      res.end(composed.html);
      return;
    }
    const asset = url.pathname.match(/^\/asset\/(\d+)\/(\d+)\.js$/);
    if (asset) {
      const ctx = this.contexts[Number(asset[1])];
      const idx = Number(asset[2]);
      if (!ctx || idx >= this.payloads.length) {
        res.writeHead(404).end();
        return;
      }
      const composed = composePage(ctx, this.payloads[idx], idx);
      res.writeHead(200, { "content-type": "text/javascript; charset=utf-8" });
      res.end(composed.externalJs ?? "");
      return;
    }
    if (url.pathname === "/cb") {
      const ctx = url.searchParams.get("ctx");
      const idx = url.searchParams.get("idx");
      if (ctx !== null && idx !== null) this.hits.add(`${ctx}:${idx}`);
      res.writeHead(204).end();
      return;
    }
    if (url.pathname === "/healthz") {
      res.writeHead(200, { "content-type": "text/plain" }).end("ok");
      return;
    }
    res.writeHead(404).end();
  }

  async start(): Promise<number> {
    await new Promise<void>((resolve) => this.server.listen(0, "127.0.0.1", resolve));
    return (this.server.address() as AddressInfo).port;
  }

  async stop(): Promise<void> {
    await new Promise<void>((resolve, reject) =>
      this.server.close((err) => (err ? reject(err) : resolve())),
    );
  }

  get port(): number {
    return (this.server.address() as AddressInfo).port;
  }

  pageUrl(contextId: number, payloadIndex: number): string {
    return `http://127.0.0.1:${this.port}/page/${contextId}/${payloadIndex}`;
  }

  sawCallback(contextId: number, payloadIndex: number): boolean {
    return this.hits.has(`${contextId}:${payloadIndex}`);
  }
}
