/**
 * Harness runner: every (context, payload) pair gets one composed page,
 * one driven jsdom load, and one verdict. Page evaluations run in a
 * bounded pool; aggregation is order-independent and the report is
 * sorted positionally so diffs against the simulator line up.
 */

import { readFileSync } from "node:fs";

import { InjectionContext, parseContexts } from "./contexts.js";
import { BROWSER_INFO, Verdict, evaluatePage } from "./driver.js";
import { HarnessServer } from "./server.js";

export interface HarnessReport {
  browserInfo: string;
  contexts: InjectionContext[];
  payloads: string[];
  verdicts: Verdict[];
}

export interface Disagreement {
  contextId: number;
  payloadIndex: number;
  simulator: boolean;
  browser: boolean;
  payload: string;
}

export interface Agreement {
  cells: number;
  agreeing: number;
  ratio: number;
  disagreements: Disagreement[];
}

export async function runHarness(
  contextsPath: string,
  payloadsPath: string,
  opts: { poolSize?: number; settleMs?: number } = {},
): Promise<HarnessReport> {
  const contexts = parseContexts(readFileSync(contextsPath, "utf-8"));
  const payloads = readFileSync(payloadsPath, "utf-8").split(/\r?\n/);
  while (payloads.length && payloads[payloads.length - 1] === "") payloads.pop();
  return runHarnessOn(contexts, payloads, opts);
}

export async function runHarnessOn(
  contexts: InjectionContext[],
  payloads: string[],
  opts: { poolSize?: number; settleMs?: number } = {},
): Promise<HarnessReport> {
  const poolSize = opts.poolSize ?? 4;
  const server = new HarnessServer(contexts, payloads);
  await server.start();
  try {
    const jobs: Array<[number, number]> = [];
    for (const ctx of contexts) {
      for (let idx = 0; idx < payloads.length; idx += 1) jobs.push([ctx.id, idx]);
    }
    const verdicts: Verdict[] = [];
    let cursor = 0;
    const worker = async () => {
      while (cursor < jobs.length) {
        const [ctxId, idx] = jobs[cursor];
        cursor += 1;
        verdicts.push(await evaluatePage(server, ctxId, idx, opts.settleMs));
      }
    };
    await Promise.all(Array.from({ length: Math.min(poolSize, jobs.length) }, worker));
    verdicts.sort(
      (a, b) => a.contextId - b.contextId || a.payloadIndex - b.payloadIndex,
    );
    return { browserInfo: BROWSER_INFO, contexts, payloads, verdicts };
  } finally {
    await server.stop();
  }
}

export function toCsv(report: HarnessReport): string {
  const lines = ["context_id,payload_index,executed,flags"];
  for (const v of report.verdicts) {
    lines.push(
      `${v.contextId},${v.payloadIndex},${v.executed ? 1 : 0},${v.flags.join(";")}`,
    );
  }
  return lines.join("\n") + "\n";
}

/** Parse the simulator's `context_id,payload_index,executed` CSV. */
export function parseSimulatorCsv(text: string): Map<string, boolean> {
  const out = new Map<string, boolean>();
  for (const line of text.split(/\r?\n/)) {
    if (!line || line.startsWith("context_id")) continue;
    const [ctx, idx, executed] = line.split(",");
    out.set(`${ctx}:${idx}`, executed.trim() === "1");
  }
  return out;
}

export function agreement(
  report: HarnessReport,
  simulator: Map<string, boolean>,
): Agreement {
  let cells = 0;
  let agreeing = 0;
  const disagreements: Disagreement[] = [];
  for (const v of report.verdicts) {
    const key = `${v.contextId}:${v.payloadIndex}`;
    const sim = simulator.get(key);
    if (sim === undefined) continue;
    cells += 1;
    if (sim === v.executed) {
      agreeing += 1;
    } else {
      disagreements.push({
        contextId: v.contextId,
        payloadIndex: v.payloadIndex,
        simulator: sim,
        browser: v.executed,
        payload: report.payloads[v.payloadIndex],
      });
    }
  }
  return {
    cells,
    agreeing,
    ratio: cells === 0 ? 1 : agreeing / cells,
    disagreements,
  };
}

export function diffReport(agree: Agreement, browserInfo: string): string {
  const lines = [
    `browser: ${browserInfo}`,
    `cells: ${agree.cells}  agreeing: ${agree.agreeing}  ratio: ${agree.ratio.toFixed(3)}`,
  ];
  for (const d of agree.disagreements) {
    lines.push(
      `DISAGREE ctx=${d.contextId} payload=${d.payloadIndex} simulator=${d.simulator ? 1 : 0} browser=${d.browser ? 1 : 0} :: ${JSON.stringify(d.payload)}`,
    );
  }
  return lines.join("\n") + "\n";
}
