/**
 * Harness CLI: `node dist/cli.js <contexts> <payloads> [--out verdicts.csv]
 * [--expected simulator.csv] [--diff diff.txt]`
 *
 * Exit codes: 0 on success, 2 on validation problems, 3 when an expected
 * CSV is given and agreement falls below the threshold (default 0.9).
 */

import { readFileSync, writeFileSync } from "node:fs";
import process from "node:process";

import { agreement, diffReport, parseSimulatorCsv, runHarness, toCsv } from "./harness.js";

interface Args {
  contexts: string;
  payloads: string;
  out?: string;
  expected?: string;
  diff?: string;
  threshold: number;
}

function parseArgs(argv: string[]): Args {
  const positional: string[] = [];
  const args: Partial<Args> = { threshold: 0.9 };
  for (let i = 0; i < argv.length; i += 1) {
    const a = argv[i];
    if (a === "--out") args.out = argv[++i];
    else if (a === "--expected") args.expected = argv[++i];
    else if (a === "--diff") args.diff = argv[++i];
    else if (a === "--threshold") args.threshold = Number(argv[++i]);
    else positional.push(a);
  }
  if (positional.length !== 2) {
    throw new Error("usage: cli.js <contexts-file> <payloads-file> [--out f] [--expected f] [--diff f]");
  }
  return { contexts: positional[0], payloads: positional[1], ...args } as Args;
}

async function main(): Promise<number> {
  let args: Args;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  let report;
  try {
    report = await runHarness(args.contexts, args.payloads);
  } catch (err) {
    console.error(`error: ${err}`);
    return 2;
  }
  const csv = toCsv(report);
  if (args.out) writeFileSync(args.out, csv);
  else process.stdout.write(csv);
  console.error(`browser: ${report.browserInfo}`);

  if (args.expected) {
    const sim = parseSimulatorCsv(readFileSync(args.expected, "utf-8"));
    const agree = agreement(report, sim);
    const diff = diffReport(agree, report.browserInfo);
    if (args.diff) writeFileSync(args.diff, diff);
    else process.stderr.write(diff);
    if (agree.ratio < args.threshold) return 3;
  }
  return 0;
}

main().then((code) => {
  process.exitCode = code;
});
