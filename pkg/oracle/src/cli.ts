/**
 * Golden-vector file generator.
 *
 * Usage:
 *   node dist/cli.js [--m 0.25,0.5,0.75] [--points "0.43,0;0.31,0.52"]
 *                    [--sn-points "0.37;0.81"] [--digits 36] [--bits 384]
 *                    [--out golden_vectors.csv]
 *
 * Without --out the CSV goes to stdout.
 */

import * as fs from "node:fs";
import * as process from "node:process";

import {
  DEFAULT_COMPLEX_POINTS,
  DEFAULT_MODULI,
  DEFAULT_SN_POINTS,
  generateRecords,
  renderCsv,
} from "./generate.js";

interface CliArgs {
  m: readonly string[];
  points: ReadonlyArray<readonly [string, string]>;
  snPoints: readonly string[];
  digits: number;
  bits: number;
  out: string | null;
}

function parseArgs(argv: readonly string[]): CliArgs {
  const args: CliArgs = {
    m: DEFAULT_MODULI,
    points: DEFAULT_COMPLEX_POINTS,
    snPoints: DEFAULT_SN_POINTS,
    digits: 36,
    bits: 384,
    out: null,
  };
  const take = (i: number, flag: string): string => {
    const v = argv[i + 1];
    if (v === undefined) throw new Error(`${flag} needs a value`);
    return v;
  };
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    switch (flag) {
      case "--m":
        args.m = take(i, flag).split(",").map((s) => s.trim());
        break;
      case "--points":
        args.points = take(i, flag)
          .split(";")
          .map((pair) => {
            const [re, im] = pair.split(",").map((s) => s.trim());
            if (re === undefined || im === undefined) {
              throw new Error(`--points wants "re,im;re,im;...": ${pair}`);
            }
            return [re, im] as const;
          });
        break;
      case "--sn-points":
        args.snPoints = take(i, flag).split(";").map((s) => s.trim());
        break;
      case "--digits":
        args.digits = Number(take(i, flag));
        if (!Number.isInteger(args.digits) || args.digits < 10) {
          throw new Error("--digits needs an integer >= 10");
        }
        break;
      case "--bits":
        args.bits = Number(take(i, flag));
        if (!Number.isInteger(args.bits) || args.bits < 128) {
          throw new Error("--bits needs an integer >= 128");
        }
        break;
      case "--out":
        args.out = take(i, flag);
        break;
      default:
        throw new Error(`unknown flag: ${flag}`);
    }
  }
  return args;
}

function main(): number {
  let args: CliArgs;
  try {
    args = parseArgs(process.argv.slice(2));
  } catch (err) {
    process.stderr.write(`usage error: ${(err as Error).message}\n`);
    return 1;
  }
  const records = generateRecords({
    moduli: args.m,
    complexPoints: args.points,
    snPoints: args.snPoints,
    digits: args.digits,
    bits: args.bits,
  });
  const text = renderCsv(records);
  if (args.out !== null) {
    fs.writeFileSync(args.out, text, { encoding: "ascii" });
    process.stderr.write(`${records.length} records -> ${args.out}\n`);
  } else {
    process.stdout.write(text);
  }
  return 0;
}

const rc = main();
if (rc !== 0) {
  process.exit(rc);
}
