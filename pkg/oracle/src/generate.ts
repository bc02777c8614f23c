/**
 * Golden vector generation: evaluate every kernel function at a fixed
 * panel of generic points per modulus and render the records as
 * "fn,m,z_re,z_im,val_re,val_im" lines at a requested digit count.
 */

import { Fx } from "./fixed.js";
import { makeLattice } from "./lattice.js";
import { kernelAt, snReal } from "./kernel.js";

export const DEFAULT_MODULI = ["0.25", "0.5", "0.75"] as const;

/** Generic complex points: inside every modulus' fundamental cell, away
 * from lattice points, half-periods, and the real/imaginary axes' special
 * sets. */
export const DEFAULT_COMPLEX_POINTS: ReadonlyArray<readonly [string, string]> = [
  ["0.43", "0"],
  ["1.07", "0"],
  ["0.31", "0.52"],
  ["0.91", "0.77"],
  ["1.63", "0.38"],
];

/** Real arguments for the bounded periodic function. */
export const DEFAULT_SN_POINTS: readonly string[] = [
  "0.37",
  "0.81",
  "1.24",
  "2.05",
  "2.61",
];

export interface GenerateOptions {
  moduli?: readonly string[];
  complexPoints?: ReadonlyArray<readonly [string, string]>;
  snPoints?: readonly string[];
  digits?: number;
  bits?: number;
}

export interface GoldenRecord {
  fn: "wp" | "wp_prime" | "zeta" | "sigma" | "sn";
  m: string;
  zRe: string;
  zIm: string;
  valRe: string;
  valIm: string;
}

export function generateRecords(opts: GenerateOptions = {}): GoldenRecord[] {
  const moduli = opts.moduli ?? DEFAULT_MODULI;
  const zs = opts.complexPoints ?? DEFAULT_COMPLEX_POINTS;
  const xs = opts.snPoints ?? DEFAULT_SN_POINTS;
  const digits = opts.digits ?? 36;
  const bits = opts.bits ?? 384;
  const fx = new Fx(bits);
  const out: GoldenRecord[] = [];
  for (const mText of moduli) {
    const lat = makeLattice(fx, mText);
    for (const [reText, imText] of zs) {
      const z = fx.c(fx.fromDecimal(reText), fx.fromDecimal(imText));
      const v = kernelAt(lat, z);
      const emit = (
        fn: GoldenRecord["fn"],
        re: bigint,
        im: bigint,
      ): void => {
        out.push({
          fn,
          m: mText,
          zRe: reText,
          zIm: imText,
          valRe: fx.toDecimal(re, digits),
          valIm: fx.toDecimal(im, digits),
        });
      };
      emit("wp", v.p.re, v.p.im);
      emit("wp_prime", v.pPrime.re, v.pPrime.im);
      emit("zeta", v.zeta.re, v.zeta.im);
      emit("sigma", v.sigma.re, v.sigma.im);
    }
    for (const xText of xs) {
      const sn = snReal(lat, fx.fromDecimal(xText));
      out.push({
        fn: "sn",
        m: mText,
        zRe: xText,
        zIm: "0",
        valRe: fx.toDecimal(sn, digits),
        valIm: "0",
      });
    }
  }
  return out;
}

export function renderCsv(records: readonly GoldenRecord[]): string {
  const lines = ["fn,m,z_re,z_im,val_re,val_im"];
  for (const r of records) {
    lines.push(`${r.fn},${r.m},${r.zRe},${r.zIm},${r.valRe},${r.valIm}`);
  }
  return lines.join("\n") + "\n";
}
