import { describe, expect, it } from "vitest";

import { Fx, parseDecimal } from "../src/fixed.js";
import { completeK, makeLattice, Lattice } from "../src/lattice.js";
import { etaPair, kernelAt, snReal } from "../src/kernel.js";
import { generateRecords, renderCsv } from "../src/generate.js";
import type { Cx } from "../src/fixed.js";

const BITS = 256;
const fx = new Fx(BITS);
const MODULI = ["0.25", "0.5", "0.75"] as const;
const LATTICES: Record<string, Lattice> = Object.fromEntries(
  MODULI.map((m) => [m, makeLattice(fx, m)]),
);

const GENERIC_POINTS: ReadonlyArray<readonly [string, string]> = [
  ["0.43", "0"],
  ["1.07", "0"],
  ["0.31", "0.52"],
  ["0.91", "0.77"],
  ["1.63", "0.38"],
];

function cAt(lat: Lattice, re: string, im: string): Cx {
  return lat.fx.c(lat.fx.fromDecimal(re), lat.fx.fromDecimal(im));
}

function absNum(lat: Lattice, z: Cx): number {
  return lat.fx.cAbsNumber(z);
}

/** |a - b| < 10^-tolExp * max(1, |b|), all in exact rational arithmetic. */
function decimalClose(aText: string, bText: string, tolExp: number): boolean {
  const a = parseDecimal(aText);
  const b = parseDecimal(bText);
  // |a.num * b.den - b.num * a.den| < 10^-tolExp * max(a.den*b.den, |b.num|*a.den)
  const lhs = (a.num * b.den - b.num * a.den) * 10n ** BigInt(tolExp);
  const abs = lhs < 0n ? -lhs : lhs;
  const bAbs = b.num < 0n ? -b.num : b.num;
  const scale = a.den * b.den > bAbs * a.den ? a.den * b.den : bAbs * a.den;
  return abs < scale;
}

describe("fixed-point layer", () => {
  it("round-trips decimals", () => {
    for (const s of ["0.25", "1.07", "2.613", "0.0625"]) {
      const v = fx.fromDecimal(s);
      expect(decimalClose(fx.toDecimal(v, 40), s, 60)).toBe(true);
    }
    expect(fx.toDecimal(fx.fromDecimal("-1.63"), 30).startsWith("-1.63")).toBe(
      true,
    );
    expect(fx.toDecimal(0n, 30)).toBe("0");
  });

  it("computes pi to full precision (Machin)", () => {
    const known =
      "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798";
    expect(decimalClose(fx.toDecimal(fx.pi(), 70), known, 70)).toBe(true);
  });

  it("square root squares back", () => {
    for (const s of ["2", "3", "0.5", "1.75"]) {
      const v = fx.fromDecimal(s);
      const r = fx.sqrtPos(v);
      const back = fx.mul(r, r);
      expect(absDiffNum(back, v)).toBeLessThan(1e-70);
    }
  });

  it("rejects bad inputs", () => {
    expect(() => fx.fromDecimal("1e-3")).toThrow();
    expect(() => fx.sqrtPos(-fx.one)).toThrow();
    expect(() => new Fx(32)).toThrow();
    expect(() => completeK(fx, 1n, 1n)).toThrow();
    expect(() => makeLattice(fx, "1.5")).toThrow();
  });
});

function absDiffNum(a: bigint, b: bigint): number {
  return Math.abs(fx.toNumber(a - b));
}

describe("lattice data", () => {
  it("roots sum to zero and match the invariants", () => {
    for (const m of MODULI) {
      const lat = LATTICES[m]!;
      // each root is rounded to nearest independently, so allow 2 ulp
      const rootSum = lat.e1 + lat.e2 + lat.e3;
      expect(rootSum <= 2n && rootSum >= -2n).toBe(true);
      // g2 = -4 (e1 e2 + e1 e3 + e2 e3) = 2 (e1^2 + e2^2 + e3^2)
      const sumSq =
        fx.mul(lat.e1, lat.e1) + fx.mul(lat.e2, lat.e2) + fx.mul(lat.e3, lat.e3);
      expect(absDiffNum(lat.g2, 2n * sumSq)).toBeLessThan(1e-70);
      // g3 = 4 e1 e2 e3
      const prod = fx.mul(fx.mul(lat.e1, lat.e2), lat.e3);
      expect(absDiffNum(lat.g3, 4n * prod)).toBeLessThan(1e-70);
    }
  });

  it("half-periods swap under m -> 1-m", () => {
    expect(absDiffNum(LATTICES["0.25"]!.omega, LATTICES["0.75"]!.tau)).toBe(0);
    expect(absDiffNum(LATTICES["0.25"]!.tau, LATTICES["0.75"]!.omega)).toBe(0);
    expect(absDiffNum(LATTICES["0.5"]!.omega, LATTICES["0.5"]!.tau)).toBe(0);
  });
});

describe("kernel identities", () => {
  it("takes the root values at the half-periods", () => {
    for (const m of MODULI) {
      const lat = LATTICES[m]!;
      const atOmega = kernelAt(lat, fx.c(lat.omega));
      const atTau = kernelAt(lat, fx.c(0n, lat.tau));
      const atBoth = kernelAt(lat, fx.c(lat.omega, lat.tau));
      expect(absDiffNum(atOmega.p.re, lat.e1)).toBeLessThan(1e-65);
      expect(Math.abs(fx.toNumber(atOmega.p.im))).toBeLessThan(1e-65);
      expect(absDiffNum(atTau.p.re, lat.e3)).toBeLessThan(1e-65);
      expect(absDiffNum(atBoth.p.re, lat.e2)).toBeLessThan(1e-65);
      // the derivative vanishes at every half-period
      for (const v of [atOmega, atTau, atBoth]) {
        expect(absNum(lat, v.pPrime)).toBeLessThan(1e-60);
      }
    }
  });

  it("satisfies the defining differential equation", () => {
    for (const m of MODULI) {
      const lat = LATTICES[m]!;
      for (const [re, im] of GENERIC_POINTS) {
        const v = kernelAt(lat, cAt(lat, re, im));
        const lhs = fx.cMul(v.pPrime, v.pPrime);
        const p2 = fx.cMul(v.p, v.p);
        const p3 = fx.cMul(p2, v.p);
        const rhs = fx.cSub(
          fx.cSub(fx.cMulInt(4n, p3), fx.cScale(lat.g2, v.p)),
          fx.c(lat.g3),
        );
        const resid = absNum(lat, fx.cSub(lhs, rhs));
        const scale = Math.max(1, absNum(lat, lhs));
        expect(resid / scale).toBeLessThan(1e-62);
      }
    }
  });

  it("has the right parities", () => {
    const lat = LATTICES["0.5"]!;
    const z = cAt(lat, "0.91", "0.77");
    const plus = kernelAt(lat, z);
    const minus = kernelAt(lat, fx.cNeg(z));
    expect(absNum(lat, fx.cSub(plus.p, minus.p))).toBeLessThan(1e-70);
    expect(absNum(lat, fx.cAdd(plus.pPrime, minus.pPrime))).toBeLessThan(1e-70);
    expect(absNum(lat, fx.cAdd(plus.zeta, minus.zeta))).toBeLessThan(1e-70);
    expect(absNum(lat, fx.cAdd(plus.sigma, minus.sigma))).toBeLessThan(1e-70);
  });

  it("ties the half-period constants to pi (Legendre)", () => {
    for (const m of MODULI) {
      const lat = LATTICES[m]!;
      const { etaOmega, etaTau } = etaPair(lat);
      const lhs = fx.mul(etaOmega, lat.tau) - fx.mul(etaTau, lat.omega);
      const rhs = fx.div(fx.pi(), fx.fromInt(2));
      expect(absDiffNum(lhs, rhs)).toBeLessThan(1e-70);
    }
  });
});

describe("derivative structure (finite differences at high precision)", () => {
  const h = 1n << BigInt(BITS - 85); // 2^-85
  const twoH = 2n * h;

  function fdDeriv(lat: Lattice, z: Cx, pick: (v: ReturnType<typeof kernelAt>) => Cx): Cx {
    const plus = pick(kernelAt(lat, fx.cAdd(z, fx.c(h))));
    const minus = pick(kernelAt(lat, fx.cSub(z, fx.c(h))));
    const diff = fx.cSub(plus, minus);
    return { re: fx.div(diff.re, twoH), im: fx.div(diff.im, twoH) };
  }

  it("d/dz of the quasi-periodic primitive is minus the kernel", () => {
    for (const m of MODULI) {
      const lat = LATTICES[m]!;
      const z = cAt(lat, "0.91", "0.77");
      const v = kernelAt(lat, z);
      const dz = fdDeriv(lat, z, (k) => k.zeta);
      expect(absNum(lat, fx.cAdd(dz, v.p))).toBeLessThan(1e-40);
    }
  });

  it("d/dz of the kernel is the reported derivative", () => {
    const lat = LATTICES["0.25"]!;
    const z = cAt(lat, "0.31", "0.52");
    const v = kernelAt(lat, z);
    const dp = fdDeriv(lat, z, (k) => k.p);
    expect(absNum(lat, fx.cSub(dp, v.pPrime))).toBeLessThan(1e-40);
  });

  it("log-derivative of the product primitive is the quasi-periodic one", () => {
    const lat = LATTICES["0.75"]!;
    const z = cAt(lat, "0.43", "0");
    const v = kernelAt(lat, z);
    const ds = fdDeriv(lat, z, (k) => k.sigma);
    const logDeriv = fx.cDiv(ds, v.sigma);
    expect(absNum(lat, fx.cSub(logDeriv, v.zeta))).toBeLessThan(1e-40);
  });
});

describe("bounded periodic function", () => {
  it("stays in (-1, 1) and peaks at the quarter period", () => {
    for (const m of MODULI) {
      const lat = LATTICES[m]!;
      for (const xT of ["0.37", "0.81", "1.24", "2.05", "2.61"]) {
        const s = snReal(lat, fx.fromDecimal(xT));
        expect(Math.abs(fx.toNumber(s))).toBeLessThanOrEqual(1);
      }
      const peak = snReal(lat, lat.omega);
      expect(absDiffNum(peak, fx.one)).toBeLessThan(1e-60);
    }
  });

  it("is odd-symmetric across the half cell", () => {
    const lat = LATTICES["0.5"]!;
    const x = fx.fromDecimal("0.81");
    const a = snReal(lat, x);
    const b = snReal(lat, x + 2n * lat.omega);
    expect(a + b).toBe(0n);
    const c = snReal(lat, x + 4n * lat.omega);
    expect(c).toBe(a);
  });

  it("satisfies its first-order differential equation", () => {
    const h = 1n << BigInt(BITS - 85);
    for (const m of MODULI) {
      const lat = LATTICES[m]!;
      const mFx = fx.fromDecimal(m);
      const x = fx.fromDecimal("0.81");
      const sPlus = snReal(lat, x + h);
      const sMinus = snReal(lat, x - h);
      const d = fx.div(sPlus - sMinus, 2n * h);
      const s = snReal(lat, x);
      const s2 = fx.mul(s, s);
      const lhs = fx.mul(d, d);
      const rhs = fx.mul(fx.one - s2, fx.one - fx.mul(mFx, s2));
      expect(absDiffNum(lhs, rhs)).toBeLessThan(1e-40);
    }
  });

  it("agrees with the complex route on the shifted line", () => {
    // kernel(x + i*tau) = m sn(x)^2 - (m+1)/3, connecting the two
    // independent evaluation paths
    for (const m of MODULI) {
      const lat = LATTICES[m]!;
      const mFx = fx.fromDecimal(m);
      const third = fx.div(mFx + fx.one, fx.fromInt(3));
      for (const xT of ["0.37", "1.24", "2.61"]) {
        const x = fx.fromDecimal(xT);
        const v = kernelAt(lat, fx.c(x, lat.tau));
        const s = snReal(lat, x);
        const want = fx.mul(mFx, fx.mul(s, s)) - third;
        expect(absDiffNum(v.p.re, want)).toBeLessThan(1e-60);
        expect(Math.abs(fx.toNumber(v.p.im))).toBeLessThan(1e-60);
      }
    }
  });
});

describe("golden vector generation", () => {
  it("emits 75 well-formed records with >= 30 significant digits", () => {
    const records = generateRecords({ bits: 256, digits: 36 });
    expect(records.length).toBe(75);
    const text = renderCsv(records);
    const lines = text.trim().split("\n");
    expect(lines[0]).toBe("fn,m,z_re,z_im,val_re,val_im");
    expect(lines.length).toBe(76);
    for (const r of records) {
      for (const val of [r.valRe, r.valIm]) {
        expect(/^-?\d+(\.\d+)?$/.test(val)).toBe(true);
        if (val !== "0") {
          const sig = val.replace(/^-/, "").replace(/^0\.0*/, "").replace(".", "");
          expect(sig.length).toBeGreaterThanOrEqual(30);
        }
      }
    }
    const byFn = new Set(records.map((r) => r.fn));
    expect(byFn).toEqual(new Set(["wp", "wp_prime", "zeta", "sigma", "sn"]));
  });

  it("is stable under precision doubling to 1e-25", () => {
    const lo = generateRecords({ bits: 192, digits: 40 });
    const hi = generateRecords({ bits: 384, digits: 40 });
    expect(lo.length).toBe(hi.length);
    for (let i = 0; i < lo.length; i++) {
      const a = lo[i]!;
      const b = hi[i]!;
      expect(a.fn).toBe(b.fn);
      expect(decimalClose(a.valRe, b.valRe, 25)).toBe(true);
      expect(decimalClose(a.valIm, b.valIm, 25)).toBe(true);
    }
  });

  it("honors point and modulus selection", () => {
    const records = generateRecords({
      moduli: ["0.5"],
      complexPoints: [["0.43", "0"]],
      snPoints: ["0.81"],
      bits: 192,
    });
    // 4 kernel functions at one point + 1 sn value
    expect(records.length).toBe(5);
    expect(records.every((r) => r.m === "0.5")).toBe(true);
  });
});
