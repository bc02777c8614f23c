/**
 * Kernel evaluation: Taylor series about the origin after argument
 * halving, then exact doubling identities back up.
 *
 * With w = z / 2^n reduced to |w| <= 0.35 * (shortest lattice vector),
 * the series about 0 are
 *   P(w)  = 1/w^2 + sum c_k w^{2k-2}
 *   P'(w) = -2/w^3 + sum (2k-2) c_k w^{2k-3}
 *   Z(w)  = 1/w - sum c_k w^{2k-1} / (2k-1)
 *   S(w)  = w * exp(- sum c_k w^{2k} / ((2k-1) 2k))
 * and one doubling step maps values at u to values at 2u via
 *   q      = P''/(2P')         with P'' = 6 P^2 - g2/2
 *   P(2u)  = -2P + q^2
 *   P'(2u) = -P' + q (6P - 2 q^2)
 *   Z(2u)  = 2Z + q
 *   S(2u)  = -P' S^4
 * None of this shares algorithms with any floating-point implementation:
 * the only primitives are the invariants, the AGM half-periods, and
 * integer arithmetic.
 */

import { Cx, Fx } from "./fixed.js";
import { Lattice } from "./lattice.js";

export interface KernelValues {
  p: Cx;
  pPrime: Cx;
  zeta: Cx;
  sigma: Cx;
}

function seriesAt(lat: Lattice, w: Cx): KernelValues {
  const fx = lat.fx;
  const w2 = fx.cMul(w, w);
  const wInv = fx.cInv(w);
  const w2Inv = fx.cMul(wInv, wInv);
  const w3Inv = fx.cMul(w2Inv, wInv);

  let pSum: Cx = fx.c(0n);
  let dSum: Cx = fx.c(0n); // sum (2k-2) c_k w^{2k-2}
  let zSum: Cx = fx.c(0n); // sum c_k w^{2k-2} / (2k-1)
  let sSum: Cx = fx.c(0n); // sum c_k w^{2k-2} / ((2k-1) 2k)

  let pow = w2; // w^{2k-2} at k = 2
  for (let k = 2; k < lat.coeffs.length; k++) {
    const term = fx.cScale(lat.coeffs[k]!, pow);
    if (
      term.re === 0n &&
      term.im === 0n &&
      pow.re === 0n &&
      pow.im === 0n
    ) {
      break;
    }
    const k2 = BigInt(k);
    pSum = fx.cAdd(pSum, term);
    dSum = fx.cAdd(dSum, fx.cMulInt(2n * k2 - 2n, term));
    zSum = fx.cAdd(zSum, fx.cDivInt(term, 2n * k2 - 1n));
    sSum = fx.cAdd(sSum, fx.cDivInt(term, (2n * k2 - 1n) * 2n * k2));
    pow = fx.cMul(pow, w2);
  }

  const p = fx.cAdd(w2Inv, pSum);
  const pPrime = fx.cAdd(fx.cMulInt(-2n, w3Inv), fx.cMul(dSum, wInv));
  const zeta = fx.cSub(wInv, fx.cMul(zSum, w)); // w^{2k-1} = w^{2k-2} * w
  const sExp = fx.cExp(fx.cNeg(fx.cMul(sSum, w2)));
  const sigma = fx.cMul(w, sExp);
  return { p, pPrime, zeta, sigma };
}

function doubleStep(lat: Lattice, v: KernelValues): KernelValues {
  const fx = lat.fx;
  const six = 6n;
  const pp2 = fx.cMul(v.p, v.p);
  const pSecond = fx.cSub(fx.cMulInt(six, pp2), fx.c(fx.div(lat.g2, fx.fromInt(2))));
  const q = fx.cDiv(pSecond, fx.cMulInt(2n, v.pPrime));
  const q2 = fx.cMul(q, q);
  const p = fx.cAdd(fx.cMulInt(-2n, v.p), q2);
  const pPrime = fx.cAdd(
    fx.cNeg(v.pPrime),
    fx.cMul(q, fx.cSub(fx.cMulInt(six, v.p), fx.cMulInt(2n, q2))),
  );
  const zeta = fx.cAdd(fx.cMulInt(2n, v.zeta), q);
  const s2 = fx.cMul(v.sigma, v.sigma);
  const sigma = fx.cNeg(fx.cMul(v.pPrime, fx.cMul(s2, s2)));
  return { p, pPrime, zeta, sigma };
}

/** How many halvings bring |z| inside the series' comfort zone. */
function halvings(lat: Lattice, z: Cx): number {
  const target = 0.35 * lat.minVec;
  let r = lat.fx.cAbsNumber(z);
  if (r === 0) throw new RangeError("kernel functions have a pole at 0");
  let n = 0;
  while (r > target) {
    r /= 2;
    n += 1;
    if (n > 64) throw new RangeError("argument too large to reduce");
  }
  return n;
}

/** All four kernel values at one complex point (no lattice reduction). */
export function kernelAt(lat: Lattice, z: Cx): KernelValues {
  const n = halvings(lat, z);
  const shift = BigInt(n);
  let v = seriesAt(lat, { re: z.re >> shift, im: z.im >> shift });
  for (let i = 0; i < n; i++) v = doubleStep(lat, v);
  return v;
}

/**
 * The bounded real periodic function sn on the real axis, from the
 * kernel alone: on this lattice e1 - e3 = 1 and the Jacobi modulus is m,
 * so sn(x)^2 = 1 / (P(x) - e3); the sign follows the quarter-cell of
 * x mod 4K (positive on (0, 2K), negative on (2K, 4K)).
 */
export function snReal(lat: Lattice, x: bigint): bigint {
  const fx = lat.fx;
  const period = 4n * lat.omega;
  let x0 = x % period;
  if (x0 < 0n) x0 += period;
  let sign = 1n;
  if (x0 >= 2n * lat.omega) {
    x0 -= 2n * lat.omega;
    sign = -1n;
  }
  if (x0 === 0n) return 0n;
  const v = kernelAt(lat, fx.c(x0));
  const t = v.p.re - lat.e3;
  if (t <= 0n) throw new RangeError("kernel value below the bottom root");
  return sign * fx.div(fx.one, fx.sqrtPos(t));
}

/** Lattice constants of the quasi-periodic log-derivative: zeta at the
 * two half-periods (real part at omega, imaginary part at i tau). */
export function etaPair(lat: Lattice): { etaOmega: bigint; etaTau: bigint } {
  const fx = lat.fx;
  const a = kernelAt(lat, fx.c(lat.omega));
  const b = kernelAt(lat, fx.c(0n, lat.tau));
  return { etaOmega: a.zeta.re, etaTau: b.zeta.im };
}
