/**
 * Rectangular lattice data for the bounded periodic potential family.
 *
 * For modulus m (an exact rational), the roots are
 *   e1 = (2-m)/3,  e2 = (2m-1)/3,  e3 = -(1+m)/3,
 * the invariants g2 = 4(m^2 - m + 1)/3 and
 * g3 = -4(2-m)(2m-1)(1+m)/27, and the half-periods are the complete
 * elliptic integrals: real half-period K(m), imaginary half-period
 * i K(1-m), both by the arithmetic-geometric mean.
 *
 * The Taylor coefficients c_k of the kernel about the origin follow the
 * classical recursion c_2 = g2/20, c_3 = g3/28,
 *   c_k = 3 / ((2k+1)(k-3)) * sum_{j=2}^{k-2} c_j c_{k-j}.
 */

import { Fx, divRound, parseDecimal } from "./fixed.js";

export interface Lattice {
  readonly fx: Fx;
  readonly mNum: bigint;
  readonly mDen: bigint;
  readonly e1: bigint;
  readonly e2: bigint;
  readonly e3: bigint;
  readonly g2: bigint;
  readonly g3: bigint;
  /** real half-period K(m) */
  readonly omega: bigint;
  /** imaginary half-period K(1-m) (the coefficient of i) */
  readonly tau: bigint;
  /** float estimate of the shortest lattice vector, 2*min(omega,tau) */
  readonly minVec: number;
  /** c_k at index k (entries 0, 1 unused) */
  readonly coeffs: bigint[];
}

/** Complete elliptic integral K via AGM: K = pi / (2 agm(1, sqrt(1-m))). */
export function completeK(fx: Fx, mNum: bigint, mDen: bigint): bigint {
  if (mNum < 0n || mNum >= mDen) {
    throw new RangeError("modulus must satisfy 0 <= m < 1 for a finite K");
  }
  let a = fx.one;
  let b = fx.sqrtPos(fx.fromRatio(mDen - mNum, mDen));
  for (let i = 0; i < 200; i++) {
    const d = a > b ? a - b : b - a;
    if (d <= 2n) break;
    const an = divRound(a + b, 2n);
    const bn = fx.sqrtPos(fx.mul(a, b));
    a = an;
    b = bn;
  }
  return fx.div(fx.pi(), 2n * a);
}

function taylorCoeffs(fx: Fx, g2: bigint, g3: bigint, count: number): bigint[] {
  const c: bigint[] = new Array(count + 1).fill(0n);
  if (count >= 2) c[2] = fx.div(g2, fx.fromInt(20));
  if (count >= 3) c[3] = fx.div(g3, fx.fromInt(28));
  for (let k = 4; k <= count; k++) {
    let acc = 0n;
    for (let j = 2; j <= k - 2; j++) {
      acc += fx.mul(c[j]!, c[k - j]!);
    }
    const num = 3n * acc;
    const den = BigInt((2 * k + 1) * (k - 3));
    c[k] = num >= 0n ? divRound(num, den) : -divRound(-num, den);
  }
  return c;
}

export function makeLattice(fx: Fx, mText: string): Lattice {
  const r = parseDecimal(mText);
  if (r.num <= 0n || r.num >= r.den) {
    throw new RangeError(`modulus must lie strictly inside (0, 1): ${mText}`);
  }
  const n = r.num;
  const d = r.den;
  const e1 = fx.fromRatio(2n * d - n, 3n * d);
  const e2 = fx.fromRatio(2n * n - d, 3n * d);
  const e3 = fx.fromRatio(-(n + d), 3n * d);
  const g2 = fx.fromRatio(4n * (n * n - n * d + d * d), 3n * d * d);
  const g3 = fx.fromRatio(
    -4n * (2n * d - n) * (2n * n - d) * (n + d),
    27n * d * d * d,
  );
  const omega = completeK(fx, n, d);
  const tau = completeK(fx, d - n, d);
  const minVec = 2 * Math.min(fx.toNumber(omega), fx.toNumber(tau));
  // series terms shrink by at least (0.35)^2 per order after argument
  // reduction; size the table so the tail is far below one ulp
  const count = Math.ceil((fx.bits + 48) * 0.34) + 8;
  const coeffs = taylorCoeffs(fx, g2, g3, count);
  return { fx, mNum: n, mDen: d, e1, e2, e3, g2, g3, omega, tau, minVec, coeffs };
}
