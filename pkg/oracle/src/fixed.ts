/**
 * Fixed-point arbitrary-precision arithmetic on BigInt.
 *
 * A real number x is represented as round(x * 2^bits).  All operations
 * round to nearest (half away from zero via the floor((2a+b)/2b) form),
 * so each primitive costs at most half an ulp; working precision is
 * chosen high enough that accumulated rounding stays far below the
 * digits that are emitted or compared.
 */

export function floorDiv(a: bigint, b: bigint): bigint {
  // b > 0 required
  let q = a / b;
  if (a % b !== 0n && a < 0n) q -= 1n;
  return q;
}

export function divRound(a: bigint, b: bigint): bigint {
  // round(a / b) for b > 0
  return floorDiv(2n * a + b, 2n * b);
}

export function isqrt(n: bigint): bigint {
  // floor(sqrt(n)) for n >= 0, Newton iteration
  if (n < 0n) throw new RangeError("isqrt of negative value");
  if (n < 2n) return n;
  const bl = n.toString(2).length;
  let x = 1n << BigInt((bl >> 1) + 1);
  for (;;) {
    const y = (x + n / x) >> 1n;
    if (y >= x) return x;
    x = y;
  }
}

/** One complex fixed-point value. */
export interface Cx {
  re: bigint;
  im: bigint;
}

export class Fx {
  readonly bits: number;
  readonly one: bigint;
  private piCache: bigint | null = null;

  constructor(bits: number) {
    if (!Number.isInteger(bits) || bits < 64) {
      throw new RangeError(`need an integer bit count >= 64, got ${bits}`);
    }
    this.bits = bits;
    this.one = 1n << BigInt(bits);
  }

  fromInt(n: number | bigint): bigint {
    return BigInt(n) << BigInt(this.bits);
  }

  /** Exact rational num/den (den > 0) rounded into fixed point. */
  fromRatio(num: bigint, den: bigint): bigint {
    if (den <= 0n) throw new RangeError("denominator must be positive");
    return divRound(num << BigInt(this.bits), den);
  }

  /** Parse a plain decimal literal ("-1.63") exactly. */
  fromDecimal(text: string): bigint {
    const r = parseDecimal(text);
    return this.fromRatio(r.num, r.den);
  }

  mul(a: bigint, b: bigint): bigint {
    const p = a * b;
    return p >= 0n ? divRound(p, this.one) : -divRound(-p, this.one);
  }

  div(a: bigint, b: bigint): bigint {
    if (b === 0n) throw new RangeError("fixed-point division by zero");
    if (b < 0n) {
      a = -a;
      b = -b;
    }
    return a >= 0n
      ? divRound(a << BigInt(this.bits), b)
      : -divRound(-a << BigInt(this.bits), b);
  }

  /** sqrt(a) for a >= 0. */
  sqrtPos(a: bigint): bigint {
    if (a < 0n) throw new RangeError("sqrt of negative fixed-point value");
    return isqrt(a << BigInt(this.bits));
  }

  /** Lossy conversion for magnitude estimates only. */
  toNumber(v: bigint): number {
    const neg = v < 0n;
    let a = neg ? -v : v;
    let shift = this.bits;
    // keep ~60 significant bits so Number() cannot overflow
    const bl = a === 0n ? 0 : a.toString(2).length;
    if (bl > 60) {
      a >>= BigInt(bl - 60);
      shift -= bl - 60;
    }
    const x = Number(a) * Math.pow(2, -shift);
    return neg ? -x : x;
  }

  /**
   * Decimal rendering with `digits` significant digits guaranteed for
   * |x| >= 0.1 (extra digits are emitted rather than truncated).
   */
  toDecimal(v: bigint, digits: number): string {
    if (v === 0n) return "0";
    const neg = v < 0n;
    const a = neg ? -v : v;
    const frac = digits + 8;
    const scaled = divRound(a * 10n ** BigInt(frac), this.one);
    const s = scaled.toString().padStart(frac + 1, "0");
    const ip = s.slice(0, s.length - frac);
    let fp = s.slice(s.length - frac).replace(/0+$/, "");
    const body = fp.length > 0 ? `${ip}.${fp}` : ip;
    return neg ? `-${body}` : body;
  }

  /** pi by Machin's two-term arctangent formula. */
  pi(): bigint {
    if (this.piCache !== null) return this.piCache;
    const atanInv = (q: bigint): bigint => {
      // atan(1/q) = sum (-1)^k / ((2k+1) q^{2k+1})
      const q2 = q * q;
      let power = this.div(this.one, this.fromInt(q)); // (1/q) in fixed point
      let sum = power;
      let k = 1n;
      for (;;) {
        power = divRound(power, q2);
        if (power === 0n) break;
        const term = divRound(power, 2n * k + 1n);
        sum += k % 2n === 1n ? -term : term;
        k += 1n;
      }
      return sum;
    };
    const v = 16n * atanInv(5n) - 4n * atanInv(239n);
    this.piCache = v;
    return v;
  }

  // ----- complex helpers -------------------------------------------------

  c(re: bigint, im: bigint = 0n): Cx {
    return { re, im };
  }

  cAdd(a: Cx, b: Cx): Cx {
    return { re: a.re + b.re, im: a.im + b.im };
  }

  cSub(a: Cx, b: Cx): Cx {
    return { re: a.re - b.re, im: a.im - b.im };
  }

  cNeg(a: Cx): Cx {
    return { re: -a.re, im: -a.im };
  }

  cMul(a: Cx, b: Cx): Cx {
    return {
      re: this.mul(a.re, b.re) - this.mul(a.im, b.im),
      im: this.mul(a.re, b.im) + this.mul(a.im, b.re),
    };
  }

  /** real (fixed) times complex */
  cScale(r: bigint, b: Cx): Cx {
    return { re: this.mul(r, b.re), im: this.mul(r, b.im) };
  }

  cMulInt(n: bigint, b: Cx): Cx {
    return { re: n * b.re, im: n * b.im };
  }

  cDivInt(a: Cx, n: bigint): Cx {
    const d = n < 0n ? -n : n;
    const s = n < 0n ? -1n : 1n;
    return {
      re: s * (a.re >= 0n ? divRound(a.re, d) : -divRound(-a.re, d)),
      im: s * (a.im >= 0n ? divRound(a.im, d) : -divRound(-a.im, d)),
    };
  }

  cDiv(a: Cx, b: Cx): Cx {
    const d = this.mul(b.re, b.re) + this.mul(b.im, b.im);
    if (d === 0n) throw new RangeError("complex division by zero");
    const nre = this.mul(a.re, b.re) + this.mul(a.im, b.im);
    const nim = this.mul(a.im, b.re) - this.mul(a.re, b.im);
    return { re: this.div(nre, d), im: this.div(nim, d) };
  }

  cInv(b: Cx): Cx {
    return this.cDiv(this.c(this.one), b);
  }

  /** exp(z) by Taylor series; intended for small |z| (< 1). */
  cExp(z: Cx): Cx {
    let term = this.c(this.one);
    let sum = term;
    for (let n = 1n; n < 500n; n += 1n) {
      term = this.cDivInt(this.cMul(term, z), n);
      if (term.re === 0n && term.im === 0n) break;
      sum = this.cAdd(sum, term);
    }
    return sum;
  }

  cAbsNumber(z: Cx): number {
    return Math.hypot(this.toNumber(z.re), this.toNumber(z.im));
  }
}

/** Exact rational from a decimal literal. */
export function parseDecimal(text: string): { num: bigint; den: bigint } {
  const m = /^([+-]?)(\d+)(?:\.(\d+))?$/.exec(text.trim());
  if (!m) throw new RangeError(`not a plain decimal literal: ${text!}`);
  const sign = m[1] === "-" ? -1n : 1n;
  const ip = m[2] ?? "0";
  const fp = m[3] ?? "";
  const num = sign * BigInt(ip + fp);
  const den = 10n ** BigInt(fp.length);
  return { num, den };
}
