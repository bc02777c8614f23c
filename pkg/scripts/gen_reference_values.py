"""Generate frozen high-precision reference values for the unit tests.

Dev-time tool, not part of the installed package. Requires mpmath.

Two independent evaluation routes are used and cross-checked before a
value is frozen:

  1. theta-function route: sigma/zeta/wp written in terms of Jacobi
     theta_1 and its v-derivatives with nome q = exp(-pi*K'/K),
  2. lattice-sum route: Eisenstein-accelerated sums over the period
     lattice {2a*omega + 2b*i*tau}.

Run:  python scripts/gen_reference_values.py
"""

from mpmath import mp, mpf, mpc, jtheta, ellipk, ellipfun, exp, pi, sqrt

mp.dps = 60


def lame_data(m):
    m = mpf(m)
    g2 = 4 * (m * m - m + 1) / 3
    g3 = 4 * (m - 2) * (2 * m - 1) * (m + 1) / 27
    e1, e2, e3 = (2 - m) / 3, (2 * m - 1) / 3, -(m + 1) / 3
    omega = ellipk(m)
    tau = ellipk(1 - m)
    return g2, g3, e1, e2, e3, omega, tau


class Theta:
    """sigma / zeta / wp via theta_1 quotients."""

    def __init__(self, m):
        self.g2, self.g3, self.e1, self.e2, self.e3, self.om, self.tau = lame_data(m)
        self.q = exp(-pi * self.tau / self.om)
        self.t1p0 = jtheta(1, 0, self.q, 1)
        t1ppp0 = jtheta(1, 0, self.q, 3)
        self.eta = -(pi ** 2) * t1ppp0 / (12 * self.om * self.t1p0)

    def sigma(self, z):
        v = pi * z / (2 * self.om)
        return (2 * self.om / pi) * exp(self.eta * z * z / (2 * self.om)) \
            * jtheta(1, v, self.q) / self.t1p0

    def zeta(self, z):
        v = pi * z / (2 * self.om)
        return self.eta * z / self.om + (pi / (2 * self.om)) \
            * jtheta(1, v, self.q, 1) / jtheta(1, v, self.q)

    def wp(self, z):
        v = pi * z / (2 * self.om)
        t0 = jtheta(1, v, self.q)
        t1 = jtheta(1, v, self.q, 1)
        t2 = jtheta(1, v, self.q, 2)
        return -self.eta / self.om - (pi / (2 * self.om)) ** 2 * (t2 * t0 - t1 * t1) / (t0 * t0)

    def wp_prime(self, z):
        return -self.sigma(2 * z) / self.sigma(z) ** 4


def eisenstein(g2, g3, kmax):
    """c_k with wp = 1/z^2 + sum_{k>=2} c_k z^(2k-2); G_{2k} = c_k/(2k-1)."""
    c = {2: g2 / 20, 3: g3 / 28}
    for k in range(4, kmax + 1):
        s = sum(c[j] * c[k - j] for j in range(2, k - 1))
        c[k] = 3 * s / ((2 * k + 1) * (k - 3))
    return c


class Lattice:
    """Eisenstein-accelerated lattice sums, independent of the theta route."""

    def __init__(self, m, N=14, K=80):
        self.g2, self.g3, self.e1, self.e2, self.e3, self.om, self.tau = lame_data(m)
        self.N, self.K = N, K
        self.pts = []
        for a in range(-N, N + 1):
            for b in range(-N, N + 1):
                if a == 0 and b == 0:
                    continue
                self.pts.append(2 * a * self.om + 2j * b * self.tau)
        c = eisenstein(self.g2, self.g3, K // 2 + 1)
        # S_j over full lattice: 0 for odd j, (2k-1)^-1 * c_k... G_{2k} = c_k/(2k-1)
        self.S_full = {}
        for j in range(3, K + 1):
            if j % 2 == 1:
                self.S_full[j] = mpf(0)
            else:
                k = j // 2
                self.S_full[j] = c[k] / (2 * k - 1)
        self.S_in = {}
        for j in range(2, K + 1):
            self.S_in[j] = sum(w ** (-j) for w in self.pts)

    def wp(self, z):
        z = mpc(z)
        acc = 1 / (z * z)
        for w in self.pts:
            acc += 1 / (z - w) ** 2 - 1 / (w * w)
        for j in range(4, self.K + 1, 2):
            acc += (j - 1) * (self.S_full[j] - self.S_in[j]) * z ** (j - 2)
        return acc

    def wp_prime(self, z):
        z = mpc(z)
        acc = -2 / z ** 3
        for w in self.pts:
            acc += -2 / (z - w) ** 3
        for j in range(4, self.K + 1, 2):
            acc += (j - 1) * (j - 2) * (self.S_full[j] - self.S_in[j]) * z ** (j - 3)
        return acc

    def zeta(self, z):
        z = mpc(z)
        acc = 1 / z
        for w in self.pts:
            acc += 1 / (z - w) + 1 / w + z / (w * w)
        for j in range(4, self.K + 1, 2):
            acc -= (self.S_full[j] - self.S_in[j]) * z ** (j - 1)
        return acc

    def sigma(self, z):
        z = mpc(z)
        prod = mpc(1)
        for w in self.pts:
            prod *= (1 - z / w)
        corr = self.S_in[2] * z * z / 2
        for j in range(4, self.K + 1, 2):
            corr -= (self.S_full[j] - self.S_in[j]) * z ** j / j
        return z * prod * exp(corr)


def show(label, a, b):
    d = abs(a - b) / max(abs(a), mpf(1) / 10 ** 40)
    print(f"{label}: {mp.nstr(a, 33)}   (xcheck rel diff {mp.nstr(d, 3)})")
    assert d < mpf(10) ** (-30), f"routes disagree for {label}"
    return a


def main():
    for m in (0.25, 0.5, 0.75):
        th = Theta(m)
        la = Lattice(m)
        print(f"== m = {m}: g2={mp.nstr(th.g2, 25)} g3={mp.nstr(th.g3, 25)} "
              f"omega={mp.nstr(th.om, 25)} tau={mp.nstr(th.tau, 25)} eta={mp.nstr(th.eta, 25)}")
        # sanity: wp at half periods hits the cubic roots
        for nm, zz, want in (("e1", th.om, th.e1), ("e2", th.om + 1j * th.tau, th.e2),
                             ("e3", 1j * th.tau, th.e3)):
            got = th.wp(zz)
            assert abs(got - want) < mpf(10) ** (-40), (nm, got, want)
        print("   half-period values match roots")
        # Legendre: eta*i*tau' ... eta1*w3 - eta3*w1 = i pi/2
        eta1 = th.zeta(th.om)
        eta3 = th.zeta(1j * th.tau)
        legendre = eta1 * (1j * th.tau) - eta3 * th.om
        assert abs(legendre - 1j * pi / 2) < mpf(10) ** (-40)
        print(f"   eta = zeta(omega) = {mp.nstr(eta1, 33)}  (legendre ok)")
        # Lame identity: m sn^2(x|m) = wp(x + i tau) + (m+1)/3
        sn = ellipfun('sn')
        for x in (mpf('0.9'), mpf('2.3')):
            lhs = mpf(m) * sn(x, m=mpf(m)) ** 2
            rhs = th.wp(x + 1j * th.tau) + (mpf(m) + 1) / 3
            assert abs(lhs - rhs) < mpf(10) ** (-40), (x, lhs, rhs)
        print("   Lame identity holds at 1e-40")
        # displacement superpotential checks: alpha = zeta(x^) - zeta(x^+d) + zeta(d)
        d = mpf('0.7')
        eps = -th.wp(d) / 2
        for x in (mpf('0.37'), mpf('1.9')):
            xh = x + 1j * th.tau
            al = th.zeta(xh) - th.zeta(xh + d) + th.zeta(d)
            assert abs(al.imag) < mpf(10) ** (-40)
            V = th.wp(xh) .real
            Vd = th.wp(xh + d).real
            assert abs(al ** 2 - (V + Vd - 2 * eps)) < mpf(10) ** (-38)
        print("   zeta-form alpha satisfies alpha^2 = V + V(+d) - 2 eps")

        for nm, fn_th, fn_la in (("wp", th.wp, la.wp), ("wpp", th.wp_prime, la.wp_prime),
                                 ("zeta", th.zeta, la.zeta), ("sigma", th.sigma, la.sigma)):
            for z in (mpf(1) if m == 0.5 else mpf('0.8'), mpc('0.7', '0.3')):
                show(f"   {nm}({mp.nstr(mpc(z), 8)}) m={m}", fn_th(mpc(z)), fn_la(z))
        print()


if __name__ == "__main__":
    main()
