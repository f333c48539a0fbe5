"""Independent NumPy/SciPy model used to generate the frozen reference values
in tests/test_reference.cpp. Builds the single-excitation-sector operators by
acting on occupation tuples directly and integrates with scipy's DOP853."""

import itertools
import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

TWO_PI = 2 * np.pi
GHZ, MHZ, US = TWO_PI * 1e9, TWO_PI * 1e6, 1e-6


def device(n, b, xt_multiple, r=1.0):
    d = np.array([-0.5 * GHZ * j for j in range(1, n + 1)])
    w10 = 6.5 * GHZ
    anh = -400 * MHZ
    g1 = abs(d[0]) / b
    g = g1 * np.sqrt(d / d[0])
    g = np.concatenate([g, g])
    gA = g / np.sqrt(2 * n)
    dd = np.concatenate([d, d])
    wc = w10 - dd
    if r != 1.0:
        wc[n:] = w10 - r * d
    gmax = gA.max()
    xt = np.full((2 * n, 2 * n), xt_multiple * gmax)
    np.fill_diagonal(xt, 0.0)
    return dict(n=n, g=g, gA=gA, gt=np.sqrt(2) * g, gtA=np.sqrt(2) * gA, wc=wc,
                w10=w10, w21=w10 + anh, xt=xt)


def modes(n):
    q = [("q", k) for k in range(2 * n)]
    return q + [("A", 0)] + [("c", k) for k in range(2 * n)]


def levels(m):
    return 2 if m[0] == "c" else 3


def sector_states(n, emax):
    ms = modes(n)
    ranges = [range(levels(m)) for m in ms]
    out = [s for s in itertools.product(*ranges) if emax is None or sum(s) <= emax]
    return ms, out


class Space:
    def __init__(self, n, emax=1):
        self.modes, self.states = sector_states(n, emax)
        self.index = {s: i for i, s in enumerate(self.states)}
        self.pos = {m: i for i, m in enumerate(self.modes)}
        self.dim = len(self.states)

    def op(self, factors):
        """factors: list of (mode, dict level_from->(level_to, amplitude)),
        applied right to left."""
        M = np.zeros((self.dim, self.dim), complex)
        for j, s in enumerate(self.states):
            amp, cur = 1.0, list(s)
            for mode, action in reversed(factors):
                p = self.pos[mode]
                if cur[p] not in action:
                    amp = 0.0
                    break
                to, a = action[cur[p]]
                cur[p] = to
                amp *= a
            if amp != 0.0:
                i = self.index.get(tuple(cur))
                if i is not None:
                    M[i, j] += amp
        return M


LOWER = {1: (0, 1.0)}                 # a on a 2-level cavity, also sigma^- (1->0)
RAISE = {0: (1, 1.0)}                 # sigma^+ (0->1) and a^+
S21P = {1: (2, 1.0)}                  # |2><1|
S21M = {2: (1, 1.0)}
S20M = {2: (0, 1.0)}
P1 = {1: (1, 1.0)}
P2 = {2: (2, 1.0)}
NUM = {1: (1, 1.0)}


def hamiltonian_terms(sp, dev):
    n = dev["n"]
    terms = []  # (coefficient, nu, op)
    for k in range(2 * n):
        c, q = ("c", k), ("q", k)
        ops = [
            (dev["g"][k], dev["w10"] - dev["wc"][k], sp.op([(c, LOWER), (q, RAISE)])),
            (dev["gA"][k], dev["w10"] - dev["wc"][k], sp.op([(c, LOWER), (("A", 0), RAISE)])),
            (dev["gt"][k], dev["w21"] - dev["wc"][k], sp.op([(c, LOWER), (q, S21P)])),
            (dev["gtA"][k], dev["w21"] - dev["wc"][k], sp.op([(c, LOWER), (("A", 0), S21P)])),
        ]
        for l in range(k + 1, 2 * n):
            if dev["xt"][k, l] != 0:
                ops.append((dev["xt"][k, l], -(dev["wc"][k] - dev["wc"][l]),
                            sp.op([(c, LOWER), (("c", l), RAISE)])))
        for coef, nu, op in ops:
            terms.append((coef, nu, op))
            terms.append((coef, -nu, op.conj().T))
    return terms


def H(terms, t):
    return sum(c * np.exp(1j * nu * t) * op for c, nu, op in terms)


def channels(sp, n):
    k_inv, g_inv, g21_inv, g20_inv, phi_inv = 5 * US, 10 * US, 5 * US, 25 * US, 5 * US
    out = []
    for k in range(2 * n):
        out.append((1 / k_inv, sp.op([(("c", k), LOWER)])))
    for q in [("q", k) for k in range(2 * n)] + [("A", 0)]:
        out += [(1 / g_inv, sp.op([(q, LOWER)])), (1 / g21_inv, sp.op([(q, S21M)])),
                (1 / g20_inv, sp.op([(q, S20M)])), (1 / phi_inv, sp.op([(q, P1)])),
                (1 / phi_inv, sp.op([(q, P2)]))]
    return out


def w(sp, n, primed):
    v = np.zeros(sp.dim, complex)
    for k in range(n):
        s = [0] * len(sp.modes)
        s[sp.pos[("q", k + (n if primed else 0))]] = 1
        v[sp.index[tuple(s)]] = 1 / np.sqrt(n)
    return v


def transfer_time(dev):
    n = dev["n"]
    delta = dev["w10"] - dev["wc"][0]
    lam = dev["g"][0] * dev["gA"][0] / delta
    return np.pi / (np.sqrt(2 * n) * abs(lam))


def lindblad_run(n, b, xt, r=1.0, samples=1001):
    dev = device(n, b, xt, r)
    T = transfer_time(device(n, b, xt))
    sp = Space(n)
    terms = hamiltonian_terms(sp, dev)
    ch = channels(sp, n)
    K = sum(rate * L.conj().T @ L for rate, L in ch)
    psi0, target = w(sp, n, False), w(sp, n, True)
    d = sp.dim
    Nops = [sp.op([(("c", k), NUM)]) for k in range(2 * n)]

    def rhs(t, y):
        rho = y.reshape(d, d)
        h = H(terms, t)
        out = -1j * (h @ rho - rho @ h) - 0.5 * (K @ rho + rho @ K)
        for rate, L in ch:
            out += rate * L @ rho @ L.conj().T
        return out.ravel()

    ts = np.linspace(0, T, samples)
    sol = solve_ivp(rhs, (0, T), np.outer(psi0, psi0.conj()).ravel().astype(complex), method="DOP853",
                    t_eval=ts, rtol=1e-11, atol=1e-13)
    rhos = sol.y.T.reshape(-1, d, d)
    F = np.sqrt(np.real(target.conj() @ rhos[-1] @ target))
    photons = [np.trapezoid([np.real(np.trace(N @ rho)) for rho in rhos], ts) / T for N in Nops]
    return T, F, photons


def closed_n1(b=9.0, steps=20000):
    dev = device(1, b, 0.01)
    T = transfer_time(dev)
    sp = Space(1, None)
    terms = hamiltonian_terms(sp, dev)
    psi = np.zeros(sp.dim, complex)
    s = [0] * len(sp.modes)
    s[sp.pos[("q", 0)]] = 1
    psi[sp.index[tuple(s)]] = 1
    target = np.zeros(sp.dim, complex)
    s = [0] * len(sp.modes)
    s[sp.pos[("q", 1)]] = 1
    target[sp.index[tuple(s)]] = 1
    h = T / steps
    for i in range(steps):
        psi = expm(-1j * h * H(terms, (i + 0.5) * h)) @ psi
    return T, sp.dim, abs(target.conj() @ psi)


if __name__ == "__main__":
    np.set_printoptions(precision=17)
    dev = device(3, 9.0, 0.0)
    delta = dev["w10"] - dev["wc"]
    print("g_mhz", dev["g"][:3] / MHZ)
    print("gA_mhz", dev["gA"][:3] / MHZ)
    chi = dev["g"][0] ** 2 / delta[0]
    print("chi_mhz", repr(chi / MHZ))
    lam = dev["g"][0] * dev["gA"][0] / delta[0]
    print("lambda_mhz", repr(lam / MHZ))
    print("t_transfer_us", repr(transfer_time(dev) / US))
    print("Q", [repr(w * 5 * US) for w in dev["wc"][:3]])
    T, dim, F = closed_n1()
    print("n1 closed full basis dim", dim, "F", repr(F))
    for xt in (0.0, 0.01, 0.1):
        T, F, ph = lindblad_run(3, 9.0, xt)
        print("lindblad xt", xt, "F", repr(F), "photons", [repr(p) for p in ph])
    for r in (0.9, 1.1):
        T, F, ph = lindblad_run(3, 9.0, 0.01, r)
        print("lindblad r", r, "F", repr(F))
