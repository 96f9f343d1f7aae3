"""Recompute the frozen constants used by the C++ unit tests.

Each value here comes from a route independent of the library code:
mpmath at 50 digits, a from-scratch mt19937_64, or scipy's L-BFGS-B.
"""
import itertools
import math

import mpmath
import numpy as np
from scipy.optimize import minimize

mpmath.mp.dps = 50


def sigmoid_reward():
    # gamma=2, Sigmoid(k=1, c=0.2), schedule (0, 3), delta=0.5
    b = lambda i: 1 / (1 + mpmath.e ** (-mpmath.mpf("0.2") * i))
    return b(0) + b(1) - 2 * mpmath.mpf("0.5") ** 3


def cubic_root():
    # root of x^3 / (1 + x) = 2^-10 on [2^-10, 1]
    f = lambda x: x**3 / (1 + x) - mpmath.mpf(2) ** -10
    lo, hi = mpmath.mpf(2) ** -10, mpmath.mpf(1)
    for _ in range(200):
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class MT19937_64:
    w, n, m, r = 64, 312, 156, 31
    a = 0xB5026F5AA96619E9
    u, d = 29, 0x5555555555555555
    s, b = 17, 0x71D67FFFEDA60000
    t, c = 37, 0xFFF7EEE000000000
    l = 43
    f = 6364136223846793005
    mask = (1 << 64) - 1

    def __init__(self, seed):
        self.mt = [seed & self.mask]
        for i in range(1, self.n):
            prev = self.mt[-1]
            self.mt.append((self.f * (prev ^ (prev >> 62)) + i) & self.mask)
        self.index = self.n

    def twist(self):
        upper = (~((1 << self.r) - 1)) & self.mask
        lower = (1 << self.r) - 1
        for i in range(self.n):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % self.n] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= self.a
            self.mt[i] = self.mt[(i + self.m) % self.n] ^ xa
        self.index = 0

    def __call__(self):
        if self.index >= self.n:
            self.twist()
        y = self.mt[self.index]
        self.index += 1
        y ^= (y >> self.u) & self.d
        y ^= (y << self.s) & self.b
        y ^= (y << self.t) & self.c
        y ^= y >> self.l
        return y & self.mask


def random_schedule(seed, m, horizon):
    eng = MT19937_64(seed)
    draws = []
    while len(draws) < m - 2:
        t = (eng() >> 11) * 2.0**-53 * horizon
        if 0.0 < t < horizon:
            draws.append(t)
    return [0.0] + sorted(draws) + [horizon]


def loss(times, delta):
    return sum(delta ** (ti - tj) for tj, ti in itertools.combinations(sorted(times), 2))


def lbfgs_schedule(m, horizon, delta):
    fun = lambda x: loss([0.0, *x, horizon], delta)
    x0 = np.linspace(0, horizon, m)[1:-1]
    res = minimize(fun, x0, method="L-BFGS-B", bounds=[(0, horizon)] * (m - 2),
                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10000})
    return [0.0, *sorted(res.x), horizon], res.fun


if __name__ == "__main__":
    print("sigmoid reward      ", mpmath.nstr(sigmoid_reward(), 20))
    print("cubic root          ", mpmath.nstr(cubic_root(), 20))
    eng = MT19937_64(5489)
    for _ in range(9999):
        eng()
    print("mt19937_64 #10000   ", eng())
    print("random seed 42 m4 T10", [repr(x) for x in random_schedule(42, 4, 10.0)])
    print("uniform m5 T20 d0.7 ", repr(loss([0, 5, 10, 15, 20], 0.7)))
    print("m5 T0.1 d0.999      ", lbfgs_schedule(5, 0.1, 0.999))
    print("m4 T12 d0.5         ", lbfgs_schedule(4, 12.0, 0.5))
