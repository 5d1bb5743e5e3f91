"""Recompute the fan64 segment endpoints from first principles.

Shares no code with the C++ library: mt19937_64, the seed mixer and the
Halton placement are written out again here. Output: one line per segment,
`x_lo y_lo x_hi y_hi`, sorted by direction angle.
"""
import math
import sys

MASK = (1 << 64) - 1


def splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK
    return x ^ (x >> 31)


def derive_seed(master, stream):
    return splitmix64(master ^ splitmix64((stream + 0x632BE59BD9B4E019) & MASK))


class MT64:
    N, M = 312, 156

    def __init__(self, seed):
        self.mt = [0] * self.N
        self.mt[0] = seed & MASK
        for i in range(1, self.N):
            prev = self.mt[i - 1]
            self.mt[i] = (6364136223846793005 * (prev ^ (prev >> 62)) + i) & MASK
        self.idx = self.N

    def _twist(self):
        upper, lower = 0xFFFFFFFF80000000, 0x7FFFFFFF
        for i in range(self.N):
            x = (self.mt[i] & upper) | (self.mt[(i + 1) % self.N] & lower)
            xa = x >> 1
            if x & 1:
                xa ^= 0xB5026F5AA96619E9
            self.mt[i] = self.mt[(i + self.M) % self.N] ^ xa
        self.idx = 0

    def next(self):
        if self.idx >= self.N:
            self._twist()
        x = self.mt[self.idx]
        self.idx += 1
        x ^= (x >> 29) & 0x5555555555555555
        x ^= (x << 17) & 0x71D67FFFEDA60000
        x ^= (x << 37) & 0xFFF7EEE000000000
        x ^= x >> 43
        return x & MASK

    def uniform(self):
        return (self.next() >> 11) * 2.0**-53


def radical_inverse(i, base):
    inv = 1.0 / base
    f, r = inv, 0.0
    while i > 0:
        r += f * (i % base)
        i //= base
        f *= inv
    return r


def main():
    n, half = 64, 2.0
    rng = MT64(derive_seed(20140601, 0))
    shift = (rng.uniform(), rng.uniform())
    grid = float(1 << 20)
    rows = []
    for k in range(n):
        a = math.pi * k / n
        v = (math.cos(a), math.sin(a))
        c = []
        for i, base in enumerate((2, 3)):
            u = radical_inverse(k + 1, base) + shift[i]
            u -= math.floor(u)
            u = (math.floor(u * grid) + 0.5) / grid
            c.append(-half + 2.0 * half * u)
        lo = (c[0] - 0.5 * v[0], c[1] - 0.5 * v[1])
        hi = (c[0] + 0.5 * v[0], c[1] + 0.5 * v[1])
        rows.append((a, lo, hi))
    rows.sort()
    out = open(sys.argv[1], "w") if len(sys.argv) > 1 else sys.stdout
    for _, lo, hi in rows:
        out.write("%.17g %.17g %.17g %.17g\n" % (lo[0], lo[1], hi[0], hi[1]))


if __name__ == "__main__":
    main()
