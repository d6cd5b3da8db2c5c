"""Independent reference computations for the frozen test fixtures.

Written directly from the formulas with numpy, without touching the C++
library. Run with `python3 tests/oracles/derive_fixtures.py`; the printed
values are pasted into the unit tests.
"""
import numpy as np


def laplacian(D, w, mu, b):
    b = max(b, 0.05)
    d = np.arange(D, dtype=float)
    e = np.exp(-np.abs(d - mu) / b)
    return w * e / e.sum()


def peel(p, eps=1e-3, sig=1e-3):
    p = np.array(p, dtype=float)
    out = []
    while p.max() > eps:
        l = r = int(np.argmax(p))
        while l - 1 >= 0 and p[l] - p[l - 1] > sig:
            l -= 1
        while r + 1 <= len(p) - 1 and p[r] - p[r + 1] > sig:
            r += 1
        seg = p[l:r + 1]
        d = np.arange(l, r + 1)
        w = seg.sum()
        mu = (seg / w * d).sum()
        b = (seg / w * np.abs(d - mu)).sum()
        out.append((w, mu, b, l, r))
        p[l:r + 1] = 0
    return out


np.set_printoptions(precision=17)
print("laplacian D=5 (1,2,1):", [repr(v) for v in laplacian(5, 1, 2, 1)])

print("fixture A:", peel([0, 0.1, 0.8, 0.1, 0]))
print("fixture B:", peel([0.05, 0.45, 0.05, 0, 0.05, 0.35, 0.05]))

# Two-member fusion example: members at 30.2 and 29.8, label 30.
D = 96
members = [laplacian(D, 1, 30.2, 0.8), laplacian(D, 1, 29.8, 0.8)]
members = [m / m.sum() for m in members]
fits = [peel(m) for m in members]
print("member fits:", fits)
ws = [f[0][0] for f in fits] + [1.0]
bs = [f[0][2] for f in fits] + [0.8]
print("fused w:", repr(np.mean(ws)), "fused b:", repr(np.mean(bs)))

# Reconstruction L1 of a 2-Laplacian mixture.
p = laplacian(D, 0.5, 20, 1.5) + laplacian(D, 0.5, 60, 1.5)
p /= p.sum()
modes = peel(p)
rec = sum(laplacian(D, w, mu, b) for (w, mu, b, _, _) in modes)
print("two-mode reconstruction L1:", np.abs(rec - p).sum(), "modes:", len(modes))

# Over-smoothing fixture: 0.6 at 20, 0.4 at 60.
q = np.zeros(D); q[20] = 0.6; q[60] = 0.4
print("soft-argmin:", (q * np.arange(D)).sum(), "dme:", max(peel(q))[1])

# Superimposition of two misaligned unit Laplacians (b=0.8) at 10 and 12.
a = laplacian(32, 1, 10, 0.8); c = laplacian(32, 1, 12, 0.8)
avg = (a + c) / 2
maxima = [i for i in range(1, 31) if avg[i] > avg[i - 1] and avg[i] > avg[i + 1]]
print("average local maxima:", maxima)

# Uniform 4-bin cross entropy against one-hot.
print("log 4:", repr(np.log(4)))
