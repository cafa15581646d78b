"""Independent high-precision oracles for values frozen into the unit tests.

Run with: python3 oracle_values.py
"""
import mpmath as mp

mp.mp.dps = 40

# Regularized lower gamma P(2, 1) from a 200-term power series.
def p_series(a, x, terms=200):
    s = mp.mpf(0)
    for n in range(terms):
        s += mp.power(-1, n) * mp.power(x, a + n) / (mp.factorial(n) * (a + n))
    return s / mp.gamma(a)

print("P(2,1)", p_series(2, 1))

# Residue series by direct summation and as the integral it resums.
def residue(delta, x, k, j, alpha, terms=80):
    x = mp.mpf(x)
    s = mp.mpf(0)
    for t in range(terms):
        s += (-x) ** t / (mp.factorial(t) * (t + delta) * (alpha * (t + delta) + 2 * (k + j)))
    return x ** delta * s

def residue_integral(delta, x, k, j, alpha):
    return mp.quad(lambda u: mp.gammainc(delta, 0, x * u ** alpha) * u ** (2 * (k + j) - 1), [0, 1])

print("residue(1,0.1,1,0,3) sum", residue(1, 0.1, 1, 0, 3))
print("residue(1,0.1,1,0,3) int", residue_integral(1, 0.1, 1, 0, 3))
print("residue(2,5,1,1,3) sum", residue(2, 5, 1, 1, 3))
print("residue(2,5,1,1,3) int", residue_integral(2, 5, 1, 1, 3))

print("ln C(60,30)", mp.log(mp.binomial(60, 30)), mp.binomial(60, 30))

# Default scenario.
R, eps, alpha, D, lam, snr = 2, mp.mpf('0.5'), 3, 30, mp.mpf('1e-3'), mp.mpf(10) ** 6
rho = mp.mpf('0.5')
beta = 1 / (1 - rho ** 2)

def alloc(K):
    share = 1 - eps * mp.power(2, -R)
    z = [mp.mpf(0)] * K
    above = mp.mpf(0)
    for k in range(K - 1, 0, -1):
        z[k] = (1 - above) * share
        above += z[k]
    z[0] = 1 - above
    return z

def theta(K, k):
    z = alloc(K)
    return min(z[i - 1] / (2 ** R - 1) - sum(z[:i - 1]) for i in range(k, K + 1))

print("alloc3", alloc(3))
print("theta K=2 k=1", theta(2, 1))
for K in (1, 2, 3):
    print("theta K=%d" % K, [theta(K, k) for k in range(1, K + 1)])

def cond(K, k, d, snr=snr):
    arg = beta / (snr * theta(K, k) * d ** -alpha)
    return mp.gammainc(2, 0, arg, regularized=True), arg

print("conditional K=2 k=1 d=30", cond(2, 1, 30))

def pdf(k, K, x, D):
    F = (x / D) ** 2
    return k * mp.binomial(K, k) * F ** (k - 1) * (1 - F) ** (K - k) * 2 * x / D ** 2

def avg_given(K, k, snr=snr, D=D):
    return mp.quad(lambda x: cond(K, k, x, snr)[0] * pdf(k, K, x, D), [0, D / 4, D / 2, D])

def pmf(D=D):
    mu = mp.pi * D ** 2 * lam
    p = [mp.exp(-mu) * mu ** K / mp.factorial(K) for K in range(3)]
    p.append(1 - sum(p))
    return p

def avg(k, snr=snr, D=D):
    p = pmf(D)
    return sum(p[K] * avg_given(K, k, snr, D) for K in range(k, 4))

for K in (1, 2, 3):
    for k in range(1, K + 1):
        print("pbar K=%d k=%d" % (K, k), avg_given(K, k))
for k in (1, 2, 3):
    print("ptilde k=%d" % k, avg(k))
for db in (50, 55):
    for k in (1, 2, 3):
        print("ptilde %d dB k=%d" % (db, k), avg(k, mp.mpf(10) ** (mp.mpf(db) / 10)))

def goodput(snr=snr, D=D):
    mu = mp.pi * D ** 2 * lam
    total = 0
    for k in (1, 2, 3):
        pge = mp.gammainc(k, 0, mu, regularized=True)
        total += 2 * R * (pge - avg(k, snr, D))
    return total

print("goodput defaults", goodput())
print("pmf", pmf())
