"""Independent oracle values frozen into the C++ unit tests.

Run with: python3 tests/oracles/oracles.py
Uses sympy/mpmath at 40 significant digits; nothing here touches the C++ code.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 40


def show(name, value):
    print(f"{name:48s} {mp.nstr(mp.mpf(value), 20)}")


# Ito integrals for the order-1.5 scheme at h=0.01, u1=0.5, u2=-0.5
h, u1, u2 = sp.Rational(1, 100), sp.Rational(1, 2), sp.Rational(-1, 2)
I1 = sp.sqrt(h) * u1
I10 = sp.Rational(1, 2) * h ** sp.Rational(3, 2) * (u1 + u2 / sp.sqrt(3))
I11 = (I1 ** 2 - h) / 2
I01 = h * I1 - I10
I111 = (sp.Rational(1, 3) * I1 ** 2 - h) * I1 / 2
for n, v in [("ito.I1", I1), ("ito.I10", I10), ("ito.I11", I11), ("ito.I01", I01), ("ito.I111", I111)]:
    show(n, sp.N(v, 40))

# Stratonovich powers at j1 = 2
j = sp.Integer(2)
print("strat(2):", [j ** k / sp.factorial(k) for k in range(1, 7)])

# Strong 1.5 step for GBM, written from the symbolic coefficient functions
x, r, s = sp.symbols("x r s", positive=True)
mu = r * x
sig = s * x
subs = {x: 100, r: sp.Rational(5, 100), s: sp.Rational(2, 10)}
h = sp.Rational(1, 100)
I1 = sp.sqrt(h) * 1
I10 = sp.Rational(1, 2) * h ** sp.Rational(3, 2) * (1 + 0 / sp.sqrt(3))
I11 = (I1 ** 2 - h) / 2
I01 = h * I1 - I10
I111 = (sp.Rational(1, 3) * I1 ** 2 - h) * I1 / 2
mup, mupp = sp.diff(mu, x), sp.diff(mu, x, 2)
sp_, spp = sp.diff(sig, x), sp.diff(sig, x, 2)
step15 = (x + mu * h + sig * I1 + sig * sp_ * I11 + sig * mup * I10
          + (mu * mup + sp.Rational(1, 2) * sig ** 2 * mupp) * h ** 2 / 2
          + (mu * sp_ + sp.Rational(1, 2) * sig ** 2 * spp) * I01
          + sig * (sig * spp + sp_ ** 2) * I111)
show("strong15.gbm(x=100,h=.01,u1=1,u2=0)", sp.N(step15.subs(subs), 40))

# Strong 2 / strong 3 GBM steps at r=.05, sigma=.2, x=100, h=.01, dW=.1
dW = sp.Rational(1, 10)
rr, ss = sp.Rational(5, 100), sp.Rational(2, 10)
mb = rr - ss ** 2 / 2
J = [None] + [dW ** k / sp.factorial(k) for k in range(1, 7)]
X = 100
s2 = X * (1 + mb * h + ss * J[1] + ss ** 2 * J[2] + mb * ss * h * J[1] + mb ** 2 * h ** 2 / 2
          + ss ** 3 * J[3] + mb * ss ** 2 * h * J[2] + ss ** 4 * J[4])
s3 = s2 + X * (mb ** 2 * ss * h ** 2 / 2 * J[1] + mb * ss ** 3 * h * J[3] + ss ** 5 * J[5]
               + mb ** 3 * h ** 3 / 6 + ss ** 6 * J[6] + mb ** 2 * ss ** 2 * h ** 2 / 2 * J[2]
               + mb * ss ** 4 * h * J[4])
show("strong2.gbm", sp.N(s2, 40))
show("strong3.gbm", sp.N(s3, 40))
# cross-check: strong3 is the degree-6-weight truncation of exp(mb*h + s*dW)
show("exp reference", sp.N(X * sp.exp(mb * h + ss * dW), 40))

# CEV local vol: sigma_fn = 0.2 x^-0.1  => sigma(x) = 0.2 x^0.9
cev = sp.Rational(2, 10) * x ** sp.Rational(-1, 10) * x
show("cev.sigma(100)", sp.N(cev.subs(x, 100), 40))
show("cev.dsigma(100)", sp.N(sp.diff(cev, x).subs(x, 100), 40))
show("cev.d2sigma(100)", sp.N(sp.diff(cev, x, 2).subs(x, 100), 40))
show("cev.sigma(37.5)", sp.N(cev.subs(x, sp.Rational(75, 2)), 40))
show("cev.dsigma(37.5)", sp.N(sp.diff(cev, x).subs(x, sp.Rational(75, 2)), 40))
show("cev.d2sigma(37.5)", sp.N(sp.diff(cev, x, 2).subs(x, sp.Rational(75, 2)), 40))

# Black-Scholes closed forms (S0=K=100, r=.05, sigma=.2, T=1)
S0, K, r_, v, T = mp.mpf(100), mp.mpf(100), mp.mpf("0.05"), mp.mpf("0.2"), mp.mpf(1)
d1 = (mp.log(S0 / K) + (r_ + v ** 2 / 2) * T) / (v * mp.sqrt(T))
d2 = d1 - v * mp.sqrt(T)
call = S0 * mp.ncdf(d1) - K * mp.exp(-r_ * T) * mp.ncdf(d2)
show("bs.call", call)
show("bs.delta N(d1)", mp.ncdf(d1))
show("digital appendix 5e^-rT(1+N(d2))", 5 * mp.exp(-r_ * T) * (1 + mp.ncdf(d2)))
show("digital H price e^-rT N(d2)", mp.exp(-r_ * T) * mp.ncdf(d2))
show("digital H delta", mp.exp(-r_ * T) * mp.npdf(d2) / (S0 * v * mp.sqrt(T)))
show("exp(0.03)*100", 100 * mp.exp(mp.mpf("0.03")))
show("10 e^-0.05", 10 * mp.exp(mp.mpf("-0.05")))

# CRR and JR lattices at r=.05, sigma=.2, h=.01
hh = mp.mpf("0.01")
U = mp.exp(v * mp.sqrt(hh)); D = 1 / U
show("crr.U", U); show("crr.D", D); show("crr.p", (mp.exp(r_ * hh) - D) / (U - D))
show("crr.p r=0", (1 - D) / (U - D))
Uj = mp.exp((r_ - v ** 2 / 2) * hh + v * mp.sqrt(hh)); Dj = mp.exp((r_ - v ** 2 / 2) * hh - v * mp.sqrt(hh))
show("jr.U", Uj); show("jr.D", Dj)

# CRR lattice European price, n = 1024, T = 1
n = 1024
hn = T / n
U = mp.exp(v * mp.sqrt(hn)); D = 1 / U
p = (mp.exp(r_ * hn) - D) / (U - D)
tot = mp.mpf(0)
for k in range(n + 1):
    st = S0 * U ** k * D ** (n - k)
    if st > K:
        tot += mp.binomial(n, k) * p ** k * (1 - p) ** (n - k) * (st - K)
show("crr n=1024 discounted call", mp.exp(-r_ * T) * tot)

# Binomial tails used for median boosting
def tail(n, p, k):
    return sum(mp.binomial(n, j) * mp.mpf(p) ** j * (1 - mp.mpf(p)) ** (n - j) for j in range(k, n + 1))
show("P(Bin(15,1/4) >= 8)", tail(15, "0.25", 8))
show("P(Bin(13,1/4) >= 7)", tail(13, "0.25", 7))
show("P(Bin(11,1/4) >= 6)", tail(11, "0.25", 6))
show("ceil(4 log2 10)", mp.ceil(4 * mp.log(10, 2)))
