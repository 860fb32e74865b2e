"""High-precision reference values frozen into the C++ unit tests.

Evaluates each closed-form model expression directly with mpmath at 40
digits. Re-run with `python3 tests/oracles/scalar_oracles.py` after changing
any calibration constant.
"""
from mpmath import mp, mpf, log, exp

mp.dps = 40

alpha = mpf("1.45")
delta = mpf(5)
gamma = mpf("0.3")
pi2 = mpf("0.00236")
theta2 = mpf("2.6")

L0 = mpf("7.403")
L1 = L0 * (mpf("11.5") / L0) ** mpf("0.134")
print("L1 =", mp.nstr(L1, 20))

c = mpf(30)
u = delta * L0 / (1 - alpha) * ((c / L0) ** (1 - alpha) - 1)
print("utility(c=30, L=7.403) =", mp.nstr(u, 20))

A0 = mpf("5.115")
K0 = mpf(223)
Y0 = A0 * K0**gamma * L0 ** (1 - gamma)
print("gross_output(t=0) =", mp.nstr(Y0, 20))

sigma0 = mpf("35.85") / (mpf("105.5") * (1 - mpf("0.03")))
print("sigma0 =", mp.nstr(sigma0, 20))

tat0 = mpf("0.85")
omega_mu1 = 1 - sigma0 * 550 * mpf(1) / (1000 * theta2) - pi2 * tat0**2
print("damage_abatement(mu=1, t=0, T=0.85) =", mp.nstr(omega_mu1, 20))

mu = mpf("0.03")
omega = 1 - sigma0 * 550 * mu**theta2 / (1000 * theta2) - pi2 * tat0**2
print("net_output(t=0, mu=0.03) =", mp.nstr(omega * Y0, 20))
print("emissions(t=0, mu=0.03) =", mp.nstr((1 - mu) * sigma0 * Y0 + mpf("2.6"), 20))

price = 550 * (1 - mpf("0.025")) ** 10 * mpf("0.5") ** (theta2 - 1)
print("carbon_price(mu=0.5, t=10) =", mp.nstr(price, 20))

print("q(p=0.01) =", mp.nstr((1 - mpf("0.01")) ** 5, 20))

# productivity and emission-intensity paths, t = 1 and 2
ga = lambda s: mpf("0.076") * exp(-mpf("0.005") * delta * s)
A1 = A0 / (1 - ga(0))
A2 = A1 / (1 - ga(1))
print("A1 =", mp.nstr(A1, 20), " A2 =", mp.nstr(A2, 20))
g0 = mpf("-0.0152")
sigma1 = sigma0 * exp(g0 * delta)
g1 = g0 * (1 - mpf("0.001")) ** delta
sigma2 = sigma1 * exp(g1 * delta)
print("sigma1 =", mp.nstr(sigma1, 20), " sigma2 =", mp.nstr(sigma2, 20))

# forcing at the initial carbon stock
F0 = mpf("3.6813") * log(mpf(851) / 588, 2) + mpf("0.5")
print("forcing(t=0, M_AT=851) =", mp.nstr(F0, 20))
