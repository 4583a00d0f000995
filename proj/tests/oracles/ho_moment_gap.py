"""Energy second moment of the HO superposition (phi0 + phi2)/sqrt(2) at t = pi/4.

Units hbar = m = omega = 1. Prints the QM value <H^2>, the Kolmogorov value
E[E^2] = int (Re conj(psi) H psi)^2 / rho and their gap, using symbolic
Hermite functions and mpmath quadrature at 30 digits.
"""
import mpmath as mp
import sympy as sp

mp.mp.dps = 30
x = sp.symbols("x", real=True)


def phi(n):
    return sp.hermite(n, x) * sp.exp(-x**2 / 2) / sp.sqrt(2**n * sp.factorial(n) * sp.sqrt(sp.pi))


t = sp.pi / 4
e0, e2 = sp.Rational(1, 2), sp.Rational(5, 2)
psi = (phi(0) * sp.exp(-sp.I * e0 * t) + phi(2) * sp.exp(-sp.I * e2 * t)) / sp.sqrt(2)
hpsi = -sp.diff(psi, x, 2) / 2 + x**2 / 2 * psi
num = sp.expand(sp.conjugate(psi) * hpsi)
re_num = sp.lambdify(x, sp.re(num), "mpmath")
rho = sp.lambdify(x, sp.expand(sp.conjugate(psi) * psi).as_real_imag()[0], "mpmath")
im_num = sp.lambdify(x, sp.im(num), "mpmath")

kolmogorov = mp.quad(lambda s: re_num(s) ** 2 / rho(s), [-mp.inf, 0, mp.inf])
gap = mp.quad(lambda s: im_num(s) ** 2 / rho(s), [-mp.inf, 0, mp.inf])
qm = (e0**2 + e2**2) / 2
print("qm", mp.nstr(mp.mpf(qm), 20))
print("kolmogorov", mp.nstr(kolmogorov, 20))
print("gap", mp.nstr(gap, 20))
print("check", mp.nstr(mp.mpf(qm) - kolmogorov - gap, 5))
