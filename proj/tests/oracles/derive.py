"""Independent high-precision oracles for constants frozen into the unit tests."""
import numpy as np
from mpmath import mp, mpf, log, sqrt, exp, findroot, zeta, pi, mpc, fabs

mp.dps = 40


def spectrum(K, a, g):
    K, a, g = mpf(K), mpf(a), mpf(g)
    return 1 + a - (K + 1) / (K - 1) * sqrt((1 - a) ** 2 + 4 * K * a**2 * g**2 / (K + 1) ** 2)


def show(name, v):
    print(f"{name:36s} {mp.nstr(v, 17, min_fixed=-30)}")


show("log_product_100_1e-10", 100 * log(mpf("1e-10")))
show("F_2(0.75,0)", spectrum(2, "0.75", 0))
show("F_2(0.8,0.1)", spectrum(2, "0.8", "0.1"))
lam = mpc("0.5", "0.5")
show("spiral_mu(0.5+0.5i)", fabs(lam - 1) / fabs(lam + 1))
show("log_lambda_beta2_d1.5_e-100", mpf("1.5") * -100 - 2 * log(100))
show("log_lambda_beta1_d1_e-10", -10 - log(10))

# eta^2 + 2 ln eta = 10, solved as a root in x = ln eta
show("eta_logpower1_R=e^-5", findroot(lambda e: e**2 + 2 * log(e) - 10, 2.8))

# admissibility infimum for log_power(beta=1), eps=0.1 over 0<r<=s<=1/100, dense grid
Lr = np.linspace(np.log(100), 400, 400001)
best = None
for Ls in np.linspace(np.log(100), 60, 601):
    L = Lr[Lr >= Ls]
    v = np.log(Ls) - np.log(L) + 0.1 * (L - Ls)
    i = int(np.argmin(v))
    if best is None or v[i] < best[0]:
        best = (v[i], L[i], Ls)
print(f"{'admissibility_C_beta1_eps0.1':36s} {np.exp(best[0]):.10f} at log(1/r)={best[1]:.4f} log(1/s)={best[2]:.4f}")

d, K, p = 1, 2, 2
pc = mpf(p) / (p - 1)
delta = 1 + 1 / (d * K * (pc - 1))
show("riesz_delta", delta)
show("riesz_eta1", 2**delta)
show("wolff_series_2..5", sum(mpf(n) ** (-d * K * (pc - 1) * delta) for n in range(2, 6)))
show("zeta3-1", zeta(3) - 1)
show("wolff_area_closed_form_r0=1e-3", pi * log(1000))


def bracket(z, K):
    return np.abs((1 + z) * np.abs(1 + z) ** (1 / K - 1) - 1)


def C0(K, radial, angles):
    rho = np.exp(np.linspace(np.log(1e-8), np.log(1e4), radial))
    th = 2 * np.pi * np.arange(angles) / angles
    z = rho[:, None] * np.exp(1j * th[None, :])
    den = np.minimum(rho, rho ** (1 / K))[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.nanmax(bracket(z, K) / den)


print(f"{'series_C0_K2_960x64':36s} {C0(2, 960, 64):.10f}")
print(f"{'series_C0_K2_1920x128':36s} {C0(2, 1920, 128):.10f}")
print(f"{'series_C0_K2_fine':36s} {C0(2, 20000, 4096):.10f}")

# dimension-zero schedule in high precision
mp.dps = 200
n = 50
lr = [mpf(0)] * (n + 1)
lrt = [mpf(0)] * (n + 1)
for k in range(n + 1):
    if k > 0:
        lr[k] = lrt[k - 1] - log(4)
    e = max(k, 1)
    lrt[k] = e * e * lr[k]
a, g = mpf("0.6"), mpf("0.5")
lb = (a - 1) * sum(lrt[k] - lr[k] for k in range(n))
show("dimzero_error_n50", fabs(lb / lrt[n]))
show("dimzero_bound_n50", 2 * (1 - a) * n * lrt[n - 1] / lrt[n])
show("dimzero_stretch_n50", a + lb / lrt[n] - (a - 1) * lr[n] / lrt[n])
phase = sum(lrt[k] - lr[k] for k in range(n + 1))
show("dimzero_rotation_n50", a * g * phase / (a * lrt[n] + lb - (a - 1) * lr[n]))
show("dimzero_log_rt4", lrt[4])
