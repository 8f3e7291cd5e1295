"""Regenerates the frozen closed-form reference values used by the Rust tests.

Evaluates every formula directly at 60 significant digits with mpmath; no
log-space tricks, no shared code with the Rust implementation.

    python3 bounds_oracle.py
"""
from mpmath import mp, mpf, exp, log, sqrt, binomial, floor

mp.dps = 60


def psi(n, tau, gr):
    tau = mpf(tau)
    return exp(-2 * gr * (n - 1) * (1 - exp(-tau)) * tau)


def t_bound_psi(n, k, p):
    p = mpf(p)
    x = sum(
        sum(binomial(n, i) * (1 - p) ** i * p ** (n - i) for i in range(n - j + 1, n + 1))
        for j in range(1, k + 1)
    ) / k
    return 2 * x - x * x


def t_bound(n, k, tau, gr):
    return t_bound_psi(n, k, psi(n, tau, gr))


def s_bound(n, m, tau, ge):
    tau = mpf(tau)
    y = m * (1 / (1 + mpf(ge))) ** ((n - 1) * (1 - exp(-tau)))
    return 2 * y - y * y


def big_b(k, et):
    return (binomial(k, k // 2) * (1 + k * sqrt(1 - mpf(et)))) ** (mpf(1) / k) - 1


def tau_upper(n, k, gr, et):
    return sqrt(-log(big_b(k, et)) / (2 * gr * (n - 1)))


def tau_lower(n, m, ge, es):
    a = 1 + log((1 - sqrt(1 - mpf(es))) / m) / ((n - 1) * log(1 + mpf(ge)))
    return -log(a)


def m_ratio(n, k, gr, ge, et, es):
    e = sqrt(-(n - 1) * log(big_b(k, et)) / (2 * mpf(gr)))
    return (1 - sqrt(1 - mpf(es))) / (1 / (1 + mpf(ge))) ** e


cases = [
    ("psi_5_0.5_1", psi(5, "0.5", 1)),
    ("psi_12_1.3_0.7", psi(12, "1.3", mpf("0.7"))),
    ("tb_psi_2_1_0.5", t_bound_psi(2, 1, "0.5")),
    ("tb_10_3_0.2_1", t_bound(10, 3, "0.2", 1)),
    ("tb_10_10_0.2_1", t_bound(10, 10, "0.2", 1)),
    ("tb_80_40_0.05_0.5", t_bound(80, 40, "0.05", mpf("0.5"))),
    ("sb_2_1_50_1", s_bound(2, 1, 50, 1)),
    ("sb_10_1_0.7_1", s_bound(10, 1, "0.7", 1)),
    ("sb_20_3_1.5_2", s_bound(20, 3, "1.5", 2)),
    ("tu_5_1_1_0.1", tau_upper(5, 1, 1, "0.1")),
    ("tu_10_1_1_0.1", tau_upper(10, 1, 1, "0.1")),
    ("tu_10_3_1_0.99", tau_upper(10, 3, 1, "0.99")),
    ("b_2_0.5", big_b(2, "0.5")),
    ("tl_10_1_1_0.1", tau_lower(10, 1, 1, "0.1")),
    ("tl_50_4_2_0.05", tau_lower(50, 4, 2, "0.05")),
    ("mr_5_1_1_1_0.1_0.1", m_ratio(5, 1, 1, 1, "0.1", "0.1")),
    ("mr_1000_1_1_1_0.1_0.1", m_ratio(1000, 1, 1, 1, "0.1", "0.1")),
    ("mr_5000_3_1_1_0.99_0.2", m_ratio(5000, 3, 1, 1, "0.99", "0.2")),
]
for name, v in cases:
    print(f"{name} {mp.nstr(v, 25)}")
