"""Reference computations independent of the package code paths.

* ``mp_*``: closed forms evaluated in 50-digit arithmetic with mpmath,
  written out term by term.
* ``covariance_*``: symplectic eigenvalues computed numerically from the
  explicit entangling-cloner covariance matrices (EPR source, lossy noisy
  channel, detector modelled as a beamsplitter plus an EPR-purified noise
  mode, homodyne conditioning).
"""

import math

import mpmath as mp
import numpy as np

mp.mp.dps = 50


def mp_terms(v_a, t, eps, eta, nu_el):
    v_a, t, eps, eta, nu_el = (mp.mpf(x) for x in (v_a, t, eps, eta, nu_el))
    big_v = v_a + 1
    line = 1 / t - 1 + eps
    hom = (1 + nu_el) / eta - 1
    tot = line + hom / t
    return big_v, line, hom, tot


def mp_i_ab(v_a, t, eps, eta, nu_el):
    big_v, _, _, tot = mp_terms(v_a, t, eps, eta, nu_el)
    return mp.log((big_v + tot) / (1 + tot), 2) / 2


def mp_i_be(v_a, t, eps, eta, nu_el):
    big_v, line, hom, tot = mp_terms(v_a, t, eps, eta, nu_el)
    t, eta = mp.mpf(t), mp.mpf(eta)
    var_b = eta * t * (big_v + tot)
    var_b_e = eta * (1 / (t * (1 / big_v + line)) + hom)
    return mp.log(var_b / var_b_e, 2) / 2


def mp_g(x):
    x = mp.mpf(x)
    if x == 0:
        return mp.mpf(0)
    return (x + 1) * mp.log(x + 1, 2) - x * mp.log(x, 2)


def mp_eigen(v_a, t, eps, eta, nu_el):
    big_v, line, hom, tot = mp_terms(v_a, t, eps, eta, nu_el)
    t = mp.mpf(t)
    a = big_v ** 2 * (1 - 2 * t) + 2 * t + t ** 2 * (big_v + line) ** 2
    b = t ** 2 * (big_v * line + 1) ** 2
    c = (big_v * mp.sqrt(b) + t * (big_v + line) + a * hom) / (t * (big_v + tot))
    d = mp.sqrt(b) * (big_v + mp.sqrt(b) * hom) / (t * (big_v + tot))
    lam = []
    for s, p in ((a, b), (c, d)):
        root = mp.sqrt(max(s * s - 4 * p, mp.mpf(0)))
        lam.append(mp.sqrt((s + root) / 2))
        lam.append(mp.sqrt((s - root) / 2))
    return a, b, c, d, lam


def mp_chi_be(v_a, t, eps, eta, nu_el):
    *_, lam = mp_eigen(v_a, t, eps, eta, nu_el)
    g = [mp_g(max((x - 1) / 2, mp.mpf(0))) for x in lam]
    return g[0] + g[1] - g[2] - g[3]


def mp_skr(v_a, beta, t, eps, eta, nu_el, attack):
    leak = mp_chi_be(v_a, t, eps, eta, nu_el) if attack == "collective" else mp_i_be(v_a, t, eps, eta, nu_el)
    return mp.mpf(beta) * mp_i_ab(v_a, t, eps, eta, nu_el) - leak


def _symplectic_spectrum(gamma):
    n = gamma.shape[0] // 2
    omega = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    ev = np.abs(np.linalg.eigvals(1j * omega @ gamma))
    return sorted(np.sort(ev)[::2], reverse=True)


def covariance_eigenvalues(v_a, t, eps, eta, nu_el):
    """(lambda_1, lambda_2, lambda_3, lambda_4) from explicit covariance matrices."""
    v = v_a + 1.0
    line = 1.0 / t - 1.0 + eps
    eye, z = np.eye(2), np.diag([1.0, -1.0])
    corr = math.sqrt(t * (v * v - 1.0))
    g_ab = np.block([[v * eye, corr * z], [corr * z, t * (v + line) * eye]])
    lam12 = _symplectic_spectrum(g_ab)
    # Detector noise mode F0 purified by G; variance gives nu_el after the beamsplitter.
    w = 1.0 + nu_el / (1.0 - eta) if eta < 1.0 else 1.0
    c_fg = math.sqrt(w * w - 1.0)
    g_fg = np.block([[w * eye, c_fg * z], [c_fg * z, w * eye]])
    g = np.zeros((8, 8))
    g[:4, :4], g[4:, 4:] = g_ab, g_fg  # modes A, B, F0, G
    s, c = math.sqrt(eta), math.sqrt(1.0 - eta)
    bs = np.eye(8)
    bs[2:4, 2:4], bs[2:4, 4:6], bs[4:6, 2:4], bs[4:6, 4:6] = s * eye, c * eye, -c * eye, s * eye
    g = bs @ g @ bs.T
    rest = [0, 1, 4, 5, 6, 7]
    sigma = g[np.ix_(rest, [2, 3])]
    x_proj = np.diag([1.0, 0.0])
    cond = g[np.ix_(rest, rest)] - sigma @ np.linalg.pinv(x_proj @ g[2:4, 2:4] @ x_proj) @ sigma.T
    lam345 = _symplectic_spectrum(cond)
    return lam12[0], lam12[1], lam345[0], lam345[1]


def brute_force_best_v_a(rate, lo=1e-3, hi=1e3, n=10_000):
    """Grid argmax over log-spaced v_a; returns (v_a, rate)."""
    grid = np.logspace(math.log10(lo), math.log10(hi), n)
    values = [rate(x) for x in grid]
    i = int(np.argmax(values))
    return float(grid[i]), float(values[i])
