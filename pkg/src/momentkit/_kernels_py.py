"""Pure-numpy implementations of the hot inner loops.

These mirror the signatures of the compiled extension in _kernels.pyx; the
selector in kernels.py picks whichever is available.  Everything here takes
raw tables (value arrays, log/exp tables, base-p digit matrix) so the
implementations stay independent of the FieldCtx object layout.
"""

import numpy as np

BACKEND = "python"


def conv_psi_table(chi1_vals, chi2_vals, psi_vals, log_table, exp_table,
                   digits, pow_p, p):
    """c[u] = sum over x*y = u (x, y units) of chi1(x)*chi2(y)*psi(x+y).

    Indexed by element code; c[0] = 0 since the product of units is a unit.
    """
    q = chi1_vals.shape[0]
    n = q - 1
    c = np.zeros(q, dtype=np.complex128)
    y = np.arange(1, q)
    logy = log_table[y]
    dy = digits[y]
    for x in range(1, q):
        u = exp_table[(log_table[x] + logy) % n]
        s = ((digits[x] + dy) % p) @ pow_p
        # u is a permutation of the units for each fixed x
        c[u] += chi1_vals[x] * chi2_vals[y] * psi_vals[s]
    return c


def s_direct(rho_vals_ext, chi_vals, eta_vals, embed_table, omega,
             log_ext, exp_ext, digits_ext, pow_p_ext, p,
             log_base, exp_base, digits_base, pow_p_base, eps):
    """Direct double loop for S(chi, eta; rho) over alpha, t in F_q.

    rho is a character of the quadratic extension evaluated at alpha + omega;
    the base-field part is chi(t) * eta(alpha^2 - eps*t) * conj(eta)(1 - t).
    """
    q = chi_vals.shape[0]
    nb = q - 1
    t = np.arange(q)
    # base-field helpers over the t-vector
    eps_t = exp_base[(log_base[eps] + log_base[t]) % nb]
    eps_t[0] = 0
    one_minus_t = ((digits_base[1] - digits_base[t]) % p) @ pow_p_base
    eta_conj_1mt = np.conj(eta_vals[one_minus_t])
    base_row = chi_vals[t] * eta_conj_1mt
    total = 0j
    for alpha in range(q):
        a2 = 0 if alpha == 0 else exp_base[(2 * log_base[alpha]) % nb]
        arg = ((digits_base[a2] - digits_base[eps_t]) % p) @ pow_p_base
        x = ((digits_ext[embed_table[alpha]] + digits_ext[omega]) % p) @ pow_p_ext
        total += rho_vals_ext[x] * np.sum(base_row * eta_vals[arg])
    return total
