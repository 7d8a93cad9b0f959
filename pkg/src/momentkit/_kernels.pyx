# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled implementations of the hot inner loops.

Same contracts as _kernels_py; the selector in kernels.py prefers this
module when the extension built successfully.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def conv_psi_table(chi1_vals, chi2_vals, psi_vals, log_table, exp_table,
                   digits, pow_p, p):
    """c[u] = sum over x*y = u (x, y units) of chi1(x)*chi2(y)*psi(x+y)."""
    cdef cnp.complex128_t[::1] c1 = np.ascontiguousarray(chi1_vals,
                                                         dtype=np.complex128)
    cdef cnp.complex128_t[::1] c2 = np.ascontiguousarray(chi2_vals,
                                                         dtype=np.complex128)
    cdef cnp.complex128_t[::1] pv = np.ascontiguousarray(psi_vals,
                                                         dtype=np.complex128)
    cdef cnp.int64_t[::1] logt = np.ascontiguousarray(log_table,
                                                      dtype=np.int64)
    cdef cnp.int64_t[::1] expt = np.ascontiguousarray(exp_table,
                                                      dtype=np.int64)
    cdef cnp.int64_t[:, ::1] dig = np.ascontiguousarray(digits,
                                                        dtype=np.int64)
    cdef cnp.int64_t[::1] pw = np.ascontiguousarray(pow_p, dtype=np.int64)
    cdef Py_ssize_t q = c1.shape[0]
    cdef Py_ssize_t n = q - 1
    cdef Py_ssize_t f = dig.shape[1]
    cdef Py_ssize_t x, y, u, i
    cdef long long pp = p, s, d
    out = np.zeros(q, dtype=np.complex128)
    cdef cnp.complex128_t[::1] c = out
    cdef cnp.complex128_t cx
    for x in range(1, q):
        cx = c1[x]
        for y in range(1, q):
            u = expt[(logt[x] + logt[y]) % n]
            s = 0
            for i in range(f):
                d = (dig[x, i] + dig[y, i]) % pp
                s += d * pw[i]
            c[u] = c[u] + cx * c2[y] * pv[s]
    return out


def s_direct(rho_vals_ext, chi_vals, eta_vals, embed_table, omega,
             log_ext, exp_ext, digits_ext, pow_p_ext, p,
             log_base, exp_base, digits_base, pow_p_base, eps):
    """Direct double loop for S(chi, eta; rho) over alpha, t in F_q."""
    cdef cnp.complex128_t[::1] rho = np.ascontiguousarray(rho_vals_ext,
                                                          dtype=np.complex128)
    cdef cnp.complex128_t[::1] chi = np.ascontiguousarray(chi_vals,
                                                          dtype=np.complex128)
    cdef cnp.complex128_t[::1] eta = np.ascontiguousarray(eta_vals,
                                                          dtype=np.complex128)
    cdef cnp.int64_t[::1] emb = np.ascontiguousarray(embed_table,
                                                     dtype=np.int64)
    cdef cnp.int64_t[:, ::1] dige = np.ascontiguousarray(digits_ext,
                                                         dtype=np.int64)
    cdef cnp.int64_t[::1] pwe = np.ascontiguousarray(pow_p_ext,
                                                     dtype=np.int64)
    cdef cnp.int64_t[::1] logb = np.ascontiguousarray(log_base,
                                                      dtype=np.int64)
    cdef cnp.int64_t[::1] expb = np.ascontiguousarray(exp_base,
                                                      dtype=np.int64)
    cdef cnp.int64_t[:, ::1] digb = np.ascontiguousarray(digits_base,
                                                         dtype=np.int64)
    cdef cnp.int64_t[::1] pwb = np.ascontiguousarray(pow_p_base,
                                                     dtype=np.int64)
    cdef Py_ssize_t q = chi.shape[0]
    cdef Py_ssize_t nb = q - 1
    cdef Py_ssize_t fb = digb.shape[1]
    cdef Py_ssize_t fe = dige.shape[1]
    cdef long long pp = p, acc
    cdef Py_ssize_t alpha, t, i
    cdef Py_ssize_t a2, et, arg, omt, x, om = omega, ep = eps
    cdef cnp.complex128_t total = 0, inner, row
    cdef long long loge = logb[ep]
    for alpha in range(q):
        a2 = 0 if alpha == 0 else expb[(2 * logb[alpha]) % nb]
        acc = 0
        for i in range(fe):
            acc += ((dige[emb[alpha], i] + dige[om, i]) % pp) * pwe[i]
        x = acc
        inner = 0
        for t in range(q):
            et = 0 if t == 0 else expb[(loge + logb[t]) % nb]
            acc = 0
            for i in range(fb):
                # digits are in [0, p); add p before the C modulo so the
                # difference stays nonnegative
                acc += ((digb[1, i] - digb[t, i] + pp) % pp) * pwb[i]
            omt = acc
            acc = 0
            for i in range(fb):
                acc += ((digb[a2, i] - digb[et, i] + pp) % pp) * pwb[i]
            arg = acc
            row = chi[t] * eta[omt].conjugate() * eta[arg]
            inner = inner + row
        total = total + rho[x] * inner
    return complex(total)
