# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernel.

Expected post-answer surprisal of a question whose per-answer likelihoods
are given row-wise: sum_a [ m_a ln m_a - sum_y W ln W ] with W = L * prior
and m the row sums of W, using the 0 ln 0 = 0 convention. Zero-probability
answers contribute nothing.
"""

from libc.math cimport log


cpdef double expected_surprisal(double[::1] prior, double[:, ::1] like):
    cdef Py_ssize_t n_a = like.shape[0]
    cdef Py_ssize_t n_y = like.shape[1]
    cdef Py_ssize_t a, y
    cdef double w, m, wlogw, total
    total = 0.0
    for a in range(n_a):
        m = 0.0
        wlogw = 0.0
        for y in range(n_y):
            w = like[a, y] * prior[y]
            if w > 0.0:
                m += w
                wlogw += w * log(w)
        if m > 0.0:
            total += m * log(m) - wlogw
    return total


def expected_surprisal_many(double[::1] prior, double[:, :, ::1] like_stack, double[::1] out):
    cdef Py_ssize_t n_q = like_stack.shape[0]
    cdef Py_ssize_t q
    for q in range(n_q):
        out[q] = expected_surprisal(prior, like_stack[q])
