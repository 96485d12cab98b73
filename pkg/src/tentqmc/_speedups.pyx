# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled pairwise kernel loops; semantics match tentqmc._kernels."""

from libc.math cimport fabs


def gram_mean_product(double[:, ::1] x, double[:, :, ::1] bern,
                      double[::1] poly2a, double[::1] gamma,
                      double sign, double gamma_empty):
    """Mean of the product-weight kernel Gram matrix plus (gamma_empty - 1).

    x: (N, s) points; bern: (N, s, alpha) values B_tau(x)/tau!;
    poly2a: descending coefficients of B_2alpha/(2alpha)!.
    """
    cdef Py_ssize_t N = x.shape[0]
    cdef Py_ssize_t s = x.shape[1]
    cdef Py_ssize_t A = bern.shape[2]
    cdef Py_ssize_t P = poly2a.shape[0]
    cdef Py_ssize_t i, l, j, t, c
    cdef double acc = 0.0
    cdef double prod, k1, d, h
    for i in range(N):
        for l in range(N):
            prod = 1.0
            for j in range(s):
                d = fabs(x[i, j] - x[l, j])
                h = poly2a[0]
                for c in range(1, P):
                    h = h * d + poly2a[c]
                k1 = sign * h
                for t in range(A):
                    k1 = k1 + bern[i, j, t] * bern[l, j, t]
                prod = prod * (1.0 + gamma[j] * k1)
            acc = acc + prod
    return acc / (<double> N * <double> N) + (gamma_empty - 1.0)
