# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sampling kernels; statement-for-statement port of ``_pykernels``."""
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport log, INFINITY
from numpy.random cimport bitgen_t

NAME = "cython"


cdef inline bitgen_t* _bitgen(object rng) except NULL:
    capsule = rng.bit_generator.capsule
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline double _next(bitgen_t* bg) noexcept nogil:
    return bg.next_double(bg.state)


cdef inline bint _accept(double u, double lr) noexcept nogil:
    if lr == -INFINITY:
        return False
    return u == 0.0 or log(u) < lr


cdef inline Py_ssize_t _neighbours(double[::1] xs, double[::1] ys, Py_ssize_t n,
                                   double x, double y, double r2) noexcept nogil:
    cdef Py_ssize_t j, k = 0
    cdef double dx, dy
    for j in range(n):
        dx = xs[j] - x
        dy = ys[j] - y
        if dx * dx + dy * dy <= r2:
            k += 1
    return k


def mh_run(double[::1] xs, double[::1] ys, Py_ssize_t n, Py_ssize_t steps,
           double log_beta, double log_gamma, double r, window, double birth_p, rng):
    cdef double x0, x1, y0, y1
    x0, x1, y0, y1 = window
    cdef double w = x1 - x0
    cdef double h = y1 - y0
    cdef double log_area = log(w * h)
    cdef double log_q = log(birth_p) - log(1.0 - birth_p)
    cdef bint interacting = r > 0.0
    cdef double r2 = r * r
    cdef Py_ssize_t pair_delta = 0
    cdef Py_ssize_t step, k, idx
    cdef double ux, uy, lr
    cdef bitgen_t* bg = _bitgen(rng)
    if xs.shape[0] < n + steps or ys.shape[0] < n + steps:
        raise ValueError("coordinate buffers too small for n + steps points")
    with rng.bit_generator.lock, nogil:
        for step in range(steps):
            if _next(bg) < birth_p:
                ux = x0 + w * _next(bg)
                uy = y0 + h * _next(bg)
                if interacting:
                    k = _neighbours(xs, ys, n, ux, uy, r2)
                else:
                    k = 0
                lr = log_beta + log_gamma * k + log_area - log(<double>(n + 1)) - log_q
                if _accept(_next(bg), lr):
                    xs[n] = ux
                    ys[n] = uy
                    n += 1
                    pair_delta += k
            elif n > 0:
                idx = <Py_ssize_t>(_next(bg) * n)
                if idx >= n:
                    idx = n - 1
                if interacting:
                    k = _neighbours(xs, ys, n, xs[idx], ys[idx], r2) - 1
                else:
                    k = 0
                lr = log(<double>n) + log_q - (log_beta + log_gamma * k) - log_area
                if _accept(_next(bg), lr):
                    n -= 1
                    xs[idx] = xs[n]
                    ys[idx] = ys[n]
                    pair_delta -= k
    return n, pair_delta


def shadow_inner(double[::1] theta, const double[::1] delta, const double[::1] data_stats,
                 const double[::1] aux_stats, const double[::1] lower, const double[::1] upper,
                 Py_ssize_t m, double temperature, bint ball, rng):
    cdef Py_ssize_t dim = theta.shape[0]
    cdef Py_ssize_t i, it, accepted = 0
    cdef double ss, v, lr, u
    cdef bint inside
    cdef bitgen_t* bg = _bitgen(rng)
    # dim is 1 or 2 in practice; 8 leaves headroom without a heap allocation
    cdef double psi[8]
    cdef double diff[8]
    if dim > 8:
        raise ValueError("compiled kernel supports at most 8 parameters")
    for i in range(dim):
        diff[i] = data_stats[i] - aux_stats[i]
    with rng.bit_generator.lock, nogil:
        for it in range(m):
            if ball:
                while True:
                    ss = 0.0
                    for i in range(dim):
                        v = 2.0 * _next(bg) - 1.0
                        psi[i] = v
                        ss += v * v
                    if ss <= 1.0:
                        break
                for i in range(dim):
                    psi[i] = theta[i] + 0.5 * delta[i] * psi[i]
            else:
                for i in range(dim):
                    psi[i] = theta[i] + delta[i] * (_next(bg) - 0.5)
            inside = True
            lr = 0.0
            for i in range(dim):
                if psi[i] < lower[i] or psi[i] > upper[i]:
                    inside = False
                lr += (psi[i] - theta[i]) * diff[i]
            u = _next(bg)
            if inside and _accept(u, lr / temperature):
                for i in range(dim):
                    theta[i] = psi[i]
                accepted += 1
    return accepted
