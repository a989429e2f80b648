# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-timestep kernels. Contract identical to ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, floor, exp, log10, log1p, pow, log, INFINITY
from libc.stdlib cimport qsort, malloc, free

cnp.import_array()


cdef struct Item:
    double frac
    Py_ssize_t idx


cdef int _cmp_desc(const void* a, const void* b) noexcept nogil:
    cdef const Item* x = <const Item*>a
    cdef const Item* y = <const Item*>b
    if x.frac > y.frac:
        return -1
    if x.frac < y.frac:
        return 1
    if x.idx < y.idx:
        return -1
    if x.idx > y.idx:
        return 1
    return 0


def link_gains(bs_xyh, ref_los, ref_nlos, exp_los, exp_nlos, ue_xyh,
               double alpha, double beta, double gamma_env):
    cdef double[:, ::1] bs = np.ascontiguousarray(bs_xyh, dtype=np.float64)
    cdef double[:, ::1] ue = np.ascontiguousarray(ue_xyh, dtype=np.float64)
    cdef double[::1] a_los = np.ascontiguousarray(ref_los, dtype=np.float64)
    cdef double[::1] a_nlos = np.ascontiguousarray(ref_nlos, dtype=np.float64)
    cdef double[::1] e_los = np.ascontiguousarray(exp_los, dtype=np.float64)
    cdef double[::1] e_nlos = np.ascontiguousarray(exp_nlos, dtype=np.float64)
    cdef Py_ssize_t nb = bs.shape[0], nk = ue.shape[0], b, k
    cdef long n, n_max
    pr_arr = np.empty((nb, nk))
    gl_arr = np.empty((nb, nk))
    gn_arr = np.empty((nb, nk))
    cdef double[:, ::1] pr = pr_arr
    cdef double[:, ::1] gl = gl_arr
    cdef double[:, ::1] gn = gn_arr
    cdef double scale = sqrt(alpha * beta)
    cdef double two_g2 = 2.0 * gamma_env * gamma_env
    cdef double dx, dy, dh, r2, r, d, hb, hn, p, logd
    with nogil:
        for b in range(nb):
            hb = bs[b, 2]
            for k in range(nk):
                dx = bs[b, 0] - ue[k, 0]
                dy = bs[b, 1] - ue[k, 1]
                dh = hb - ue[k, 2]
                r2 = dx * dx + dy * dy
                r = sqrt(r2)
                d = sqrt(r2 + dh * dh)
                n_max = <long>floor(r * scale / 1000.0 - 1.0)
                p = 1.0
                for n in range(n_max + 1):
                    hn = hb - (n + 0.5) * dh / (n + 1)
                    p = p * (1.0 - exp(-(hn * hn) / two_g2))
                pr[b, k] = p
                logd = log10(d)
                gl[b, k] = pow(10.0, -(a_los[b] + 10.0 * e_los[b] * logd) / 10.0)
                gn[b, k] = pow(10.0, -(a_nlos[b] + 10.0 * e_nlos[b] * logd) / 10.0)
    return pr_arr, gl_arr, gn_arr


def network_step(rx_in, load_est_in, demand_in, double noise, double bandwidth):
    cdef double[:, ::1] rx = np.ascontiguousarray(rx_in, dtype=np.float64)
    cdef double[::1] load_est = np.ascontiguousarray(load_est_in, dtype=np.float64)
    cdef double[::1] demand = np.ascontiguousarray(demand_in, dtype=np.float64)
    cdef Py_ssize_t nb = rx.shape[0], nk = rx.shape[1], b, k, j, m, n_drop
    serving_arr = np.zeros(nk, dtype=np.int64)
    rate_arr = np.zeros(nk)
    dropped_arr = np.zeros(nk, dtype=np.uint8)
    load_arr = np.zeros(nb)
    offered_arr = np.zeros(nb)
    sdem_arr = np.zeros(nb)
    srate_arr = np.zeros(nb)
    nassoc_arr = np.zeros(nb, dtype=np.int64)
    ndrop_arr = np.zeros(nb, dtype=np.int64)
    if nk == 0:
        return (serving_arr, rate_arr, dropped_arr.view(bool), load_arr, offered_arr,
                sdem_arr, srate_arr, nassoc_arr, ndrop_arr)
    cdef cnp.int64_t[::1] serving = serving_arr
    cdef double[::1] rate = rate_arr
    cdef cnp.uint8_t[::1] dropped = dropped_arr
    cdef double[::1] load = load_arr
    cdef double[::1] offered = offered_arr
    cdef double[::1] sdem = sdem_arr
    cdef double[::1] srate = srate_arr
    cdef cnp.int64_t[::1] nassoc = nassoc_arr
    cdef cnp.int64_t[::1] ndrop = ndrop_arr
    cdef double best, sc, interf, sinr, tail
    cdef Py_ssize_t s
    cdef double ln2 = log(2.0)
    cdef double* frac = <double*>malloc(nk * sizeof(double))
    cdef double* tails = <double*>malloc((nk + 1) * sizeof(double))
    cdef Item* items = <Item*>malloc(nk * sizeof(Item))
    if frac == NULL or items == NULL or tails == NULL:
        free(frac); free(items); free(tails)
        raise MemoryError()
    try:
        with nogil:
            for k in range(nk):
                s = 0
                best = rx[0, k] * (1.0 - load_est[0])
                for b in range(1, nb):
                    sc = rx[b, k] * (1.0 - load_est[b])
                    if sc > best:
                        best = sc
                        s = b
                serving[k] = s
                nassoc[s] += 1
                interf = 0.0
                for b in range(nb):
                    if b != s:
                        interf = interf + rx[b, k]
                    else:
                        interf = interf + 0.0
                sinr = rx[s, k] / (interf + noise)
                rate[k] = bandwidth * log1p(sinr) / ln2
                if rate[k] > 0:
                    frac[k] = demand[k] / rate[k]
                else:
                    frac[k] = INFINITY

            for b in range(nb):
                m = 0
                for k in range(nk):
                    if serving[k] == b:
                        items[m].frac = frac[k]
                        items[m].idx = k
                        m += 1
                if m == 0:
                    continue
                qsort(items, m, sizeof(Item), _cmp_desc)
                tails[m] = 0.0
                tail = 0.0
                for j in range(m - 1, -1, -1):
                    tail = tail + items[j].frac
                    tails[j] = tail
                n_drop = 0
                while n_drop < m and not (tails[n_drop] <= 1.0):
                    n_drop += 1
                offered[b] = tails[0]
                load[b] = tails[n_drop]
                ndrop[b] = n_drop
                for j in range(n_drop):
                    dropped[items[j].idx] = 1

            for k in range(nk):
                if not dropped[k]:
                    s = serving[k]
                    sdem[s] = sdem[s] + demand[k]
                    srate[s] = srate[s] + rate[k]
    finally:
        free(frac)
        free(items)
        free(tails)
    return (serving_arr, rate_arr, dropped_arr.view(bool), load_arr, offered_arr,
            sdem_arr, srate_arr, nassoc_arr, ndrop_arr)
