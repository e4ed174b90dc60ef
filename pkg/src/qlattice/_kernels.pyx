# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled term kernel; same contract as ``_kernels_py.eval_points``."""
cimport numpy as cnp
import numpy as np

cnp.import_array()


def eval_points(cnp.int64_t[:, :] idx, signs, list units, list orders, origins,
                cnp.int64_t[:] qexp, list qunits, Py_ssize_t qorigin, cunit, long corder):
    cdef Py_ssize_t P = idx.shape[0]
    cdef Py_ssize_t F = idx.shape[1]
    cdef Py_ssize_t p, f, j
    cdef long order
    cdef cnp.int64_t[:] sg = np.ascontiguousarray(signs, dtype=np.int64)
    cdef cnp.int64_t[:] org = np.ascontiguousarray(origins, dtype=np.int64)
    cdef list out_u = [None] * P
    cdef list out_o = [0] * P
    cdef list uf, of
    cdef object num, den
    cdef bint have_den
    for p in range(P):
        num = cunit
        den = None
        have_den = False
        order = corder
        for f in range(F):
            j = org[f] + idx[p, f]
            uf = <list>units[f]
            of = <list>orders[f]
            if sg[f] > 0:
                num = num * uf[j]
                order += <long>of[j]
            else:
                if have_den:
                    den = den * uf[j]
                else:
                    den = uf[j]
                    have_den = True
                order -= <long>of[j]
        num = num * qunits[qorigin + qexp[p]]
        out_u[p] = num / den if have_den else num
        out_o[p] = order
    return out_u, out_o
