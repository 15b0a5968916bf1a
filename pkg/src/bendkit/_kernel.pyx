# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled executor for bendkit.program.Program (see _fallback.py for the contract)."""
from libc.math cimport sin, cos, tan, exp, log, sqrt, sinh, cosh, pow, isfinite
from libc.stdlib cimport malloc, free


def execute(const int[::1] ops, const int[::1] arg0, const int[::1] arg1,
            const double[::1] consts, const int[::1] outputs,
            const double[::1] u, const double[::1] v, double[:, ::1] out):
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t m = ops.shape[0]
    cdef Py_ssize_t nout = outputs.shape[0]
    cdef Py_ssize_t p, i, k
    cdef double r
    cdef int op
    cdef int bad_instr = -1
    cdef Py_ssize_t bad_point = -1
    cdef double* reg = <double*> malloc(m * sizeof(double))
    if reg == NULL:
        raise MemoryError()
    try:
        with nogil:
            for p in range(n):
                for i in range(m):
                    op = ops[i]
                    if op == 0:
                        r = consts[i]
                    elif op == 1:
                        r = u[p]
                    elif op == 2:
                        r = v[p]
                    elif op == 3:
                        r = -reg[arg0[i]]
                    elif op == 4:
                        r = reg[arg0[i]] + reg[arg1[i]]
                    elif op == 5:
                        r = reg[arg0[i]] - reg[arg1[i]]
                    elif op == 6:
                        r = reg[arg0[i]] * reg[arg1[i]]
                    elif op == 7:
                        r = reg[arg0[i]] / reg[arg1[i]]
                    elif op == 8:
                        r = pow(reg[arg0[i]], reg[arg1[i]])
                    elif op == 9:
                        r = sin(reg[arg0[i]])
                    elif op == 10:
                        r = cos(reg[arg0[i]])
                    elif op == 11:
                        r = tan(reg[arg0[i]])
                    elif op == 12:
                        r = exp(reg[arg0[i]])
                    elif op == 13:
                        r = log(reg[arg0[i]])
                    elif op == 14:
                        r = sqrt(reg[arg0[i]])
                    elif op == 15:
                        r = sinh(reg[arg0[i]])
                    else:
                        r = cosh(reg[arg0[i]])
                    if not isfinite(r):
                        bad_instr = <int> i
                        bad_point = p
                        break
                    reg[i] = r
                if bad_instr >= 0:
                    break
                for k in range(nout):
                    out[k, p] = reg[outputs[k]]
    finally:
        free(reg)
    return bad_instr, bad_point
