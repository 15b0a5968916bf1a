"""Pure numpy executor for :class:`bendkit.program.Program`.

Same contract as the compiled ``_kernel.execute``: fill ``out`` and return
``(bad_instruction, bad_point)``, or ``(-1, -1)`` when every intermediate
value is finite.
"""
import numpy as np

_UNARY = {
    3: np.negative, 9: np.sin, 10: np.cos, 11: np.tan, 12: np.exp,
    13: np.log, 14: np.sqrt, 15: np.sinh, 16: np.cosh,
}
_BINARY = {4: np.add, 5: np.subtract, 6: np.multiply, 7: np.divide, 8: np.power}


def execute(ops, arg0, arg1, consts, outputs, u, v, out):
    n = u.shape[0]
    regs = [None] * len(ops)
    with np.errstate(all="ignore"):
        for i in range(len(ops)):
            op = int(ops[i])
            if op == 0:
                r = np.full(n, consts[i])
            elif op == 1:
                r = u
            elif op == 2:
                r = v
            elif op in _UNARY:
                r = _UNARY[op](regs[arg0[i]])
            else:
                r = _BINARY[op](regs[arg0[i]], regs[arg1[i]])
            ok = np.isfinite(r)
            if not ok.all():
                return i, int(np.argmin(ok))
            regs[i] = r
    for k, reg in enumerate(outputs):
        out[k, :] = regs[reg]
    return -1, -1
