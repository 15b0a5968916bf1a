"""Compile expression trees into a flat register program and run it on arrays.

A :class:`Program` holds several output expressions at once. Identical
subtrees are shared (hash-consed on ``(opcode, operands)``), so the 18
position derivatives of a chart, which repeat many ``sin``/``cos`` factors,
cost far fewer instructions than the trees suggest.

The inner loop runs in the compiled ``_kernel`` extension when it is
importable and in :mod:`bendkit._fallback` (vectorised numpy) otherwise.
Set ``BENDKIT_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _fallback
from .errors import DomainError
from .expr import BinOp, Call, Const, NamedConst, Neg, Var

OP_CONST, OP_U, OP_V, OP_NEG = 0, 1, 2, 3
OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_POW = 4, 5, 6, 7, 8
OP_SIN, OP_COS, OP_TAN, OP_EXP, OP_LOG, OP_SQRT, OP_SINH, OP_COSH = range(9, 17)

OP_NAMES = ["const", "u", "v", "neg", "+", "-", "*", "/", "^",
            "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh"]
_BINARY = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV, "^": OP_POW}
_UNARY = {"sin": OP_SIN, "cos": OP_COS, "tan": OP_TAN, "exp": OP_EXP,
          "log": OP_LOG, "sqrt": OP_SQRT, "sinh": OP_SINH, "cosh": OP_COSH}


def _load_backend():
    if os.environ.get("BENDKIT_PURE_PYTHON", "") not in ("", "0"):
        return "python", _fallback.execute
    try:
        from . import _kernel
    except ImportError:
        return "python", _fallback.execute
    return "compiled", _kernel.execute


BACKEND, _execute = _load_backend()


def available_backends():
    """Map of backend name to execute function, for benchmarks and tests."""
    out = {"python": _fallback.execute}
    try:
        from . import _kernel
        out["compiled"] = _kernel.execute
    except ImportError:
        pass
    return out


class Program:
    """Register program evaluating ``exprs`` jointly at many points."""

    def __init__(self, exprs):
        self.exprs = tuple(exprs)
        ops, a, b, c = [], [], [], []
        index = {}   # structural key -> register
        by_id = {}   # id(node) -> register

        def emit(key):
            reg = index.get(key)
            if reg is None:
                reg = len(ops)
                index[key] = reg
                ops.append(key[0])
                a.append(key[1])
                b.append(key[2])
                c.append(key[3])
            return reg

        def visit(node):
            reg = by_id.get(id(node))
            if reg is not None:
                return reg
            # explicit stack keeps deep trees clear of the recursion limit
            stack = [(node, False)]
            while stack:
                n, ready = stack.pop()
                if id(n) in by_id:
                    continue
                if isinstance(n, (Const, NamedConst)):
                    by_id[id(n)] = emit((OP_CONST, -1, -1, float(n.value)))
                elif isinstance(n, Var):
                    by_id[id(n)] = emit((OP_U if n.name == "u" else OP_V, -1, -1, 0.0))
                elif isinstance(n, (Neg, Call)):
                    if ready:
                        code = OP_NEG if isinstance(n, Neg) else _UNARY[n.func]
                        by_id[id(n)] = emit((code, by_id[id(n.arg)], -1, 0.0))
                    else:
                        stack.append((n, True))
                        stack.append((n.arg, False))
                elif isinstance(n, BinOp):
                    if ready:
                        by_id[id(n)] = emit((_BINARY[n.op], by_id[id(n.left)],
                                             by_id[id(n.right)], 0.0))
                    else:
                        stack.append((n, True))
                        stack.append((n.right, False))
                        stack.append((n.left, False))
                else:
                    raise TypeError(f"not an expression node: {n!r}")
            return by_id[id(node)]

        outs = [visit(e) for e in self.exprs]
        self.ops = np.asarray(ops, dtype=np.int32)
        self.arg0 = np.asarray(a, dtype=np.int32)
        self.arg1 = np.asarray(b, dtype=np.int32)
        self.consts = np.asarray(c, dtype=np.float64)
        self.outputs = np.asarray(outs, dtype=np.int32)

    def __len__(self):
        return len(self.ops)

    def run(self, u, v, execute=None):
        """Evaluate all outputs at flat float64 arrays ``u``, ``v``.

        Returns an array of shape ``(n_outputs, n_points)``.
        """
        u = np.ascontiguousarray(u, dtype=np.float64)
        v = np.ascontiguousarray(v, dtype=np.float64)
        out = np.empty((len(self.outputs), u.shape[0]), dtype=np.float64)
        if u.shape[0] == 0:
            return out
        bad_instr, bad_point = (execute or _execute)(
            self.ops, self.arg0, self.arg1, self.consts, self.outputs, u, v, out)
        if bad_instr >= 0:
            raise DomainError(
                f"{OP_NAMES[self.ops[bad_instr]]} produced a non-finite value at "
                f"(u, v) = ({float(u[bad_point])!r}, {float(v[bad_point])!r})")
        return out

    def __call__(self, u, v):
        """Broadcast ``u``, ``v`` and return shape ``(n_outputs, *broadcast_shape)``."""
        U, V = np.broadcast_arrays(np.asarray(u, dtype=np.float64),
                                   np.asarray(v, dtype=np.float64))
        shape = U.shape
        out = self.run(U.ravel(), V.ravel())
        return out.reshape((len(self.outputs),) + shape)
