"""Exception hierarchy shared by all bendkit modules."""


class BendkitError(Exception):
    """Base class for every error raised by the package."""


class ExprError(BendkitError):
    pass


class ExprSyntaxError(ExprError):
    """Malformed expression source. ``offset`` is the byte offset of the problem."""

    def __init__(self, message, offset, text=None):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExprSyntaxError):
    def __init__(self, name, offset, text=None):
        self.name = name
        super().__init__(f"unknown identifier {name!r}", offset, text)


class EmptyExpressionError(ExprSyntaxError):
    def __init__(self, text=None):
        super().__init__("empty expression", 0, text)


class DomainError(ExprError, ArithmeticError):
    """Evaluation left the natural domain of a function (log of x <= 0, ...)."""


class DegenerateChartError(BendkitError):
    """|r_u x r_v| fell below the regularity threshold."""


class QuadratureError(BendkitError):
    """Adaptive quadrature hit its depth limit before reaching the tolerance."""


class ResidualTooLargeError(BendkitError):
    """The rotation system z_u = y x r_u, z_v = y x r_v has no consistent solution."""

    def __init__(self, residual, u=None, v=None):
        self.residual = residual
        self.u = u
        self.v = v
        where = "" if u is None else f" at (u, v) = ({u:.6g}, {v:.6g})"
        super().__init__(f"rotation solve residual {residual:.3e}{where}; "
                         "field is not an infinitesimal bending")


class PathIndependenceError(BendkitError):
    """Potential samples disagree between two lattice paths."""

    def __init__(self, discrepancy, tol):
        self.discrepancy = discrepancy
        self.tol = tol
        super().__init__(f"path-independence violated: discrepancy {discrepancy:.3e} "
                         f"> {tol:.3e}")


class ScenarioError(BendkitError):
    """Invalid scenario file. Carries the offending section/key when known."""

    def __init__(self, message, section=None, key=None, offset=None):
        self.section = section
        self.key = key
        self.offset = offset
        loc = []
        if section is not None:
            loc.append(f"[{section}]")
        if key is not None:
            loc.append(key)
        if offset is not None:
            loc.append(f"offset {offset}")
        prefix = " ".join(loc)
        super().__init__(f"{prefix}: {message}" if prefix else message)
