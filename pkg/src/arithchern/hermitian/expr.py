"""Expression language for metric data on the Riemann sphere.

Grammar (EBNF, see docs/expressions.md)::

    matrix  = "[" row { "," row } "]" ;
    row     = "[" expr { "," expr } "]" ;
    expr    = term { ("+" | "-") term } ;
    term    = factor { ("*" | "/") factor } ;
    factor  = ("+" | "-") factor | power ;
    power   = atom [ ("^" | "**") factor ] ;
    atom    = number | "I" | "pi" | name | func "(" expr ")" | "(" expr ")" ;
    name    = "X0" | "X1" | "z" ;
    func    = "re" | "im" | "abs2" | "conj" | "exp" | "log" | "sqrt" ;

``X0, X1`` are homogeneous coordinates and must appear in combinations of
total degree zero when a global function is meant; ``z = X0/X1``.  Every
parsed node is carried as a pair ``(f, conj(f))`` of sympy expressions in
the chart coordinate ``c`` and its conjugate ``cb``, which are treated as
independent symbols.  That makes Wirtinger derivatives plain ``diff`` calls.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass

import numpy as np
import sympy as sp

C, CB = sp.symbols("c cb")
CHARTS = ("z", "w")


class ExprError(ValueError):
    pass


@dataclass(frozen=True)
class ChartExpr:
    """A function on one chart as the pair ``(f, conj f)`` in ``(c, cb)``."""
    f: sp.Expr
    fb: sp.Expr

    def __add__(self, o):
        o = _lift(o)
        return ChartExpr(self.f + o.f, self.fb + o.fb)

    __radd__ = __add__

    def __sub__(self, o):
        o = _lift(o)
        return ChartExpr(self.f - o.f, self.fb - o.fb)

    def __rsub__(self, o):
        return _lift(o) - self

    def __mul__(self, o):
        o = _lift(o)
        return ChartExpr(self.f * o.f, self.fb * o.fb)

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = _lift(o)
        return ChartExpr(self.f / o.f, self.fb / o.fb)

    def __rtruediv__(self, o):
        return _lift(o) / self

    def __neg__(self):
        return ChartExpr(-self.f, -self.fb)

    def __pow__(self, k):
        k = _lift(k)
        return ChartExpr(self.f ** k.f, self.fb ** k.fb)

    def conj(self) -> "ChartExpr":
        return ChartExpr(self.fb, self.f)

    def abs2(self) -> "ChartExpr":
        p = self.f * self.fb
        return ChartExpr(p, p)

    def re(self) -> "ChartExpr":
        r = (self.f + self.fb) / 2
        return ChartExpr(r, r)

    def im(self) -> "ChartExpr":
        r = (self.f - self.fb) / (2 * sp.I)
        return ChartExpr(r, r)

    def exp(self) -> "ChartExpr":
        return ChartExpr(sp.exp(self.f), sp.exp(self.fb))

    def log(self) -> "ChartExpr":
        return ChartExpr(sp.log(self.f), sp.log(self.fb))

    def sqrt(self) -> "ChartExpr":
        return ChartExpr(sp.sqrt(self.f), sp.sqrt(self.fb))

    def numeric(self):
        """Vectorized ``c -> f(c)`` for complex numpy arrays."""
        fn = sp.lambdify((C, CB), self.f, "numpy")
        return lambda c: np.broadcast_to(fn(c, np.conj(c)), np.shape(c)).astype(complex)


def _lift(x) -> ChartExpr:
    if isinstance(x, ChartExpr):
        return x
    v = sp.sympify(x)
    return ChartExpr(v, sp.conjugate(v))


def const(v) -> ChartExpr:
    return _lift(v)


def coordinate(chart: str) -> ChartExpr:
    return ChartExpr(C, CB)


def homogeneous(chart: str) -> tuple[ChartExpr, ChartExpr]:
    """``(X0, X1)`` dehomogenized on the chart (``z``: X1 = 1, ``w``: X0 = 1)."""
    one = const(1)
    if chart == "z":
        return coordinate(chart), one
    if chart == "w":
        return one, coordinate(chart)
    raise ExprError(f"unknown chart {chart!r}")


def fs_weight(chart: str) -> ChartExpr:
    """``1 + |c|^2``; the Fubini-Study norm of the chart's frame of O(-1), squared."""
    return 1 + coordinate(chart).abs2()


_FUNCS = {"re": ChartExpr.re, "im": ChartExpr.im, "abs2": ChartExpr.abs2,
          "conj": ChartExpr.conj, "exp": ChartExpr.exp, "log": ChartExpr.log,
          "sqrt": ChartExpr.sqrt}


def _names(chart: str) -> dict[str, ChartExpr]:
    x0, x1 = homogeneous(chart)
    return {"X0": x0, "X1": x1, "z": x0 / x1, "I": ChartExpr(sp.I, -sp.I),
            "pi": const(sp.pi)}


def _eval(node, names):
    if isinstance(node, ast.Expression):
        return _eval(node.body, names)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        v = sp.Integer(node.value) if isinstance(node.value, int) else sp.Float(node.value)
        return const(v)
    if isinstance(node, ast.Name):
        if node.id not in names:
            raise ExprError(f"unknown name {node.id!r}")
        return names[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, names)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        a, b = _eval(node.left, names), _eval(node.right, names)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            return a / b
        if isinstance(node.op, ast.Pow):
            return a ** b
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name):
        fn = _FUNCS.get(node.func.id)
        if fn is None or len(node.args) != 1 or node.keywords:
            raise ExprError(f"bad call to {node.func.id!r}")
        return fn(_eval(node.args[0], names))
    raise ExprError(f"unsupported syntax: {ast.dump(node)[:60]}")


def _tree(text: str):
    if not isinstance(text, str) or not text.strip():
        raise ExprError("empty expression")
    try:
        return ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as e:
        raise ExprError(f"cannot parse {text!r}: {e.msg}") from None


def parse_expr(text: str, chart: str) -> ChartExpr:
    tree = _tree(text)
    if isinstance(tree.body, ast.List):
        raise ExprError("matrix literal where a scalar was expected")
    return _eval(tree, _names(chart))


def parse_matrix(text: str, chart: str) -> list[list[ChartExpr]]:
    tree = _tree(text)
    body = tree.body
    if not isinstance(body, ast.List) or not body.elts:
        raise ExprError("expected a matrix literal [[..], ..]")
    names = _names(chart)
    rows = []
    for r in body.elts:
        if not isinstance(r, ast.List) or not r.elts:
            raise ExprError("matrix rows must be non-empty lists")
        rows.append([_eval(e, names) for e in r.elts])
    if any(len(r) != len(rows[0]) for r in rows):
        raise ExprError("ragged matrix literal")
    return rows


def check_global(text: str, n_samples: int = 8, rtol: float = 1e-9, seed: int = 0) -> float:
    """Largest mismatch between the two chart readings of a scalar expression.

    A degree-zero expression in ``X0, X1`` defines one function on the
    sphere, so its z-chart value at ``c`` and w-chart value at ``1/c`` agree.
    Raises :class:`ExprError` when they do not.
    """
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.3, 2.0, n_samples) * np.exp(2j * np.pi * rng.uniform(size=n_samples))
    fz = parse_expr(text, "z").numeric()(pts)
    fw = parse_expr(text, "w").numeric()(1 / pts)
    err = float(np.max(np.abs(fz - fw) / (1 + np.abs(fz))))
    if not np.isfinite(err) or err > rtol:
        raise ExprError(f"{text!r} is not a function on the sphere "
                        "(not homogeneous of degree 0 in X0, X1?)")
    # the overlap cannot see poles at the two chart centers
    with np.errstate(all="ignore"):
        centers = [parse_expr(text, c).numeric()(np.zeros(1, dtype=complex)) for c in CHARTS]
    if not all(np.all(np.isfinite(v)) for v in centers):
        raise ExprError(f"{text!r} is singular at z = 0 or z = infinity")
    return err
