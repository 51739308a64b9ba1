"""Test functions psi on CP^m, paired with zero currents as psi * omega^(m-1).

Two families:

* :class:`SpherePolynomial` -- real polynomials in the sphere coordinates
  ``(u, v, w)`` of CP^1 = S^2, with an exact spherical Laplacian.
* :class:`MomentPolynomial` -- real polynomials in the entries of the moment
  matrix ``w w* / |w|^2`` on CP^m, with a finite-difference Laplacian.

Both expose ``pl_density(points)``: the density against the unit-mass FS
volume of the form (i/pi) dd-bar psi ^ omega^(m-1).  In a chart this is
``(2/m) tr(h^-1 H_psi)`` with ``H_psi`` the complex Hessian of psi and ``h``
the complex Hessian of ``log(1 + |z|^2)``; on CP^1 it reduces to twice the
round Laplacian of the unit sphere.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .finite_diff import complex_hessian
from .projective import sphere_coords_rows

__all__ = ["SpherePolynomial", "MomentPolynomial", "parse_test_function"]


def _parse_poly(expr: str, names: list[str]) -> dict[tuple[int, ...], float]:
    import sympy

    symbols = sympy.symbols(names)
    local = dict(zip(names, symbols))
    parsed = sympy.sympify(expr, locals=local)
    extra = parsed.free_symbols - set(symbols)
    if extra:
        raise ValueError(f"unknown variables in test function: {sorted(map(str, extra))}")
    poly = sympy.Poly(parsed, *symbols)
    return {tuple(int(e) for e in mon): float(c) for mon, c in poly.terms() if c != 0}


@dataclass(frozen=True)
class SpherePolynomial:
    """``sum coeff * u^a v^b w^c`` restricted to the unit sphere."""

    terms: tuple[tuple[tuple[int, int, int], float], ...]
    text: str = ""

    m = 1

    def __init__(self, terms, text: str = ""):
        if isinstance(terms, dict):
            terms = terms.items()
        clean = tuple(sorted((tuple(int(e) for e in k), float(c)) for k, c in terms if c != 0))
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "text", text or self._render(clean))

    @staticmethod
    def _render(terms):
        if not terms:
            return "0"
        parts = []
        for (a, b, c), coef in terms:
            mono = "*".join(f"{n}**{e}" if e > 1 else n for n, e in zip("uvw", (a, b, c)) if e)
            parts.append(f"{coef!r}*{mono}" if mono else f"{coef!r}")
        return " + ".join(parts)

    @classmethod
    def parse(cls, expr: str) -> "SpherePolynomial":
        return cls(_parse_poly(expr, ["u", "v", "w"]), text=expr)

    @classmethod
    def constant(cls, c: float) -> "SpherePolynomial":
        return cls({(0, 0, 0): c})

    @property
    def degree(self) -> int:
        return max((sum(k) for k, _ in self.terms), default=0)

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def on_sphere(self, X) -> np.ndarray:
        """Evaluate at sphere coordinates ``X`` of shape ``(n, 3)``."""
        X = np.atleast_2d(X)
        out = np.zeros(len(X))
        for (a, b, c), coef in self.terms:
            out += coef * X[:, 0] ** a * X[:, 1] ** b * X[:, 2] ** c
        return out

    def __call__(self, points) -> np.ndarray:
        """Evaluate at CP^1 points given as unit homogeneous rows ``(n, 2)``."""
        return self.on_sphere(sphere_coords_rows(points))

    def _derivative(self, X, orders):
        # orders: exponent decrements per variable, e.g. (1, 0, 0) for d/du
        out = np.zeros(len(X))
        for k, coef in self.terms:
            factor = coef
            powers = []
            for e, d in zip(k, orders):
                if e < d:
                    factor = 0.0
                    break
                for t in range(d):
                    factor *= e - t
                powers.append(e - d)
            if factor:
                out += factor * X[:, 0] ** powers[0] * X[:, 1] ** powers[1] * X[:, 2] ** powers[2]
        return out

    def sphere_laplacian(self, X) -> np.ndarray:
        """Round Laplacian on S^2 of the restriction, at sphere coordinates ``X``.

        For F on R^3: lap_S2 F = lap F - x.Hess(F).x - 2 x.grad F at |x| = 1.
        """
        X = np.atleast_2d(X)
        unit = np.eye(3, dtype=int)
        grad = [self._derivative(X, unit[i]) for i in range(3)]
        hess = [[self._derivative(X, unit[i] + unit[j]) for j in range(3)] for i in range(3)]
        lap = hess[0][0] + hess[1][1] + hess[2][2]
        radial2 = sum(X[:, i] * X[:, j] * hess[i][j] for i in range(3) for j in range(3))
        radial1 = sum(X[:, i] * grad[i] for i in range(3))
        return lap - radial2 - 2.0 * radial1

    def pl_density(self, points) -> np.ndarray:
        return 2.0 * self.sphere_laplacian(sphere_coords_rows(points))

    def to_json(self) -> dict:
        return {"kind": "sphere", "terms": [{"pow_u": k[0], "pow_v": k[1], "pow_w": k[2], "coeff": c} for k, c in self.terms]}

    def __str__(self):
        return self.text


def _moment_names(m: int) -> list[str]:
    names = [f"x{a}{b}" for a in range(m + 1) for b in range(a, m + 1)]
    names += [f"y{a}{b}" for a in range(m + 1) for b in range(a + 1, m + 1)]
    return names


class MomentPolynomial:
    """Polynomial in ``x_ab = Re(w_a conj w_b)/|w|^2`` and ``y_ab = Im(...)``.

    Variable names are ``x{a}{b}`` (a <= b) and ``y{a}{b}`` (a < b).
    """

    def __init__(self, m: int, terms: dict[tuple[int, ...], float], text: str = ""):
        self.m = m
        self.names = _moment_names(m)
        self.terms = {tuple(k): float(c) for k, c in terms.items() if c != 0}
        for k in self.terms:
            if len(k) != len(self.names):
                raise ValueError("exponent tuple does not match the moment variables")
        self.text = text

    @classmethod
    def parse(cls, m: int, expr: str) -> "MomentPolynomial":
        return cls(m, _parse_poly(expr, _moment_names(m)), text=expr)

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    @property
    def is_constant(self) -> bool:
        return self.degree == 0

    def _variables(self, W):
        W = np.atleast_2d(W)
        norm2 = np.sum(np.abs(W) ** 2, axis=1)
        mu = W[:, :, None] * np.conj(W[:, None, :]) / norm2[:, None, None]
        m = self.m
        cols = [mu[:, a, b].real for a in range(m + 1) for b in range(a, m + 1)]
        cols += [mu[:, a, b].imag for a in range(m + 1) for b in range(a + 1, m + 1)]
        return np.stack(cols, axis=1)

    def __call__(self, points) -> np.ndarray:
        V = self._variables(points)
        out = np.zeros(len(V))
        for k, coef in self.terms.items():
            out += coef * np.prod(V ** np.array(k), axis=1)
        return out

    def pl_density(self, points) -> np.ndarray:
        W = np.atleast_2d(np.asarray(points, dtype=complex))
        out = np.empty(len(W))
        if self.is_constant:
            out[:] = 0.0
            return out
        charts = np.argmax(np.abs(W), axis=1)
        for c in np.unique(charts):
            sel = charts == c
            Z = np.delete(W[sel], c, axis=1) / W[sel, c][:, None]

            def f(Zc, c=c):
                return self(np.insert(Zc, c, 1.0, axis=1))

            H = complex_hessian(f, Z)
            r2 = np.sum(np.abs(Z) ** 2, axis=1)
            h = (np.eye(self.m)[None] * (1.0 + r2)[:, None, None]
                 - np.conj(Z)[:, :, None] * Z[:, None, :]) / ((1.0 + r2) ** 2)[:, None, None]
            tr = np.einsum("nab,nba->n", np.linalg.inv(h), H)
            out[sel] = (2.0 / self.m) * tr.real
        return out

    def to_json(self) -> dict:
        return {"kind": "moment", "m": self.m, "expr": self.text or repr(self.terms)}

    def __str__(self):
        return self.text or f"MomentPolynomial(m={self.m})"


def parse_test_function(expr, m: int = 1):
    """Build a test function from a string such as ``"u**2 - 1/3"`` or ``"x11"``."""
    if not isinstance(expr, str):
        expr = str(expr)
    if m == 1 and not re.search(r"[xy]\d\d", expr):
        return SpherePolynomial.parse(expr)
    return MomentPolynomial.parse(m, expr)

