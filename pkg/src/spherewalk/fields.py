"""Source and boundary data for the solver.

A :class:`Field` is either a degree-2 polynomial with diagonal quadratic
part (``c0 + a.x + sum_i q_i x_i**2``), which the fast solver path can
evaluate inside its compiled kernel, or an arbitrary vectorized callable,
which routes evaluation through the generic path.

The catalog ships the test data used throughout: ``f = 1`` and the
globally smooth quadratic ``u(x) = x_1^2 + ... + x_k^2 - x_{k+1}^2 - ...
- x_d^2 - x_1^2`` (d = 2k) that solves the unit-source Poisson problem,
restricted to the boundary as g.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .geometry import Domain


@dataclass(frozen=True)
class Field:
    dim: int
    const: float = 0.0
    lin: Optional[np.ndarray] = None
    quad: Optional[np.ndarray] = None
    fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""

    @property
    def is_poly2(self) -> bool:
        return self.fn is None

    @property
    def is_zero(self) -> bool:
        return (
            self.is_poly2
            and self.const == 0.0
            and (self.lin is None or not self.lin.any())
            and (self.quad is None or not self.quad.any())
        )

    @property
    def is_const(self) -> bool:
        return (
            self.is_poly2
            and (self.lin is None or not self.lin.any())
            and (self.quad is None or not self.quad.any())
        )

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.fn is not None:
            return np.asarray(self.fn(X), dtype=float)
        out = np.full(X.shape[0], self.const)
        if self.lin is not None:
            out += X @ self.lin
        if self.quad is not None:
            out += (X * X) @ self.quad
        return out

    def at(self, x) -> float:
        return float(self(np.asarray(x, dtype=float)[None, :])[0])

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(dim: int) -> "Field":
        return Field(dim, name="zero")

    @staticmethod
    def constant(c: float, dim: int) -> "Field":
        return Field(dim, const=float(c), name=f"const:{c}")

    @staticmethod
    def linear(coeffs, dim: int, const: float = 0.0) -> "Field":
        a = np.zeros(dim)
        a[: len(np.atleast_1d(coeffs))] = np.atleast_1d(coeffs)
        return Field(dim, const=float(const), lin=a, name="linear")

    @staticmethod
    def poly2(dim: int, const: float = 0.0, lin=None, quad=None, name: str = "poly2") -> "Field":
        a = None if lin is None else np.asarray(lin, dtype=float).copy()
        q = None if quad is None else np.asarray(quad, dtype=float).copy()
        return Field(dim, const=float(const), lin=a, quad=q, name=name)

    @staticmethod
    def from_callable(fn: Callable[[np.ndarray], np.ndarray], dim: int, name: str = "callable") -> "Field":
        return Field(dim, fn=fn, name=name)

    # -- norm helpers (upper bounds over the bounding cube) ---------------

    def sup_on(self, domain: Domain) -> float:
        """Upper bound on sup |field| over the domain (exact on hypercubes)."""
        if not self.is_poly2:
            raise ValueError("sup_on is only available for polynomial fields")
        h = domain.bounding_halfwidth
        lo = hi = self.const
        for i in range(self.dim):
            a = self.lin[i] if self.lin is not None else 0.0
            q = self.quad[i] if self.quad is not None else 0.0
            vals = [q * h * h + a * h, q * h * h - a * h]
            if q != 0.0 and abs(a / (2 * q)) <= h:
                vals.append(-a * a / (4 * q))
            lo += min(vals)
            hi += max(vals)
        return max(abs(lo), abs(hi))

    def lipschitz_on(self, domain: Domain) -> float:
        """Upper bound on the Lipschitz constant over the domain."""
        if not self.is_poly2:
            raise ValueError("lipschitz_on is only available for polynomial fields")
        h = domain.bounding_halfwidth
        g = np.zeros(self.dim)
        if self.lin is not None:
            g += np.abs(self.lin)
        if self.quad is not None:
            g += 2.0 * np.abs(self.quad) * h
        return float(np.sqrt((g * g).sum()))


def exact_quadratic_solution(dim: int) -> Field:
    """Global solution of the unit-source problem used for validation.

    u(x) = x_1^2 + ... + x_k^2 - x_{k+1}^2 - ... - x_d^2 - x_1^2 with
    d = 2k; its Laplacian is -2 everywhere, i.e. (1/2) lap u = -1.
    """
    if dim % 2 != 0:
        raise ValueError("the exact quadratic solution needs an even dimension")
    k = dim // 2
    quad = np.concatenate([np.ones(k), -np.ones(dim - k)])
    quad[0] -= 1.0
    return Field.poly2(dim, quad=quad, name="exact_quadratic")


def ball_unit_source_solution(radius: float, dim: int) -> Field:
    """u(x) = (R^2 - |x|^2)/d, the unit-source solution on a ball."""
    quad = np.full(dim, -1.0 / dim)
    return Field.poly2(dim, const=radius**2 / dim, quad=quad, name="ball_unit_source")


CATALOG = {
    "zero": lambda dim: Field.zero(dim),
    "one": lambda dim: Field.constant(1.0, dim),
    "exact_u": exact_quadratic_solution,
    "x1": lambda dim: Field.linear([1.0], dim),
}


def catalog_field(name: str, dim: int) -> Field:
    """Resolve a catalog entry, e.g. 'one', 'exact_u', 'const:2.5'."""
    if name in CATALOG:
        return CATALOG[name](dim)
    if name.startswith("const:"):
        return Field.constant(float(name.split(":", 1)[1]), dim)
    raise KeyError(f"unknown catalog field {name!r}")
