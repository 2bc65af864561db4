"""Real polynomial nonlinearities f entering i drho/dt = [H, f(rho)]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .matrix_core import apply_spectral_function, eig_hermitian, matrix_polynomial


@dataclass(frozen=True)
class Nonlinearity:
    """Polynomial f(x) = offset + sum_k coeffs[k] x^k with real coefficients.

    ``offset`` plays the role of the constant c in f_c = f + c; it never
    changes [H, f(rho)] but does enter the Lax-vector phases.
    """

    coeffs: tuple[float, ...]
    offset: float = 0.0

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("nonlinearity needs at least one coefficient")
        if not all(np.isfinite(coeffs)) or not np.isfinite(self.offset):
            raise ValueError("nonlinearity coefficients must be finite reals")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def power(cls, k: int) -> "Nonlinearity":
        if k < 1:
            raise ValueError("power must be a positive integer")
        return cls(tuple([0.0] * k + [1.0]))

    @property
    def polynomial(self) -> Polynomial:
        c = list(self.coeffs)
        c[0] += self.offset
        return Polynomial(c)

    @property
    def degree(self) -> int:
        return self.polynomial.degree()

    @property
    def is_pure_quadratic(self) -> bool:
        """True for f(x) = x^2 + const, where [H, rho^2] = [H rho + rho H, rho] applies."""
        c = np.array(self.coeffs + (0.0, 0.0, 0.0))
        return c[1] == 0.0 and c[2] == 1.0 and not np.any(c[3:])

    def __call__(self, x):
        return self.polynomial(x)

    def with_offset(self, c: float) -> "Nonlinearity":
        return Nonlinearity(self.coeffs, self.offset + c)

    def relative_to(self, x0: float) -> "Nonlinearity":
        """f'(x) = f(x) - f(x0)."""
        return self.with_offset(-float(self(x0)))

    def divided_difference(self, x: float, y: float) -> float:
        """(f(x) - f(y)) / (x - y) expanded as sum_k c_k sum_j x^j y^(k-1-j).

        The expansion avoids the cancellation of the plain quotient and
        reduces to f'(x) at x == y.
        """
        total = 0.0
        for k, c in enumerate(self.coeffs[1:], start=1):
            if c:
                total += c * sum(x**j * y ** (k - 1 - j) for j in range(k))
        return float(total)

    def composed_shift(self, s: float) -> "Nonlinearity":
        """g(x) = f(x + s)."""
        g = self.polynomial(Polynomial([s, 1.0]))
        return Nonlinearity(tuple(g.coef))

    def of_matrix(self, M) -> np.ndarray:
        """f(M) by Horner evaluation; valid for any square matrix."""
        return matrix_polynomial(self.polynomial.coef, M)

    def of_hermitian(self, M) -> np.ndarray:
        """f(M) through the spectral theorem."""
        return apply_spectral_function(self, eig_hermitian(M))


QUADRATIC = Nonlinearity.power(2)
