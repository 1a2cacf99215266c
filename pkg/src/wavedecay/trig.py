"""Exact algebra for cubic/quadratic derivative-nonlinearity symbols.

A nonlinearity ``F = F_q + F_c`` built from first derivatives of u is
described by a 3x3 coefficient tensor B (quadratic part) and a 3x3x3
tensor C (cubic part), with index 0 denoting the time derivative.
Restricting the symbols to the unit circle, with the convention that the
time slot carries -1, produces trigonometric polynomials in the monomial
basis ``cos^p1(theta) * sin^p2(theta)``.  Everything here is exact
term-by-term algebra on that basis; the Fourier form exists only as a
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

TWO_PI = 2.0 * math.pi

#: tolerance for the unit-circle constraint on directions
UNIT_TOL = 1e-12


class InvalidDirectionError(ValueError):
    """Raised when a direction fails the unit-circle constraint."""


@dataclass(frozen=True)
class Direction:
    """A point omega on the unit circle, extended by omega_0 = -1."""

    omega1: float
    omega2: float

    def __post_init__(self):
        norm2 = self.omega1 ** 2 + self.omega2 ** 2
        if abs(norm2 - 1.0) > 1e-10:
            raise InvalidDirectionError(
                f"({self.omega1}, {self.omega2}) is not on the unit circle"
            )

    @classmethod
    def from_angle(cls, theta: float) -> "Direction":
        return cls(math.cos(theta), math.sin(theta))

    @property
    def hat(self) -> tuple[float, float, float]:
        return (-1.0, self.omega1, self.omega2)

    @property
    def angle(self) -> float:
        return math.atan2(self.omega2, self.omega1) % TWO_PI


def _as_tensor(arr, shape, name):
    out = np.asarray(arr, dtype=float).reshape(shape)
    out = out.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class NonlinearityCoefficients:
    """Coefficient tensors of the quadratic (B) and cubic (C) parts.

    Stored exactly as given; evaluations sum over all index orderings, so
    they are invariant under symmetrization of the tensors.
    """

    B: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    C: np.ndarray = field(default_factory=lambda: np.zeros((3, 3, 3)))

    def __post_init__(self):
        object.__setattr__(self, "B", _as_tensor(self.B, (3, 3), "B"))
        object.__setattr__(self, "C", _as_tensor(self.C, (3, 3, 3), "C"))

    @classmethod
    def from_dict(cls, d: dict) -> "NonlinearityCoefficients":
        """Build from the shared config format: "B" row-major 9 reals,
        "C" 27 reals with the last index fastest."""
        B = np.zeros((3, 3))
        C = np.zeros((3, 3, 3))
        if "B" in d and d["B"] is not None:
            B = np.asarray(d["B"], dtype=float).reshape(3, 3)
        if "C" in d and d["C"] is not None:
            C = np.asarray(d["C"], dtype=float).reshape(3, 3, 3)
        return cls(B=B, C=C)

    def to_dict(self) -> dict:
        return {"B": self.B.ravel().tolist(), "C": self.C.ravel().tolist()}

    def symmetrized(self) -> "NonlinearityCoefficients":
        Bs = 0.5 * (self.B + self.B.T)
        Cs = np.zeros((3, 3, 3))
        import itertools

        for perm in itertools.permutations(range(3)):
            Cs += np.transpose(self.C, perm)
        Cs /= 6.0
        return NonlinearityCoefficients(B=Bs, C=Cs)


def eval_quadratic_symbol(coeffs: NonlinearityCoefficients, direction: Direction) -> float:
    """Quadratic symbol sum_{jk} B_jk w_j w_k with w = (-1, omega1, omega2)."""
    w = np.array(direction.hat)
    return float(np.einsum("jk,j,k->", coeffs.B, w, w))


def eval_cubic_symbol(coeffs: NonlinearityCoefficients, direction: Direction) -> float:
    """Cubic symbol P(omega) = sum_{jkl} C_jkl w_j w_k w_l with w = (-1, omega)."""
    w = np.array(direction.hat)
    return float(np.einsum("jkl,j,k,l->", coeffs.C, w, w, w))


@dataclass(frozen=True)
class TrigPolynomial:
    """Finite sum of monomials coef * cos^p1(theta) * sin^p2(theta).

    The term list is canonicalized (merged, sorted) on construction, so
    equal-looking polynomials compare equal term-by-term.  Note that the
    monomial basis is not linearly independent (cos^2 + sin^2 = 1); use
    the Fourier form for semantic equality checks.
    """

    terms: tuple[tuple[int, int, float], ...] = ()

    def __post_init__(self):
        merged: dict[tuple[int, int], float] = {}
        for p1, p2, c in self.terms:
            if p1 < 0 or p2 < 0:
                raise ValueError("monomial exponents must be nonnegative")
            key = (int(p1), int(p2))
            merged[key] = merged.get(key, 0.0) + float(c)
        canon = tuple(
            (p1, p2, c) for (p1, p2), c in sorted(merged.items()) if c != 0.0
        )
        object.__setattr__(self, "terms", canon)

    @classmethod
    def zero(cls) -> "TrigPolynomial":
        return cls(())

    @classmethod
    def constant(cls, c: float) -> "TrigPolynomial":
        return cls(((0, 0, c),))

    @property
    def degree(self) -> int:
        if not self.terms:
            return 0
        return max(p1 + p2 for p1, p2, _ in self.terms)

    @property
    def max_abs_coef(self) -> float:
        if not self.terms:
            return 0.0
        return max(abs(c) for _, _, c in self.terms)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        ct, st = np.cos(theta), np.sin(theta)
        out = np.zeros_like(theta)
        for p1, p2, c in self.terms:
            out = out + c * ct ** p1 * st ** p2
        if out.ndim == 0:
            return float(out)
        return out

    def derivative(self) -> "TrigPolynomial":
        """Exact term-by-term derivative in theta."""
        new = []
        for p1, p2, c in self.terms:
            if p1 > 0:
                new.append((p1 - 1, p2 + 1, -p1 * c))
            if p2 > 0:
                new.append((p1 + 1, p2 - 1, p2 * c))
        return TrigPolynomial(tuple(new))

    def derivatives(self, n: int) -> list["TrigPolynomial"]:
        """[self, self', ..., self^(n)]."""
        out = [self]
        for _ in range(n):
            out.append(out[-1].derivative())
        return out

    def __add__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        return TrigPolynomial(self.terms + other.terms)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return TrigPolynomial(tuple((p1, p2, c * other) for p1, p2, c in self.terms))
        new = []
        for a1, a2, ca in self.terms:
            for b1, b2, cb in other.terms:
                new.append((a1 + b1, a2 + b2, ca * cb))
        return TrigPolynomial(tuple(new))

    __rmul__ = __mul__

    def __neg__(self):
        return self * (-1.0)

    def __sub__(self, other):
        return self + (-other)

    def to_fourier(self) -> tuple[np.ndarray, np.ndarray]:
        """Fourier coefficients (a, b) with Psi = a_0 + sum a_k cos k th + b_k sin k th.

        Computed by FFT on a uniform grid dense enough that the transform
        of a degree-d trigonometric polynomial is exact.
        """
        d = self.degree
        n = 2 * d + 2  # strictly above Nyquist for degree d
        thetas = TWO_PI * np.arange(n) / n
        vals = self(thetas)
        coef = np.fft.rfft(np.atleast_1d(vals)) / n
        a = np.zeros(d + 1)
        b = np.zeros(d + 1)
        a[0] = coef[0].real
        for k in range(1, d + 1):
            a[k] = 2.0 * coef[k].real
            b[k] = -2.0 * coef[k].imag
        return a, b

    def eval_fourier(self, theta) -> np.ndarray:
        """Evaluate via the Fourier form; cross-check for __call__."""
        a, b = self.to_fourier()
        theta = np.asarray(theta, dtype=float)
        out = np.full_like(theta, a[0])
        for k in range(1, len(a)):
            out = out + a[k] * np.cos(k * theta) + b[k] * np.sin(k * theta)
        if out.ndim == 0:
            return float(out)
        return out

    def max_abs_fourier(self) -> float:
        a, b = self.to_fourier()
        return float(max(np.abs(a).max(), np.abs(b).max()))


def quadratic_to_trig_poly(coeffs: NonlinearityCoefficients) -> TrigPolynomial:
    """F_q(hat omega(theta)) as a degree-2 trigonometric polynomial."""
    terms = []
    for j in range(3):
        for k in range(3):
            c = coeffs.B[j, k]
            if c == 0.0:
                continue
            sign = (-1.0) ** ((j == 0) + (k == 0))
            p1 = (j == 1) + (k == 1)
            p2 = (j == 2) + (k == 2)
            terms.append((p1, p2, sign * c))
    return TrigPolynomial(tuple(terms))


def cubic_to_trig_poly(coeffs: NonlinearityCoefficients) -> TrigPolynomial:
    """Psi(theta) = P(cos theta, sin theta) for the cubic symbol."""
    terms = []
    for j in range(3):
        for k in range(3):
            for l in range(3):
                c = coeffs.C[j, k, l]
                if c == 0.0:
                    continue
                nzero = (j == 0) + (k == 0) + (l == 0)
                p1 = (j == 1) + (k == 1) + (l == 1)
                p2 = (j == 2) + (k == 2) + (l == 2)
                terms.append((p1, p2, ((-1.0) ** nzero) * c))
    return TrigPolynomial(tuple(terms))


def eval_trig(psi: TrigPolynomial, theta):
    """Numeric evaluation of a trigonometric polynomial (alias of call)."""
    return psi(theta)
