"""Sparse multivariate polynomials over complex coefficients.

Exponents are plain tuples of non-negative ints; a polynomial is a map
exponent -> coefficient with no explicitly stored zeros, so equal term maps
mean equal polynomials. All values are immutable after construction and
every operation is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DegenerateDirectionError, DimensionMismatchError

Exponent = tuple[int, ...]


def total_degree(alpha: Exponent) -> int:
    return sum(alpha)


def factorial(alpha: Exponent) -> int:
    """alpha! = alpha_1! * ... * alpha_n!"""
    out = 1
    for a in alpha:
        out *= math.factorial(a)
    return out


def exponent_sub(alpha: Exponent, beta: Exponent) -> Exponent | None:
    """alpha - beta componentwise, or None if any component goes negative."""
    diff = tuple(a - b for a, b in zip(alpha, beta))
    if any(d < 0 for d in diff):
        return None
    return diff


@dataclass(frozen=True)
class MonomialOrder:
    """A global monomial order: graded lex, or weighted with grlex tie-break."""

    weights: tuple[float, ...] | None = None

    @classmethod
    def grlex(cls) -> "MonomialOrder":
        return cls(None)

    @classmethod
    def weighted(cls, w: Sequence[float]) -> "MonomialOrder":
        return cls(tuple(float(x) for x in w))

    def key(self, alpha: Exponent):
        """Sort key; ascending sort by this key is ascending in the order."""
        if self.weights is None:
            return (total_degree(alpha), alpha)
        if len(self.weights) != len(alpha):
            raise DimensionMismatchError(
                f"weight vector has length {len(self.weights)}, exponent {len(alpha)}"
            )
        w = sum(wi * ai for wi, ai in zip(self.weights, alpha))
        return (w, total_degree(alpha), alpha)


GRLEX = MonomialOrder.grlex()


def compare_monomials(a: Exponent, b: Exponent, order: MonomialOrder = GRLEX) -> int:
    """-1, 0, or 1 as a is below, equal to, or above b in the order."""
    if len(a) != len(b):
        raise DimensionMismatchError(f"exponent lengths differ: {len(a)} vs {len(b)}")
    ka, kb = order.key(a), order.key(b)
    return (ka > kb) - (ka < kb)


def _as_vector(pt: Sequence[complex], nvars: int, what: str = "point") -> np.ndarray:
    v = np.asarray(pt, dtype=complex).reshape(-1)
    if v.shape[0] != nvars:
        raise DimensionMismatchError(f"{what} has length {v.shape[0]}, expected {nvars}")
    return v


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "_terms")

    def __init__(self, nvars: int, terms: Mapping[Exponent, complex] | None = None):
        clean: dict[Exponent, complex] = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != nvars:
                raise DimensionMismatchError(
                    f"exponent {alpha} has length {len(alpha)}, expected {nvars}"
                )
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative exponent entry in {alpha}")
            c = complex(c)
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + c
                if clean[alpha] == 0:
                    del clean[alpha]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "_terms", clean)

    def __setattr__(self, *_):
        raise AttributeError("Polynomial is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c: complex) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def monomial(cls, nvars: int, alpha: Exponent, c: complex = 1) -> "Polynomial":
        return cls(nvars, {tuple(alpha): c})

    @classmethod
    def variable(cls, nvars: int, i: int) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    # -- inspection --------------------------------------------------------

    @property
    def terms(self) -> dict[Exponent, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, alpha: Exponent) -> complex:
        return self._terms.get(tuple(alpha), 0j)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(total_degree(a) for a in self._terms)

    def support(self) -> set[Exponent]:
        return set(self._terms)

    def max_coeff_magnitude(self) -> float:
        if not self._terms:
            return 0.0
        return max(abs(c) for c in self._terms.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self._terms!r})"

    def __str__(self):
        return self.to_string()

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DimensionMismatchError(
                    f"polynomials in {self.nvars} and {other.nvars} variables"
                )
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self._terms)
        for a, c in other._terms.items():
            out[a] = out.get(a, 0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.nvars, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            c = complex(other)
            return Polynomial(self.nvars, {a: c * v for a, v in self._terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, complex] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                key = tuple(x + y for x, y in zip(a, b))
                out[key] = out.get(key, 0) + ca * cb
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    # -- calculus ----------------------------------------------------------

    def diff_once(self, i: int) -> "Polynomial":
        out: dict[Exponent, complex] = {}
        for a, c in self._terms.items():
            if a[i] == 0:
                continue
            b = list(a)
            b[i] -= 1
            out[tuple(b)] = out.get(tuple(b), 0) + c * a[i]
        return Polynomial(self.nvars, out)

    def diff(self, beta: Exponent) -> "Polynomial":
        """Mixed partial derivative d^beta (unscaled)."""
        beta = tuple(beta)
        if len(beta) != self.nvars:
            raise DimensionMismatchError(
                f"derivative index has length {len(beta)}, expected {self.nvars}"
            )
        out: dict[Exponent, complex] = {}
        for alpha, c in self._terms.items():
            rem = exponent_sub(alpha, beta)
            if rem is None:
                continue
            # Leibniz on a monomial: factor alpha!/(alpha-beta)!
            fac = 1
            for a, b in zip(alpha, beta):
                for k in range(a - b + 1, a + 1):
                    fac *= k
            out[rem] = out.get(rem, 0) + c * fac
        return Polynomial(self.nvars, out)

    def monomial_multiply(self, alpha: Exponent) -> "Polynomial":
        """Multiply by the monomial x^alpha (exponent shift)."""
        alpha = tuple(alpha)
        if len(alpha) != self.nvars:
            raise DimensionMismatchError(
                f"shift exponent has length {len(alpha)}, expected {self.nvars}"
            )
        return Polynomial(
            self.nvars,
            {tuple(a + s for a, s in zip(e, alpha)): c for e, c in self._terms.items()},
        )

    def evaluate(self, pt: Sequence[complex]) -> complex:
        v = _as_vector(pt, self.nvars)
        total = 0j
        for alpha in sorted(self._terms, key=GRLEX.key):
            c = self._terms[alpha]
            m = 1 + 0j
            for x, a in zip(v, alpha):
                if a:
                    m *= x**a
            total += c * m
        return total

    def compose(self, subs: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute subs[i] for variable i; all subs share a variable count."""
        if len(subs) != self.nvars:
            raise DimensionMismatchError(
                f"{len(subs)} substitutions for {self.nvars} variables"
            )
        m = subs[0].nvars if subs else 0
        # powers computed lazily per variable
        pow_cache: list[dict[int, Polynomial]] = [
            {0: Polynomial.constant(m, 1)} for _ in subs
        ]

        def power(i: int, k: int) -> Polynomial:
            cache = pow_cache[i]
            if k not in cache:
                cache[k] = power(i, k - 1) * subs[i]
            return cache[k]

        out = Polynomial.zero(m)
        for alpha, c in self._terms.items():
            term = Polynomial.constant(m, c)
            for i, a in enumerate(alpha):
                if a:
                    term = term * power(i, a)
            out = out + term
        return out

    def shift(self, basepoint: Sequence[complex]) -> "Polynomial":
        """Return q(y) = p(y + basepoint)."""
        v = _as_vector(basepoint, self.nvars, "basepoint")
        subs = [
            Polynomial(self.nvars, {tuple(int(i == j) for j in range(self.nvars)): 1})
            + Polynomial.constant(self.nvars, v[i])
            for i in range(self.nvars)
        ]
        return self.compose(subs)

    def embed(self, nvars: int, offset: int = 0) -> "Polynomial":
        """View in a larger variable set, variable i becoming i + offset."""
        if offset + self.nvars > nvars:
            raise DimensionMismatchError("embedding does not fit target variable count")
        pad_front = (0,) * offset
        pad_back = (0,) * (nvars - offset - self.nvars)
        return Polynomial(
            nvars, {pad_front + a + pad_back: c for a, c in self._terms.items()}
        )

    # -- formatting --------------------------------------------------------

    def to_string(self, var_names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = var_names or [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for alpha in sorted(self._terms, key=GRLEX.key):
            c = self._terms[alpha]
            factors = []
            if c.imag == 0:
                re = c.real
                coeff = "" if re == 1 and any(alpha) else f"{_fmt_real(re)}"
                if re == -1 and any(alpha):
                    coeff = "-"
            else:
                coeff = f"({_fmt_real(c.real)},{_fmt_real(c.imag)})"
            if coeff and coeff not in ("-",):
                factors.append(coeff)
            for name, a in zip(names, alpha):
                if a == 1:
                    factors.append(name)
                elif a > 1:
                    factors.append(f"{name}^{a}")
            body = "*".join(f for f in factors if f) or "1"
            if coeff == "-":
                body = "-" + body
            parts.append(body)
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out


def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


@dataclass(frozen=True)
class PolySystem:
    """An ordered system F = (f_1, ..., f_N) sharing one variable set."""

    nvars: int
    polys: tuple[Polynomial, ...]
    var_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if len(self.polys) < 1:
            raise ValueError("a system needs at least one polynomial")
        object.__setattr__(self, "polys", tuple(self.polys))
        for p in self.polys:
            if p.nvars != self.nvars:
                raise DimensionMismatchError(
                    f"system over {self.nvars} variables contains a polynomial "
                    f"in {p.nvars}"
                )
        names = tuple(self.var_names) or tuple(
            f"x{i + 1}" for i in range(self.nvars)
        )
        if len(names) != self.nvars:
            raise DimensionMismatchError("var_names length does not match nvars")
        object.__setattr__(self, "var_names", names)

    @property
    def nequations(self) -> int:
        return len(self.polys)

    def evaluate(self, pt: Sequence[complex]) -> np.ndarray:
        v = _as_vector(pt, self.nvars)
        return np.array([p.evaluate(v) for p in self.polys], dtype=complex)

    def jacobian(self) -> list[list[Polynomial]]:
        return [[p.diff_once(j) for j in range(self.nvars)] for p in self.polys]

    def jacobian_at(self, pt: Sequence[complex]) -> np.ndarray:
        v = _as_vector(pt, self.nvars)
        return np.array(
            [[p.diff_once(j).evaluate(v) for j in range(self.nvars)] for p in self.polys],
            dtype=complex,
        )

    def jacobian_scale(self) -> float:
        """Max coefficient magnitude across all first partials (at least 1).

        Reference magnitude for rank decisions on evaluated Jacobians: near a
        singular root the evaluated matrix is uniformly tiny, so comparing
        its singular values only against each other would declare full rank.
        """
        best = 1.0
        for p in self.polys:
            for j in range(self.nvars):
                best = max(best, p.diff_once(j).max_coeff_magnitude())
        return best

    def coeff_scales(self) -> np.ndarray:
        """Per-equation max coefficient magnitude (for relative residuals)."""
        return np.array([max(p.max_coeff_magnitude(), 1.0) for p in self.polys])

    def residual(self, pt: Sequence[complex]) -> float:
        """Max relative residual |f_j(pt)| / max(1, coeff scale of f_j)."""
        vals = np.abs(self.evaluate(pt)) / self.coeff_scales()
        return float(vals.max())

    def shift(self, basepoint: Sequence[complex]) -> "PolySystem":
        return PolySystem(
            self.nvars,
            tuple(p.shift(basepoint) for p in self.polys),
            self.var_names,
        )


@dataclass(frozen=True)
class UnivariateSupport:
    """Per-equation univariate coefficient maps of H(t) = F(x0 + gamma*t)."""

    coeffs: tuple[dict[int, complex], ...]
    max_magnitudes: tuple[float, ...]

    def evaluate(self, t: complex) -> np.ndarray:
        return np.array(
            [sum(c * t**k for k, c in eq.items()) for eq in self.coeffs],
            dtype=complex,
        )

    def support(self, tol_coeff: float) -> set[int]:
        """Degrees whose coefficient exceeds tol_coeff relative per equation."""
        degs: set[int] = set()
        for eq, scale in zip(self.coeffs, self.max_magnitudes):
            if scale == 0:
                continue
            degs.update(k for k, c in eq.items() if abs(c) > tol_coeff * scale)
        return degs


def substitute_line(
    F: PolySystem, x0: Sequence[complex], gamma: Sequence[complex]
) -> UnivariateSupport:
    """Exact expansion of H(t) = F(x0 + gamma*t), one coefficient map per f_j."""
    v = _as_vector(x0, F.nvars)
    g = _as_vector(gamma, F.nvars, "direction")
    if not np.any(g):
        raise DegenerateDirectionError("direction vector is zero")
    coeffs = []
    mags = []
    for p in F.polys:
        eq: dict[int, complex] = {}
        for alpha, c in p.items():
            # expand prod_i (x0_i + g_i t)^a_i via binomial coefficients
            conv = {0: c + 0j}
            for xi, gi, a in zip(v, g, alpha):
                if a == 0:
                    continue
                base = {
                    k: math.comb(a, k) * xi ** (a - k) * gi**k for k in range(a + 1)
                }
                nxt: dict[int, complex] = {}
                for d1, c1 in conv.items():
                    for d2, c2 in base.items():
                        nxt[d1 + d2] = nxt.get(d1 + d2, 0) + c1 * c2
                conv = nxt
            for d, cv in conv.items():
                eq[d] = eq.get(d, 0) + cv
        eq = {d: cv for d, cv in eq.items() if cv != 0}
        coeffs.append(eq)
        # Reference scale per equation: the restriction's own largest
        # coefficient, floored by the polynomial's coefficient scale so a
        # unit-norm direction does not inflate relative magnitudes.
        h_max = max((abs(cv) for cv in eq.values()), default=0.0)
        mags.append(max(h_max, p.max_coeff_magnitude()) if eq else 0.0)
    return UnivariateSupport(tuple(coeffs), tuple(mags))


@dataclass(frozen=True)
class Functional:
    """A differential functional L = sum c_alpha D_alpha at a basepoint.

    D_alpha(f) = (1/alpha!) * (d^alpha f)(basepoint), so D_alpha picks the
    coefficient of (x - basepoint)^alpha.
    """

    nvars: int
    terms: dict[Exponent, complex]
    basepoint: tuple[complex, ...]

    def __post_init__(self):
        clean = {}
        for a, c in self.terms.items():
            a = tuple(int(x) for x in a)
            if len(a) != self.nvars:
                raise DimensionMismatchError(
                    f"functional exponent {a} has length {len(a)}, expected {self.nvars}"
                )
            if c != 0:
                clean[a] = complex(c)
        object.__setattr__(self, "terms", clean)
        bp = tuple(complex(b) for b in self.basepoint)
        if len(bp) != self.nvars:
            raise DimensionMismatchError("basepoint length does not match nvars")
        object.__setattr__(self, "basepoint", bp)

    @classmethod
    def delta(cls, nvars: int, alpha: Exponent, basepoint=None) -> "Functional":
        bp = basepoint if basepoint is not None else (0,) * nvars
        return cls(nvars, {tuple(alpha): 1}, tuple(bp))

    def support(self) -> set[Exponent]:
        return set(self.terms)

    def leading_exponent(self, order: MonomialOrder = GRLEX) -> Exponent:
        return max(self.terms, key=order.key)

    def apply(self, p: Polynomial) -> complex:
        return apply_functional(self, p)


def apply_functional(L: Functional, p: Polynomial) -> complex:
    """sum_alpha c_alpha * (1/alpha!) * (d^alpha p)(basepoint)."""
    if L.nvars != p.nvars:
        raise DimensionMismatchError(
            f"functional in {L.nvars} variables applied to polynomial in {p.nvars}"
        )
    bp = np.array(L.basepoint, dtype=complex)
    total = 0j
    for alpha in sorted(L.terms, key=GRLEX.key):
        c = L.terms[alpha]
        total += c * p.diff(alpha).evaluate(bp) / factorial(alpha)
    return total
