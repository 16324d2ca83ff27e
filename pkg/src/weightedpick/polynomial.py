"""Multi-indices and sparse multivariate polynomials with complex coefficients."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError

MultiIndex = tuple[int, ...]


def as_multi_index(alpha: Iterable[int]) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if any(a < 0 for a in alpha):
        raise InputError("negative-exponent", f"multi-index {alpha} has a negative entry")
    return alpha


def total_degree(alpha: MultiIndex) -> int:
    return sum(alpha)


def add_indices(alpha: MultiIndex, beta: MultiIndex) -> MultiIndex:
    return tuple(a + b for a, b in zip(alpha, beta))


@lru_cache(maxsize=None)
def multi_indices(dim: int, max_degree: int) -> tuple[MultiIndex, ...]:
    """All multi-indices of length `dim` with total degree <= `max_degree`.

    Graded lexicographic order: by total degree first, then lexicographically
    with larger leading exponents first, e.g. ``(0,0), (1,0), (0,1), (2,0), ...``.
    Because the order is graded, the list for a smaller degree is a prefix of
    the list for a larger one.
    """
    if dim < 1:
        raise InputError("bad-dimension", f"dimension must be >= 1, got {dim}")
    out: list[MultiIndex] = []
    for deg in range(max_degree + 1):
        level = [a for a in itertools.product(range(deg + 1), repeat=dim) if sum(a) == deg]
        level.sort(reverse=True)
        out.extend(level)
    return tuple(out)


def index_lookup(indices: Sequence[MultiIndex]) -> dict[MultiIndex, int]:
    return {a: i for i, a in enumerate(indices)}


def monomial_values(points, indices: Sequence[MultiIndex]) -> np.ndarray:
    """Evaluate every monomial ``z**alpha`` at every point.

    `points` has shape (n, d) (or (d,) for a single point); the result has
    shape (n, len(indices)).
    """
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    if not indices:
        return np.ones((pts.shape[0], 0), dtype=complex)
    exps = np.asarray(indices, dtype=int)
    if exps.shape[1] != pts.shape[1]:
        raise InputError(
            "dimension-mismatch",
            f"points have dimension {pts.shape[1]}, multi-indices have length {exps.shape[1]}",
        )
    top = int(exps.max())
    # powers[n, j, k] = z_j ** k
    powers = pts[:, :, None] ** np.arange(top + 1)[None, None, :]
    vals = np.ones((pts.shape[0], len(indices)), dtype=complex)
    for j in range(pts.shape[1]):
        vals *= powers[:, j, exps[:, j]]
    return vals


@dataclass(frozen=True, eq=False)
class CPolynomial:
    """Sparse polynomial ``sum_alpha c_alpha z**alpha`` in `dimension` variables.

    Zero coefficients are never stored. Treat instances as immutable.
    """

    dimension: int
    terms: Mapping[MultiIndex, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise InputError("bad-dimension", f"dimension must be >= 1, got {self.dimension}")
        clean: dict[MultiIndex, complex] = {}
        for alpha, c in self.terms.items():
            alpha = as_multi_index(alpha)
            if len(alpha) != self.dimension:
                raise InputError(
                    "dimension-mismatch",
                    f"multi-index {alpha} does not have length {self.dimension}",
                )
            c = complex(c)
            if c != 0:
                clean[alpha] = clean.get(alpha, 0) + c
        object.__setattr__(self, "terms", {a: c for a, c in clean.items() if c != 0})

    @classmethod
    def constant(cls, dimension: int, value: complex = 1.0) -> "CPolynomial":
        return cls(dimension, {(0,) * dimension: value})

    @classmethod
    def monomial(cls, alpha: Sequence[int], coeff: complex = 1.0) -> "CPolynomial":
        alpha = as_multi_index(alpha)
        return cls(len(alpha), {alpha: coeff})

    @classmethod
    def variable(cls, dimension: int, j: int) -> "CPolynomial":
        alpha = [0] * dimension
        alpha[j] = 1
        return cls.monomial(alpha)

    @classmethod
    def from_coefficients(cls, indices: Sequence[MultiIndex], coeffs) -> "CPolynomial":
        coeffs = np.asarray(coeffs, dtype=complex)
        if len(indices) == 0:
            raise InputError("empty-polynomial", "need at least one multi-index")
        return cls(len(indices[0]), dict(zip(indices, coeffs.tolist())))

    @property
    def degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(a) for a in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, alpha: Sequence[int]) -> complex:
        return self.terms.get(tuple(alpha), 0j)

    def coefficient_vector(self, indices: Sequence[MultiIndex]) -> np.ndarray:
        """Coefficients listed in the order of `indices`.

        Raises if a stored term is missing from `indices` (no silent truncation).
        """
        lookup = index_lookup(indices)
        vec = np.zeros(len(indices), dtype=complex)
        for alpha, c in self.terms.items():
            if alpha not in lookup:
                raise InputError("truncation", f"term {alpha} is outside the supplied index set")
            vec[lookup[alpha]] = c
        return vec

    def coefficient_norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.terms.values())))

    def normalized(self) -> "CPolynomial":
        nrm = self.coefficient_norm()
        if nrm == 0:
            raise InputError("zero-polynomial", "cannot normalize the zero polynomial")
        return self.scale(1.0 / nrm)

    def scale(self, c: complex) -> "CPolynomial":
        return CPolynomial(self.dimension, {a: c * v for a, v in self.terms.items()})

    def __call__(self, z) -> complex | np.ndarray:
        return eval_polynomial(self, z)

    def __mul__(self, other):
        if isinstance(other, CPolynomial):
            return poly_multiply(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def __add__(self, other: "CPolynomial") -> "CPolynomial":
        _check_dims(self, other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0) + c
        return CPolynomial(self.dimension, out)

    def __sub__(self, other: "CPolynomial") -> "CPolynomial":
        return self + other.scale(-1.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CPolynomial):
            return NotImplemented
        return self.dimension == other.dimension and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.dimension, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"CPolynomial({self.dimension}, 0)"
        parts = [f"({c:.6g})*z^{a}" for a, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]))]
        return f"CPolynomial({self.dimension}, " + " + ".join(parts) + ")"

    def to_json(self) -> list[dict]:
        return [
            {"alpha": list(a), "re": c.real, "im": c.imag}
            for a, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), tuple(-x for x in t[0])))
        ]

    @classmethod
    def from_json(cls, terms: list[dict], dimension: int | None = None) -> "CPolynomial":
        if not terms:
            if dimension is None:
                raise InputError("empty-polynomial", "cannot infer dimension of an empty term list")
            return cls(dimension, {})
        parsed = {}
        for t in terms:
            alpha = as_multi_index(t["alpha"])
            parsed[alpha] = parsed.get(alpha, 0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        dim = len(next(iter(parsed)))
        if dimension is not None and dim != dimension:
            raise InputError("dimension-mismatch", f"polynomial has dimension {dim}, expected {dimension}")
        return cls(dim, parsed)


def _check_dims(p: CPolynomial, q: CPolynomial) -> None:
    if p.dimension != q.dimension:
        raise InputError(
            "dimension-mismatch", f"polynomial dimensions differ: {p.dimension} vs {q.dimension}"
        )


def eval_polynomial(p: CPolynomial, z) -> complex | np.ndarray:
    """Evaluate `p` at a point (shape (d,)) or a batch of points (shape (n, d))."""
    arr = np.asarray(z, dtype=complex)
    single = arr.ndim <= 1
    if arr.ndim == 0:
        arr = arr.reshape(1)
    pts = np.atleast_2d(arr)
    if pts.shape[1] != p.dimension:
        raise InputError(
            "dimension-mismatch", f"point has dimension {pts.shape[1]}, polynomial has {p.dimension}"
        )
    if not p.terms:
        vals = np.zeros(pts.shape[0], dtype=complex)
    else:
        idx = list(p.terms)
        vals = monomial_values(pts, idx) @ np.array([p.terms[a] for a in idx])
    return complex(vals[0]) if single else vals


def poly_multiply(p: CPolynomial, q: CPolynomial) -> CPolynomial:
    _check_dims(p, q)
    out: dict[MultiIndex, complex] = {}
    for a, c in p.terms.items():
        for b, e in q.terms.items():
            key = add_indices(a, b)
            out[key] = out.get(key, 0) + c * e
    return CPolynomial(p.dimension, out)


def random_polynomial(dim: int, max_degree: int, rng: np.random.Generator) -> CPolynomial:
    """Unit-coefficient-norm polynomial with i.i.d. standard complex Gaussian coefficients."""
    idx = multi_indices(dim, max_degree)
    c = (rng.standard_normal(len(idx)) + 1j * rng.standard_normal(len(idx))) / np.sqrt(2.0)
    c /= np.linalg.norm(c)
    return CPolynomial.from_coefficients(idx, c)
