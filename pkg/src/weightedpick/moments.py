"""Monomial moments ``int z^alpha conj(z^beta) dmu`` of the supported base measures.

Every base measure is normalized to total mass one:

* Hardy, polydisk: normalized arc length on the torus ``|z_j| = 1``.
* Hardy, ball: normalized surface measure on the sphere.
* Bergman, polydisk / ball: normalized volume measure.
* Bergman, grid: midpoint rule over the cells, i.e. the average over cell centers.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DegenerateError, InputError
from .instance import DomainKind, DomainSpec, SpaceKind, SpaceSpec, check_space_domain
from .polynomial import CPolynomial, MultiIndex, add_indices, index_lookup, monomial_values, multi_indices


@dataclass(frozen=True, eq=False)
class BaseMeasure:
    domain: DomainSpec
    space: SpaceSpec
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        check_space_domain(self.space, self.domain)

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def exact(self) -> bool:
        return self.domain.kind is not DomainKind.GRID

    def moment_matrix(self, max_degree: int) -> np.ndarray:
        """Moments over ``multi_indices(dim, max_degree)`` (graded-lex), cached.

        Smaller degrees reuse a cached larger table, since graded index lists
        are prefixes of one another.
        """
        for deg, mat in self._cache.items():
            if deg >= max_degree:
                n = len(multi_indices(self.dim, max_degree))
                return mat[:n, :n]
        idx = multi_indices(self.dim, max_degree)
        if self.exact:
            mat = np.diag([_diagonal_moment(self, a) for a in idx]).astype(complex)
        else:
            vals = monomial_values(self.domain.cells, idx)
            mat = vals.T @ np.conj(vals) / len(self.domain.cells)
            mat = 0.5 * (mat + mat.conj().T)
        mat.setflags(write=False)
        self._cache[max_degree] = mat
        return mat


def _diagonal_moment(m: BaseMeasure, alpha: MultiIndex) -> float:
    d = m.dim
    k = sum(alpha)
    afact = math.prod(math.factorial(a) for a in alpha)
    if m.domain.kind is DomainKind.POLYDISK:
        if m.space.kind is SpaceKind.HARDY:
            return 1.0
        return 1.0 / math.prod(a + 1 for a in alpha)
    # ball
    if m.space.kind is SpaceKind.HARDY:
        return math.factorial(d - 1) * afact / math.factorial(d - 1 + k)
    return math.factorial(d) * afact / math.factorial(d + k)


def _check_index(m: BaseMeasure, alpha) -> MultiIndex:
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != m.dim or any(a < 0 for a in alpha):
        raise InputError("dimension-mismatch", f"multi-index {alpha} is not valid in dimension {m.dim}")
    return alpha


def base_moment(m: BaseMeasure, alpha, beta) -> complex:
    alpha = _check_index(m, alpha)
    beta = _check_index(m, beta)
    if m.exact:
        return complex(_diagonal_moment(m, alpha)) if alpha == beta else 0j
    cells = m.domain.cells
    vals = monomial_values(cells, [alpha, beta])
    return complex(np.mean(vals[:, 0] * np.conj(vals[:, 1])))


def weighted_moment(m: BaseMeasure, f: CPolynomial, alpha, beta) -> complex:
    """``int z^alpha conj(z^beta) |f|^2 dmu`` by expanding |f|^2 over base moments."""
    alpha = _check_index(m, alpha)
    beta = _check_index(m, beta)
    _check_weight(m, f)
    total = 0j
    for gamma, cg in f.terms.items():
        for delta, cd in f.terms.items():
            total += cg * np.conj(cd) * base_moment(m, add_indices(alpha, gamma), add_indices(beta, delta))
    return total


def _check_weight(m: BaseMeasure, f: CPolynomial) -> None:
    if f.dimension != m.dim:
        raise InputError("dimension-mismatch", f"weight has dimension {f.dimension}, measure has {m.dim}")
    if f.is_zero():
        raise DegenerateError("zero-weight", "the weight f = 0 gives the zero measure")


def weighted_moment_matrix(m: BaseMeasure, f: CPolynomial, max_degree: int) -> np.ndarray:
    """Weighted moments over ``multi_indices(dim, max_degree)``.

    Accumulates ``c_gamma conj(c_delta) * M[I + gamma, I + delta]`` over all
    pairs of terms of `f`, where M is the base moment table.
    """
    _check_weight(m, f)
    idx = multi_indices(m.dim, max_degree)
    big = multi_indices(m.dim, max_degree + f.degree)
    lookup = index_lookup(big)
    base = m.moment_matrix(max_degree + f.degree)
    shifts = {g: np.array([lookup[add_indices(a, g)] for a in idx]) for g in f.terms}
    out = np.zeros((len(idx), len(idx)), dtype=complex)
    for gamma, cg in f.terms.items():
        rows = shifts[gamma]
        for delta, cd in f.terms.items():
            out += (cg * np.conj(cd)) * base[np.ix_(rows, shifts[delta])]
    return out


def gram_matrix(m: BaseMeasure, polys: Sequence[CPolynomial]) -> np.ndarray:
    """``G[p, q] = <polys[p], polys[q]>`` in L^2 of the base measure."""
    deg = max(p.degree for p in polys)
    idx = multi_indices(m.dim, max(deg, 0))
    coeffs = np.array([p.coefficient_vector(idx) for p in polys])
    return coeffs @ m.moment_matrix(max(deg, 0)) @ coeffs.conj().T


@dataclass
class MomentTable:
    """Moments keyed by (alpha, beta), with an exact/quadrature provenance flag."""

    entries: dict[tuple[MultiIndex, MultiIndex], complex]
    provenance: str

    @classmethod
    def build(cls, m: BaseMeasure, max_degree: int, f: CPolynomial | None = None) -> "MomentTable":
        idx = multi_indices(m.dim, max_degree)
        mat = m.moment_matrix(max_degree) if f is None else weighted_moment_matrix(m, f, max_degree)
        entries = {(a, b): complex(mat[i, j]) for i, a in enumerate(idx) for j, b in enumerate(idx)}
        return cls(entries, "exact" if m.exact else "quadrature")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["alpha", "beta", "re", "im", "provenance"])
        for (a, b), v in self.entries.items():
            writer.writerow([" ".join(map(str, a)), " ".join(map(str, b)), repr(v.real), repr(v.imag), self.provenance])
        return buf.getvalue()
