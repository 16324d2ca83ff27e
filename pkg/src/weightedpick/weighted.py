"""Truncated models of the weighted space A^2(|f|^2 mu) and of the cyclic subspace A[f].

Two independent computations of the same kernel are provided.

``WeightedKernelModel`` (Gram route)
    Orthonormalizes the basis ``{b_p}`` of the algebra in ``L^2(|f|^2 mu)``,
    with the Gram matrix assembled from weighted moments, and evaluates
    ``k^nu(z, w) = sum_i e_i(z) conj(e_i(w))``.

``CyclicKernelModel`` (cyclic route)
    Works inside the ambient space H = L^2(mu)-closure of polynomials. The
    cyclic subspace is spanned by ``{b_p f}``; its kernel ``k^f_w`` is the
    orthogonal projection of the truncated ambient kernel vector ``k_w``.
    Rescaling by the pairings ``<f, k^f_z>`` gives ``j^f``, which must agree
    with ``k^nu`` because ``phi -> phi f`` is unitary from ``A^2(|f|^2 mu)``
    onto ``A[f]``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from .errors import DegenerateError, DomainError, InputError, OutsideOmegaFError
from .instance import AlgebraSpec, DomainKind
from .moments import BaseMeasure, weighted_moment_matrix
from .polynomial import CPolynomial, eval_polynomial, monomial_values, multi_indices, poly_multiply

DEFAULT_DEGREE = {1: 12, 2: 8, 3: 5}
RANK_CUTOFF = 1e-12
OMEGA_F_TOL = 1e-10
MAX_EVAL_RADIUS = 0.9
WARN_EVAL_RADIUS = 0.6
TAIL_SAFETY = 2.0


class TruncationWarning(UserWarning):
    """Evaluation point far enough out that truncation error may be visible."""


def default_degree(dim: int) -> int:
    return DEFAULT_DEGREE.get(dim, 4)


def check_eval_points(domain, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=complex))
    if pts.shape[1] != domain.dim:
        raise InputError("dimension-mismatch", f"points must lie in C^{domain.dim}")
    for p in pts:
        domain.require_inside(p)
    radius = float(np.max(np.abs(pts))) if pts.size else 0.0
    if radius > MAX_EVAL_RADIUS:
        raise DomainError(
            "truncation-range",
            f"coordinate modulus {radius:.3g} exceeds {MAX_EVAL_RADIUS}; truncated models are not reliable there",
        )
    if radius > WARN_EVAL_RADIUS:
        warnings.warn(
            f"coordinate modulus {radius:.3g} > {WARN_EVAL_RADIUS}: truncation error grows like r^N",
            TruncationWarning,
            stacklevel=3,
        )
    return pts


@dataclass(frozen=True)
class BasisEnumeration:
    """Deterministic spanning list for the truncated algebra; the first element is 1."""

    algebra: AlgebraSpec
    degree: int
    polys: tuple[CPolynomial, ...]
    # level_sizes[n] = number of leading elements belonging to truncation level <= n
    level_sizes: tuple[int, ...] = ()

    @property
    def max_degree(self) -> int:
        return max(p.degree for p in self.polys)

    def __len__(self) -> int:
        return len(self.polys)


def enumerate_basis(algebra: AlgebraSpec, dim: int, degree: int) -> BasisEnumeration:
    """Monomials of degree <= `degree` (full algebra), or words of at most
    `degree` generator factors (generated algebra), in graded-lex order.
    Duplicate words are dropped; linear dependence is left to the Gram reduction.
    """
    if degree < 0:
        raise InputError("bad-degree", f"truncation degree must be >= 0, got {degree}")
    if algebra.is_full:
        polys = [CPolynomial.monomial(a) for a in multi_indices(dim, degree)]
        sizes = tuple(len(multi_indices(dim, n)) for n in range(degree + 1))
        return BasisEnumeration(algebra, degree, tuple(polys), sizes)
    gens = algebra.generators
    for g in gens:
        if g.dimension != dim:
            raise InputError("generator-dimension", f"generator of dimension {g.dimension} on C^{dim}")
    powers: dict[tuple[int, int], CPolynomial] = {}

    def gpow(j: int, k: int) -> CPolynomial:
        if (j, k) not in powers:
            powers[(j, k)] = CPolynomial.constant(dim) if k == 0 else poly_multiply(gpow(j, k - 1), gens[j])
        return powers[(j, k)]

    seen: set[CPolynomial] = set()
    polys = []
    sizes = []
    for word in multi_indices(len(gens), degree):
        while len(sizes) < sum(word):
            sizes.append(len(polys))
        p = CPolynomial.constant(dim)
        for j, k in enumerate(word):
            if k:
                p = poly_multiply(p, gpow(j, k))
        if p.is_zero() or p in seen:
            continue
        seen.add(p)
        polys.append(p)
    while len(sizes) < degree + 1:
        sizes.append(len(polys))
    return BasisEnumeration(algebra, degree, tuple(polys), tuple(sizes))


def _coefficient_matrix(polys: Sequence[CPolynomial], indices) -> np.ndarray:
    return np.array([p.coefficient_vector(indices) for p in polys])


def _orthonormalize(gram: np.ndarray) -> tuple[np.ndarray, int]:
    """Rows of the returned C satisfy ``C G C^* = I`` on the numerically nonzero part of G."""
    evals, evecs = np.linalg.eigh(gram)
    top = evals[-1]
    if not top > 0:
        raise DegenerateError("zero-gram", "Gram matrix is numerically zero")
    keep = evals > RANK_CUTOFF * top
    coef = (evecs[:, keep] / np.sqrt(evals[keep])).conj().T
    return coef, int(keep.sum())


class WeightedKernelModel:
    """Truncated reproducing kernel of ``A^2(nu)``, ``nu = |f|^2 mu / int |f|^2 dmu``,
    by Gram orthonormalization.
    """

    def __init__(self, measure: BaseMeasure, f: CPolynomial, basis: BasisEnumeration):
        self.measure = measure
        self.f = f
        self.basis = basis
        self.indices = multi_indices(measure.dim, basis.max_degree)
        self.basis_coeffs = _coefficient_matrix(basis.polys, self.indices)
        raw = weighted_moment_matrix(measure, f, basis.max_degree)
        self.mass = float(raw[0, 0].real)
        if not self.mass > 0:
            raise DegenerateError("zero-gram", "weighted measure has zero mass; f vanishes on the support of mu")
        self.moments = raw / self.mass
        B = self.basis_coeffs
        self.gram = B @ self.moments @ B.conj().T
        self.gram = 0.5 * (self.gram + self.gram.conj().T)
        self.coef, self.rank = _orthonormalize(self.gram)

    @property
    def degree(self) -> int:
        return self.basis.degree

    def basis_values(self, points) -> np.ndarray:
        """``(n, P)`` array of ``b_p(z_i)``."""
        return monomial_values(points, self.indices) @ self.basis_coeffs.T

    def orthonormal_values(self, points) -> np.ndarray:
        """``(n, r)`` array of ``e_i(z_k)``."""
        return self.basis_values(points) @ self.coef.T

    def kernel_matrix(self, Z, W=None) -> np.ndarray:
        """``K[i, j] = k^nu(Z_i, W_j)``."""
        Z = check_eval_points(self.measure.domain, Z)
        W = Z if W is None else check_eval_points(self.measure.domain, W)
        EZ = self.orthonormal_values(Z)
        EW = EZ if W is Z else self.orthonormal_values(W)
        return EZ @ EW.conj().T

    def __call__(self, z, w) -> complex:
        return weighted_kernel_eval(self, z, w)

    def pairing(self, p: CPolynomial, z) -> complex:
        """``<p, k^nu_z>`` in ``L^2(|f|^2 mu)`` for a polynomial p inside the truncation."""
        pc = p.coefficient_vector(self.indices)
        with_basis = pc @ self.moments @ self.basis_coeffs.conj().T
        e_z = self.orthonormal_values(check_eval_points(self.measure.domain, z))[0]
        return complex(np.sum(e_z * (with_basis @ self.coef.conj().T)))

    def nested_diagonals(self, points, levels: Sequence[int]) -> np.ndarray:
        """``k_n(z, z)`` for the nested truncations at the given levels (rows) and points (columns).

        The Gram matrix of a lower level is a leading block of the full one.
        Level -1 is the zero space.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        bv = self.basis_values(pts)
        out = np.zeros((len(levels), pts.shape[0]))
        for row, n in enumerate(levels):
            if n < 0:
                continue
            size = self.basis.level_sizes[min(n, self.degree)]
            coef, _ = _orthonormalize(self.gram[:size, :size])
            out[row] = np.sum(np.abs(bv[:, :size] @ coef.T) ** 2, axis=1)
        return out

    def tail_estimate(self, points) -> np.ndarray:
        """Estimated ``k(z, z) - k_N(z, z)`` (untruncated minus truncated) at each point.

        Geometric extrapolation of the diagonal increments over the last four
        levels, grouped in pairs so that parity patterns in the increments do
        not fool the ratio. Returns ``inf`` where the increments are not yet
        decreasing.
        """
        N = self.degree
        diag = self.nested_diagonals(points, [N - 4, N - 3, N - 2, N - 1, N])
        inc = np.diff(diag, axis=0)
        recent = inc[2] + inc[3]
        older = inc[0] + inc[1]
        scale = np.maximum(diag[-1], 1e-300)
        tail = np.full(diag.shape[1], np.inf)
        converged = recent <= 1e-15 * scale
        tail[converged] = 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(older > 0, recent / older, np.inf)
        ok = ~converged & (ratio < 1.0)
        tail[ok] = TAIL_SAFETY * recent[ok] * ratio[ok] / (1.0 - ratio[ok])
        return tail

    def tail_bound(self, points) -> tuple[np.ndarray, bool]:
        """Bound on ``k(z, z) - k_N(z, z)`` at each point, and whether it is rigorous.

        On the polydisk and the ball the cyclic subspace A[f] sits inside the
        ambient space and is orthogonal to every ambient kernel vector ``k_a``
        at a zero ``a`` of f, so ``k^f(z, z) <= ||P k_z||^2`` with P the
        projection onto the complement of those ``k_a``. Since
        ``k^nu = ||f||^2 k^f / |f|^2`` and ``k_N`` only increases with N, this
        brackets the untruncated diagonal. Grid domains have no closed-form
        ambient kernel, and for a generated algebra the ambient bound ignores
        the missing monomials and is far too loose to be useful; in both cases
        the geometric extrapolation of :meth:`tail_estimate` is returned instead.
        """
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        if self.measure.domain.kind is DomainKind.GRID or not self.basis.algebra.is_full:
            return self.tail_estimate(pts), False
        from .kernels import ClosedFormKernel

        ambient = ClosedFormKernel(self.measure.space, self.measure.domain)
        zeros = interior_zeros(self.f, self.measure.domain, pts)
        kzz = np.real(np.diag(ambient.matrix(pts)))
        if len(zeros):
            Kza = ambient.block(pts, zeros)
            evals, evecs = np.linalg.eigh(ambient.block(zeros, zeros))
            keep = evals > 1e-10 * evals[-1]
            proj = Kza @ evecs[:, keep]
            kzz = kzz - np.sum(np.abs(proj) ** 2 / evals[keep], axis=1)
        fz = np.abs(eval_polynomial(self.f, pts)) ** 2
        with np.errstate(divide="ignore"):
            upper = np.where(fz > 0, self.mass * np.maximum(kzz, 0.0) / fz, np.inf)
        trunc = np.sum(np.abs(self.orthonormal_values(pts)) ** 2, axis=1)
        # roundoff floor: the two sides agree only to a few ulps of the larger one
        return np.maximum(upper - trunc, 0.0) + 1e-10 * np.maximum(upper, trunc), True

    def one_pairing(self, points) -> np.ndarray:
        """``<1, k^nu_z>`` at each point (equals 1 when the constants are reproduced)."""
        pts = np.atleast_2d(np.asarray(points, dtype=complex))
        with_basis = self.gram[0]  # <1, b_q>, since b_0 = 1
        return self.orthonormal_values(pts) @ (with_basis @ self.coef.conj().T)


def interior_zeros(f: CPolynomial, domain, anchors) -> np.ndarray:
    """Zeros of f strictly inside the domain, found on coordinate slices.

    In one variable these are all the zeros. In several variables, for every
    anchor point and coordinate j the other coordinates are frozen at the
    anchor's values and the resulting one-variable polynomial is solved.
    """
    anchors = np.atleast_2d(np.asarray(anchors, dtype=complex))
    d = f.dimension
    found = []
    for anchor in anchors[: (1 if d == 1 else len(anchors))]:
        for j in range(d):
            coeffs = np.zeros(f.degree + 1, dtype=complex)
            for alpha, c in f.terms.items():
                frozen = np.prod([anchor[i] ** alpha[i] for i in range(d) if i != j])
                coeffs[alpha[j]] += c * frozen
            nz = np.nonzero(np.abs(coeffs) > 0)[0]
            if len(nz) == 0 or nz[-1] == 0:
                continue
            for r in np.roots(coeffs[: nz[-1] + 1][::-1]):
                pt = anchor.copy()
                pt[j] = r
                if domain.contains(pt) and np.max(np.abs(pt)) < 1.0 - 1e-6:
                    found.append(pt)
    if not found:
        return np.zeros((0, d), dtype=complex)
    return np.array(found)


def build_weighted_model(
    measure: BaseMeasure, f: CPolynomial, algebra: AlgebraSpec | None = None, degree: int | None = None
) -> WeightedKernelModel:
    algebra = algebra or AlgebraSpec.full()
    degree = default_degree(measure.dim) if degree is None else degree
    return WeightedKernelModel(measure, f, enumerate_basis(algebra, measure.dim, degree))


def weighted_kernel_eval(model: WeightedKernelModel, z, w) -> complex:
    z = np.asarray(z, dtype=complex).reshape(1, -1)
    w = np.asarray(w, dtype=complex).reshape(1, -1)
    return complex(model.kernel_matrix(z, w)[0, 0])


class CyclicKernelModel:
    """Truncated cyclic subspace ``A[f]`` inside the ambient space, with projected kernels."""

    def __init__(self, measure: BaseMeasure, f: CPolynomial, basis: BasisEnumeration):
        if f.dimension != measure.dim:
            raise InputError("dimension-mismatch", "weight and measure dimensions differ")
        if f.is_zero():
            raise DegenerateError("zero-weight", "f = 0 generates the zero subspace")
        self.measure = measure
        self.f = f
        self.basis = basis
        self.ambient_degree = basis.max_degree + f.degree
        self.indices = multi_indices(measure.dim, self.ambient_degree)
        self.ambient_gram = measure.moment_matrix(self.ambient_degree)
        self.cyclic_polys = tuple(poly_multiply(b, f) for b in basis.polys)
        self.cyclic_coeffs = _coefficient_matrix(self.cyclic_polys, self.indices)
        Bf = self.cyclic_coeffs
        self.gram = Bf @ self.ambient_gram @ Bf.conj().T
        self.gram = 0.5 * (self.gram + self.gram.conj().T)
        if np.max(np.abs(self.gram)) < 1e-300:
            raise DegenerateError("zero-gram", "cyclic Gram matrix vanishes")
        coef, self.rank = _orthonormalize(self.gram)
        # ambient monomial coefficients of the orthonormal basis u_i of A[f]
        self.onb = coef @ Bf
        self.f_coeffs = f.coefficient_vector(self.indices)
        self.f_norm_sq = float(np.real(self.f_coeffs @ self.ambient_gram @ self.f_coeffs.conj()))
        if measure.exact:
            d = np.real(np.diag(self.ambient_gram))
            self._solve = lambda rhs: rhs / d[:, None]
        else:
            fac = scipy.linalg.cho_factor(self.ambient_gram)
            self._solve = lambda rhs: scipy.linalg.cho_solve(fac, rhs)

    def _inner(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Ambient inner products of coefficient columns: ``out[i, j] = <X_i, Y_j>``."""
        return X.T @ self.ambient_gram @ Y.conj()

    def ambient_kernel_vectors(self, points) -> np.ndarray:
        """Columns are ambient coefficients of the truncated ambient kernel ``k_z``."""
        V = monomial_values(points, self.indices)
        return np.conj(self._solve(V.T))

    def kernel_vectors(self, points) -> np.ndarray:
        """Columns are ambient coefficients of ``k^f_z = P_{A[f]} k_z``."""
        K0 = self.ambient_kernel_vectors(points)
        weights = self._inner(K0, self.onb.T)  # (m, r): <k_z, u_i>
        return self.onb.T @ weights.T

    def kernel_matrix(self, Z, W=None) -> np.ndarray:
        """``K[i, j] = k^f(Z_i, W_j) = k^f_{W_j}(Z_i)``."""
        Z = check_eval_points(self.measure.domain, Z)
        W = Z if W is None else check_eval_points(self.measure.domain, W)
        return monomial_values(Z, self.indices) @ self.kernel_vectors(W)

    def pairings(self, points) -> np.ndarray:
        """``<f, k^f_z>_H`` at each point, computed from the projected kernel vectors."""
        pts = check_eval_points(self.measure.domain, points)
        return self._inner(self.f_coeffs[:, None], self.kernel_vectors(pts))[0]

    def rescaled_matrix(self, Z, W=None) -> np.ndarray:
        """``j^f`` for the probability-normalized weight ``|f|^2 mu / ||f||^2``."""
        Z = check_eval_points(self.measure.domain, Z)
        W = Z if W is None else check_eval_points(self.measure.domain, W)
        pz = self.pairings(Z)
        pw = pz if W is Z else self.pairings(W)
        bad = np.concatenate([np.abs(pz), np.abs(pw)]) <= OMEGA_F_TOL
        if np.any(bad):
            raise OutsideOmegaFError("outside-omega-f", "a point lies outside Omega_f: <f, k_z^f> vanishes")
        return self.f_norm_sq * self.kernel_matrix(Z, W) / np.outer(pz, np.conj(pw))

    def __call__(self, z, w) -> complex:
        z = np.asarray(z, dtype=complex).reshape(1, -1)
        w = np.asarray(w, dtype=complex).reshape(1, -1)
        return complex(self.kernel_matrix(z, w)[0, 0])


def build_cyclic_model(
    measure: BaseMeasure, f: CPolynomial, algebra: AlgebraSpec | None = None, degree: int | None = None
) -> CyclicKernelModel:
    algebra = algebra or AlgebraSpec.full()
    degree = default_degree(measure.dim) if degree is None else degree
    return CyclicKernelModel(measure, f, enumerate_basis(algebra, measure.dim, degree))


def rescaled_cyclic_kernel(model: CyclicKernelModel, z, w) -> complex:
    """``j^f(z, w) = k^f(z, w) / (<f, k^f_z> conj(<f, k^f_w>))``."""
    z = np.asarray(z, dtype=complex).reshape(1, -1)
    w = np.asarray(w, dtype=complex).reshape(1, -1)
    return complex(model.rescaled_matrix(z, w)[0, 0])


def omega_f_check(model: CyclicKernelModel, z) -> tuple[bool, float]:
    mag = float(np.abs(model.pairings(np.asarray(z, dtype=complex).reshape(1, -1))[0]))
    return mag > OMEGA_F_TOL, mag
