"""Pick matrices, PSD verdicts, weight-family sweeps and infeasibility certificates.

A feasible problem (a contractive interpolating multiplier exists) has a PSD
Pick matrix ``[(1 - w_i conj(w_j)) k^nu(z_i, z_j)]`` for every weight
``nu = |f|^2 mu``. A sweep samples weights f and checks that; a certificate
is a weight whose Pick matrix is provably indefinite.

Truncated kernels understate the true kernel by a PSD tail T, which perturbs
the Pick matrix by ``(1 - w w^*) o T`` (entrywise product). By the Schur
product bound its spectral norm is at most ``||1 - w w^*||_2 * max_i T_ii``,
so a violation only counts once the smallest eigenvalue is below minus that
margin. Rigid problems (Pick matrix singular) are otherwise flagged from
truncation noise alone.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import InputError
from .instance import InterpolationInstance, validate_instance
from .moments import BaseMeasure
from .polynomial import CPolynomial, eval_polynomial, multi_indices, random_polynomial
from .weighted import OMEGA_F_TOL, build_weighted_model, default_degree

DEFAULT_TOL = 1e-9
HERMITIAN_TOL = 1e-10


@dataclass
class PickMatrix:
    matrix: np.ndarray
    kernel: str = "unspecified"
    f: CPolynomial | None = None

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass
class Verdict:
    psd: bool
    lambda_min: float
    lambda_max: float
    tol: float

    def to_json(self) -> dict:
        return {"psd": self.psd, "lambda_min": self.lambda_min, "lambda_max": self.lambda_max, "tol": self.tol}


def pick_matrix(K, w, kernel: str = "unspecified", f: CPolynomial | None = None) -> PickMatrix:
    """Entrywise product of ``[1 - w_i conj(w_j)]`` with the kernel matrix K."""
    K = np.asarray(K, dtype=complex)
    w = np.asarray(w, dtype=complex).reshape(-1)
    if K.shape != (w.size, w.size):
        raise InputError("size-mismatch", f"kernel matrix {K.shape} vs {w.size} targets")
    return PickMatrix(schur_product(1.0 - np.outer(w, w.conj()), K), kernel, f)


def schur_product(A, B) -> np.ndarray:
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise InputError("size-mismatch", f"cannot take the Schur product of {A.shape} and {B.shape}")
    return A * B


def _spectrum(M) -> tuple[np.ndarray, np.ndarray]:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError("not-square", f"expected a square matrix, got shape {M.shape}")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if np.max(np.abs(M - M.conj().T), initial=0.0) > HERMITIAN_TOL * scale:
        raise InputError("not-hermitian", "matrix is not Hermitian")
    return np.linalg.eigh(0.5 * (M + M.conj().T))


def psd_check(M, tol: float = DEFAULT_TOL) -> Verdict:
    """PSD iff ``lambda_min >= -tol * max(1, lambda_max)``."""
    evals, _ = _spectrum(M)
    lam_min, lam_max = float(evals[0]), float(evals[-1])
    return Verdict(lam_min >= -tol * max(1.0, lam_max), lam_min, lam_max, tol)


@dataclass
class SweepConfig:
    samples: int = 50
    fdeg: int = 4
    seed: int = 0
    degree: int | None = None
    tol: float = DEFAULT_TOL
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise InputError("bad-config", "sample count must be >= 1")
        if self.fdeg < 0:
            raise InputError("bad-config", "weight degree must be >= 0")


@dataclass
class MemberResult:
    """Outcome for one weight f of the family."""

    index: int
    f: CPolynomial
    skipped: bool = False
    reason: str | None = None
    verdict: Verdict | None = None
    margin: float = 0.0
    rigorous_margin: bool = True
    violation: bool = False

    def to_json(self) -> dict:
        out = {"index": self.index, "f": self.f.to_json(), "skipped": self.skipped}
        if self.skipped:
            out["reason"] = self.reason
        else:
            out.update(
                verdict=self.verdict.to_json(),
                truncation_margin=self.margin,
                rigorous_margin=self.rigorous_margin,
                violation=self.violation,
            )
        return out


@dataclass
class SweepReport:
    members: list[MemberResult]
    config: SweepConfig
    degree: int

    @property
    def checked(self) -> list[MemberResult]:
        return [m for m in self.members if not m.skipped]

    @property
    def violations(self) -> list[MemberResult]:
        return [m for m in self.checked if m.violation]

    @property
    def raw_failures(self) -> list[MemberResult]:
        """Members whose truncated Pick matrix fails the plain tolerance test."""
        return [m for m in self.checked if not m.verdict.psd]

    @property
    def skipped(self) -> list[MemberResult]:
        return [m for m in self.members if m.skipped]

    @property
    def consistent(self) -> bool:
        return not self.violations

    @property
    def worst_lambda_min(self) -> float:
        vals = [m.verdict.lambda_min for m in self.checked]
        return min(vals) if vals else math.nan

    def summary(self) -> dict:
        return {
            "consistent": self.consistent,
            "members": len(self.members),
            "checked": len(self.checked),
            "skipped": len(self.skipped),
            "violations": len(self.violations),
            "raw_tolerance_failures": len(self.raw_failures),
            "worst_lambda_min": self.worst_lambda_min,
            "degree": self.degree,
            "samples": self.config.samples,
            "fdeg": self.config.fdeg,
            "seed": self.config.seed,
            "tol": self.config.tol,
        }

    def to_json(self) -> dict:
        return {"summary": self.summary(), "members": [m.to_json() for m in self.members]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "skipped", "lambda_min", "lambda_max", "margin", "violation"])
        for m in self.members:
            if m.skipped:
                writer.writerow([m.index, True, "", "", "", ""])
            else:
                writer.writerow(
                    [m.index, False, repr(m.verdict.lambda_min), repr(m.verdict.lambda_max), repr(m.margin), m.violation]
                )
        return buf.getvalue()


def _measure(instance: InterpolationInstance) -> BaseMeasure:
    return BaseMeasure(instance.domain, instance.space)


def _sampled_weights(dim: int, cfg: SweepConfig) -> list[CPolynomial]:
    rng = np.random.default_rng(cfg.seed)
    weights = [CPolynomial.constant(dim)]
    weights.extend(random_polynomial(dim, cfg.fdeg, rng) for _ in range(cfg.samples))
    return weights


def evaluate_member(
    instance: InterpolationInstance,
    f: CPolynomial,
    degree: int,
    tol: float = DEFAULT_TOL,
    measure: BaseMeasure | None = None,
    index: int = 0,
) -> tuple[MemberResult, PickMatrix | None, np.ndarray | None]:
    """Pick matrix of the weight ``|f|^2 mu`` at the instance nodes, with its verdict.

    Nodes outside Omega_f make the member skipped. The pairing ``<f, k^f_z>``
    is read off the weighted model through ``phi -> phi f``: it equals
    ``f(z) <1, k^nu_z>``.
    """
    measure = measure or _measure(instance)
    model = build_weighted_model(measure, f, instance.algebra, degree)
    nodes = instance.nodes
    pairing = np.abs(eval_polynomial(f, nodes) * model.one_pairing(nodes))
    if np.any(pairing <= OMEGA_F_TOL):
        bad = int(np.argmin(pairing))
        return MemberResult(index, f, skipped=True, reason=f"node {bad} outside Omega_f"), None, None
    K = model.kernel_matrix(nodes)
    P = pick_matrix(K, instance.targets, kernel="weighted", f=f)
    evals, evecs = _spectrum(P.matrix)
    lam_min, lam_max = float(evals[0]), float(evals[-1])
    verdict = Verdict(lam_min >= -tol * max(1.0, lam_max), lam_min, lam_max, tol)
    tail, rigorous = model.tail_bound(nodes)
    w = instance.targets
    margin = float(np.linalg.norm(1.0 - np.outer(w, w.conj()), 2) * np.max(tail))
    violation = lam_min + margin < -tol * max(1.0, lam_max)
    res = MemberResult(index, f, verdict=verdict, margin=margin, rigorous_margin=rigorous, violation=bool(violation))
    return res, P, evecs[:, 0]


def family_sweep(instance: InterpolationInstance, cfg: SweepConfig | None = None) -> SweepReport:
    """Check the Pick matrices of f = 1 and `cfg.samples` random weights."""
    cfg = cfg or SweepConfig()
    validate_instance(instance)
    degree = default_degree(instance.dim) if cfg.degree is None else cfg.degree
    measure = _measure(instance)
    weights = _sampled_weights(instance.dim, cfg)

    def run(item):
        i, f = item
        return evaluate_member(instance, f, degree, cfg.tol, measure, i)[0]

    if cfg.workers > 1:
        measure.moment_matrix(degree + cfg.fdeg)  # fill the cache before fanning out
        with ThreadPoolExecutor(cfg.workers) as pool:
            members = list(pool.map(run, enumerate(weights)))
    else:
        members = [run(item) for item in enumerate(weights)]
    return SweepReport(members, cfg, degree)


@dataclass
class CertifyConfig:
    restarts: int = 20
    iterations: int = 200
    fdeg: int = 4
    seed: int = 0
    degree: int | None = None
    tol: float = DEFAULT_TOL
    # extra truncation degrees for the confirming rebuild
    recheck_extra: int = 4


@dataclass
class Certificate:
    f: CPolynomial
    pick: PickMatrix
    lambda_min: float
    eigenvector: np.ndarray
    degree: int
    margin: float
    restart: int
    evaluations: int = 0

    def to_json(self) -> dict:
        return {
            "f": self.f.to_json(),
            "lambda_min": self.lambda_min,
            "truncation_margin": self.margin,
            "degree": self.degree,
            "restart": self.restart,
            "evaluations": self.evaluations,
            "eigenvector": [[float(v.real), float(v.imag)] for v in self.eigenvector],
            "pick_matrix": [[[float(v.real), float(v.imag)] for v in row] for row in self.pick.matrix],
        }


def _coeffs_to_poly(x: np.ndarray, indices) -> CPolynomial:
    c = x[: len(indices)] + 1j * x[len(indices):]
    nrm = np.linalg.norm(c)
    if nrm == 0:
        c = np.zeros_like(c)
        c[0] = 1.0
        nrm = 1.0
    return CPolynomial.from_coefficients(indices, c / nrm)


def certify_infeasible(instance: InterpolationInstance, cfg: CertifyConfig | None = None) -> Certificate | None:
    """Search for a weight f whose Pick matrix is certifiably indefinite.

    Minimizes ``(lambda_min + margin) / max(1, lambda_max)`` over unit-norm
    coefficient vectors of f with multi-start Nelder-Mead. Restart 0 starts at
    f = 1; later restarts at random weights. A candidate is accepted only if
    a rebuild at a higher truncation degree still certifies a violation below
    ``-10 tol``. Returning None proves nothing.
    """
    cfg = cfg or CertifyConfig()
    validate_instance(instance)
    degree = default_degree(instance.dim) if cfg.degree is None else cfg.degree
    measure = _measure(instance)
    indices = multi_indices(instance.dim, cfg.fdeg)
    rng = np.random.default_rng(cfg.seed)
    evaluations = 0

    def certified_value(f: CPolynomial, deg: int) -> tuple[float, MemberResult]:
        res, _, _ = evaluate_member(instance, f, deg, cfg.tol, measure)
        if res.skipped:
            return math.inf, res
        v = res.verdict
        return (v.lambda_min + res.margin) / max(1.0, v.lambda_max), res

    def objective(x: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        return certified_value(_coeffs_to_poly(x, indices), degree)[0]

    threshold = -10.0 * cfg.tol
    for restart in range(cfg.restarts):
        if restart == 0:
            x0 = np.zeros(2 * len(indices))
            x0[0] = 1.0
        else:
            x0 = rng.standard_normal(2 * len(indices))
            x0 /= np.linalg.norm(x0)
        best_x, best_val = x0, objective(x0)
        if best_val >= threshold:
            result = minimize(
                objective, x0, method="Nelder-Mead",
                options={"maxiter": cfg.iterations, "xatol": 1e-6, "fatol": 1e-12, "initial_simplex": _simplex(x0)},
            )
            if result.fun < best_val:
                best_x, best_val = result.x, float(result.fun)
        if best_val >= threshold:
            continue
        f = _coeffs_to_poly(best_x, indices)
        recheck_degree = degree + cfg.recheck_extra
        res, P, vec = evaluate_member(instance, f, recheck_degree, cfg.tol, measure)
        if res.skipped:
            continue
        if (res.verdict.lambda_min + res.margin) < threshold * max(1.0, res.verdict.lambda_max):
            return Certificate(f, P, res.verdict.lambda_min, vec, recheck_degree, res.margin, restart, evaluations)
    return None


def _simplex(x0: np.ndarray, step: float = 0.25) -> np.ndarray:
    n = x0.size
    return np.vstack([x0, x0 + step * np.eye(n)])
