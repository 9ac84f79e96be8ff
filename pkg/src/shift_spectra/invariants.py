"""Named invariant checks run by ``shift-spectra check``.

Each check returns a :class:`CheckResult`; a check that raises is reported as
failed with the exception text. ``quick`` shrinks the sizes so the suite runs
in seconds.
"""

from __future__ import annotations

import warnings
from collections.abc import Callable, Iterable
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from tqdm import tqdm

from shift_spectra import twosided
from shift_spectra.conjugacy import (
    IntervalMap,
    check_invariance,
    cylinder_density_check,
    invariant_density,
    semiconjugacy_check,
)
from shift_spectra.errors import ConfigError, SpectraError
from shift_spectra.exactnum import PHI, ComplexScalar, Poly, format_scalar
from shift_spectra.observables import (
    CylFun,
    PolyObservable,
    approx_eigenfunction_defect,
    koopman_apply,
    pf_apply,
    walsh_function,
    walsh_koopman_rule,
    walsh_pf_rule,
)
from shift_spectra.spectra import (
    bernoulli_poly,
    eigen_system,
    iterate_pf,
    koopman_dual_apply,
    rep_matrix,
)
from shift_spectra.symdyn import bernoulli_system, preset
from shift_spectra.twosided import TensorCoeffs, TwoSidedPoint

CHECK_SEED = 20_240_917


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


CheckFn = Callable[[bool], tuple[bool, str]]
CHECKS: dict[str, CheckFn] = {}


def register(name: str) -> Callable[[CheckFn], CheckFn]:
    def decorator(fn: CheckFn) -> CheckFn:
        CHECKS[name] = fn
        return fn

    return decorator


# =============================================================================
# One-sided
# =============================================================================


@register("full2-spectrum")
def _full2_spectrum(quick: bool) -> tuple[bool, str]:
    n = 8 if quick else 16
    es = eigen_system(preset("full2-uniform"), n)
    expected = tuple(Fraction(1, 2**k) for k in range(n + 1))
    return es.eigenvalues == expected, f"eigenvalues 2^-k for k ≤ {n}"


@register("bernoulli-polynomials")
def _bernoulli_polynomials(quick: bool) -> tuple[bool, str]:
    n = 6 if quick else 10
    es = eigen_system(preset("full2-uniform"), n)
    half = Fraction(1, 2)
    for k in range(n + 1):
        phi = es.eigenpoly(es.index_of(str(k)))
        b = bernoulli_poly(k)
        if not isinstance(phi, PolyObservable) or phi.poly != b:
            return False, f"Φ_{k} differs from B_{k}"
        raabe = (b.compose_affine(0, half) + b.compose_affine(half, half)).scale(
            Fraction(2) ** (k - 1)
        )
        if raabe != b:
            return False, f"multiplication identity fails for B_{k}"
    return True, f"Φ_k = B_k and the halving identity hold for k ≤ {n}"


@register("weighted-diagonal")
def _weighted_diagonal(quick: bool) -> tuple[bool, str]:
    n = 6 if quick else 12
    cases = ([Fraction(1, 3), Fraction(2, 3)], [Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)])
    for weights in cases:
        sys = bernoulli_system(weights)
        a = rep_matrix(sys, n).entries
        for k in range(n + 1):
            expected = sum((p ** (k + 1) for p in weights), Fraction(0))
            if a[k][k] != expected:
                return False, f"diagonal {k} for p={weights} is {a[k][k]}, expected {expected}"
    return True, f"diagonal entries Σ p_i^(n+1) for n ≤ {n}"


@register("golden-spectrum")
def _golden_spectrum(quick: bool) -> tuple[bool, str]:
    n = 4 if quick else 8
    es = eigen_system(preset("golden-mean"), n)
    inv_phi = 1 / PHI
    expected = [inv_phi**k for k in range(n + 1)] + [-(inv_phi ** (k + 2)) for k in range(n + 1)]
    got = list(es.eigenvalues)
    ok = len(got) == len(expected) and all(any(x == y for y in got) for x in expected)
    return ok, f"{{φ^-k}} ∪ {{-φ^-(k+2)}} for k ≤ {n}"


@register("golden-cylinders")
def _golden_cylinders(quick: bool) -> tuple[bool, str]:
    depth = 5 if quick else 8
    sys = preset("golden-mean")
    golden = IntervalMap.golden()
    density = cylinder_density_check(sys, golden, depth)
    conj = semiconjugacy_check(sys, golden, depth)
    ok = density.passed and conj.passed
    return ok, f"{density.checked} cylinder integrals, {conj.checked} endpoint pairs"


@register("density-invariance")
def _density_invariance(quick: bool) -> tuple[bool, str]:
    for interval_map in (IntervalMap.renyi(2), IntervalMap.renyi(3), IntervalMap.golden()):
        density = invariant_density(interval_map)
        if check_invariance(interval_map, density):
            return False, f"{interval_map.label} density is not invariant"
    return True, "renyi:2, renyi:3, golden"


@register("mixing-rate")
def _mixing_rate(quick: bool) -> tuple[bool, str]:
    k = 10
    full2 = preset("full2-uniform")
    report = iterate_pf(eigen_system(full2, 3), PolyObservable(full2, Poly.of(0, 1)), k)
    if report.rate != Fraction(1, 2) or report.limit != Fraction(1, 2):
        return False, f"full2: rate {report.rate}, limit {report.limit}"
    golden = preset("golden-mean")
    es = eigen_system(golden, 2)
    f = es.eigenpoly(0) + es.eigenpoly(es.index_of("0-"))  # type: ignore[operator]
    f = f + es.eigenpoly(es.index_of("1+"))
    report = iterate_pf(es, f, k)
    if report.rate != 1 / PHI:
        return False, f"golden: rate {format_scalar(report.rate or 0)}"
    return True, "rate 1/2 on full2, φ^-1 on golden-mean"


@register("walsh-defect")
def _walsh_defect(quick: bool) -> tuple[bool, str]:
    n_max = 8 if quick else 32
    sys = preset("full2-uniform")
    for z in (ComplexScalar.of(-1), ComplexScalar(Fraction(0), Fraction(1))):
        for n in range(1, n_max + 1):
            if approx_eigenfunction_defect(sys, z, n) != Fraction(1, n):
                return False, f"defect at z={complex(z)}, n={n}"
    return True, f"‖(z - V)f_n‖² = 1/n for z ∈ {{-1, i}}, n ≤ {n_max}"


@register("walsh-rules")
def _walsh_rules(quick: bool) -> tuple[bool, str]:
    for sys in (preset("full2-uniform"), preset("fullbeta-weighted")):
        for n in range(1, 10 if quick else 28):
            w = walsh_function(sys, n)
            image = pf_apply(sys, w)
            target = walsh_pf_rule(sys, n)
            expected = CylFun.constant(sys, 0) if target is None else walsh_function(sys, target.n)
            if image != expected:
                return False, f"V W_{n} on {sys.name}"
            if koopman_apply(sys, w) != walsh_function(sys, walsh_koopman_rule(sys, n).n):
                return False, f"U W_{n} on {sys.name}"
    return True, "V W_n and U W_n on uniform and weighted full shifts"


@register("dual-koopman")
def _dual_koopman(quick: bool) -> tuple[bool, str]:
    for name in ("full2-uniform", "fullbeta-weighted", "golden-mean"):
        es = eigen_system(preset(name), 4)
        for i, lam in enumerate(es.eigenvalues):
            functional = es.dual_functional(i)
            image = koopman_dual_apply(es, functional)
            if image.row != tuple(x * lam for x in functional.row):
                return False, f"U^x Φ'_{es.labels[i]} on {name}"
    return True, "U^x Φ'_n = λ_n Φ'_n"


# =============================================================================
# Two-sided
# =============================================================================


@register("twosided-epsilon-independence")
def _epsilon_independence(quick: bool) -> tuple[bool, str]:
    size = 4 if quick else 8
    spectra = {
        format_scalar(eps): twosided.build_operator(eps, size, size).eigenvalue_multiset()
        for eps in (Fraction(0), Fraction(1, 2), Fraction(1))
    }
    ok = len(set(spectra.values())) == 1
    return ok, f"sorted spectra equal for ε ∈ {{0, 1/2, 1}}, M = N = {size}"


@register("twosided-jordan")
def _twosided_jordan(quick: bool) -> tuple[bool, str]:
    k_max = 2 if quick else 4
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for k in range(k_max + 1):
            size = k + 4
            op = twosided.build_operator(Fraction(1), size, size)
            perturbed = twosided.jordan_analysis(op, k)
            if (perturbed.algebraic, perturbed.geometric, perturbed.blocks) != (k + 1, 1, (k + 1,)):
                return False, f"ε=1, k={k}: {perturbed}"
            if not perturbed.stable:
                return False, f"ε=1, k={k}: unstable under N → N+2"
            free = twosided.jordan_analysis(
                twosided.build_operator(Fraction(0), size, size), k, check_stability=False
            )
            if (free.algebraic, free.geometric) != (k + 1, k + 1):
                return False, f"ε=0, k={k}: {free}"
    return True, f"single Jordan block of size k+1 at ε=1, diagonal at ε=0, k ≤ {k_max}"


@register("ak-poles")
def _ak_poles(quick: bool) -> tuple[bool, str]:
    k_max = 2 if quick else 4
    for k in range(k_max + 1):
        witness = twosided.pole_order_check(k)
        if witness.order != k + 1:
            return False, f"A_{k}: pole order {witness.order} at 2^-{k}"
    return True, f"pole of order k+1 at 2^-k for k ≤ {k_max}"


def random_tensor(rng: np.random.Generator, max_degree: int, terms: int) -> TensorCoeffs:
    pairs: dict[tuple[int, int], Fraction] = {}
    for _ in range(terms):
        i = int(rng.integers(0, max_degree + 1))
        j = int(rng.integers(0, max_degree + 1 - i))
        pairs[(i, j)] = Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4)))
    return TensorCoeffs.from_pairs(pairs)


@register("ak-crosscheck")
def _ak_crosscheck(quick: bool) -> tuple[bool, str]:
    cases = 5 if quick else 20
    rng = np.random.default_rng(CHECK_SEED)
    for _ in range(cases):
        f = random_tensor(rng, 3, 2)
        g = random_tensor(rng, 5, 3)
        for k in range(4):
            # raises CrossCheckError when the two evaluations differ
            twosided.perturbation_coefficient(k, f, g)
    return True, f"direct and matrix A_k agree for k ≤ 3 on {cases} random pairs"


def random_cylfun(rng: np.random.Generator, depth: int) -> CylFun:
    sys = preset("full2-uniform")
    return CylFun(
        sys, depth, {w: Fraction(int(rng.integers(-4, 5))) for w in sys.words(depth)}
    )


def random_point(rng: np.random.Generator, length: int) -> TwoSidedPoint:
    return TwoSidedPoint(
        tuple(int(b) for b in rng.integers(0, 2, length)),
        tuple(int(b) for b in rng.integers(0, 2, length)),
    )


@register("q1-pointwise")
def _q1_pointwise(quick: bool) -> tuple[bool, str]:
    cases = 5 if quick else 20
    rng = np.random.default_rng(CHECK_SEED + 1)
    sys = preset("full2-uniform")
    for _ in range(cases):
        m, n_prime = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        twosided.q1_crosscheck(m, int(rng.integers(0, n_prime)), int(rng.integers(0, m)), n_prime)
        plus = random_cylfun(rng, int(rng.integers(1, 4)))
        minus = random_cylfun(rng, int(rng.integers(0, 4)))
        plus_factor, minus_factor = twosided.q1_tensor_factors(sys, plus, minus)
        lhs = twosided.cylinder_product(plus, minus)
        rhs = twosided.cylinder_product(plus_factor, minus_factor)
        for _ in range(8):
            point = random_point(rng, 6)
            if twosided.q1_pointwise(lhs, point) != rhs(point):
                return False, f"pointwise Q1 differs from the tensor factors at {point}"
    return True, f"{cases} matrix elements and cylinder products"


@register("q0-resolvent-identity")
def _q0_resolvent_identity(quick: bool) -> tuple[bool, str]:
    rng = np.random.default_rng(CHECK_SEED + 2)
    for lam in (Fraction(2), Fraction(3, 7), Fraction(-1, 3)):
        f = random_tensor(rng, 4, 4)
        value = twosided.resolvent_q0(f).evaluate(lam)
        restored = value.scale(lam) + twosided.apply_q0(value).scale(Fraction(-1))
        if restored.coeffs != f.coeffs:
            return False, f"(λ - Q0)(λ - Q0)^-1 f ≠ f at λ = {lam}"
    return True, "(λ - Q0) R(λ) f = f at three non-pole λ"


# =============================================================================
# Runner
# =============================================================================


def run_checks(
    names: Iterable[str] | None = None, quick: bool = False, progress: bool = False
) -> list[CheckResult]:
    selected = list(CHECKS) if names is None else list(names)
    unknown = [name for name in selected if name not in CHECKS]
    if unknown:
        raise ConfigError(f"unknown checks: {', '.join(unknown)}; choose from {', '.join(CHECKS)}")
    results = []
    for name in tqdm(selected, desc="Checking", unit="check", disable=not progress):
        try:
            passed, detail = CHECKS[name](quick)
        except SpectraError as e:
            passed, detail = False, f"{type(e).__name__}: {e}"
        results.append(CheckResult(name, passed, detail))
    return results
