"""Birkhoff normal form engine.

Starting from H = Z2 + P with P balanced of half-degree p, each step solves a
cohomological equation that removes the monomials of the lowest unnormalized
degree whose small divisor exceeds gamma, and conjugates the series by the
time-one flow of the generator.  The resulting expansion

    H o tau^{-1} = Z2 + sum_j Q^(2j)

has every Q^(2j), j <= r, gamma-resonant, with tail bounds checked per degree
against eps_r^{-2(j-p)} * ||P||_H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np

from .errors import BudgetError
from . import flows
from .poly import HomPoly, ModeSet, poisson
from .spectral import FrequencySet, NormEnclosure, japanese, norm_h


@dataclass
class NormalFormConfig:
    r: int
    gamma: float
    p: int = 3
    J_max: int | None = None
    A: float = 2.0
    B_p: float = 100.0
    flow_dt: float = 0.05
    flow_tol: float = 1e-14
    norm_multistart: int = 16
    norm_iters: int = 300
    norm_lower_levels: object = "all"   # or an int: ascent only on the top-K levels
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.gamma <= 1.0):
            raise ValueError("gamma must lie in (0, 1]")
        if self.r < self.p - 1:
            raise ValueError("order r must be at least p - 1")
        if self.J_max is None:
            self.J_max = 2 * self.r
        if self.J_max < self.r + 1:
            raise ValueError("J_max must be at least r + 1")


@dataclass
class TailEntry:
    j: int
    norm_upper: float
    bound: float
    violated: bool


@dataclass
class NormalFormResult:
    z2: HomPoly
    omega: FrequencySet
    config: NormalFormConfig
    resonant: dict[int, HomPoly]
    generators: list[HomPoly]
    eps_r: float
    norm_p: NormEnclosure
    tail_report: list[TailEntry]
    truncated_degrees: list[int]

    @property
    def tail_ok(self) -> bool:
        return not any(e.violated for e in self.tail_report)

    def hamiltonian_value(self, u: np.ndarray) -> float:
        """Z2(u) + sum_j Q^(2j)(u) of the transformed expansion."""
        val = float(self.z2(u))
        for Q in self.resonant.values():
            val += float(Q(u))
        return val


def epsilon_r(cfg: NormalFormConfig, normP_H: float, omega: FrequencySet) -> float:
    """Radius (gamma / (A B_p r^5 <|w_f|> ||P||_H log<|w_i|>))^(1/(2p-2))."""
    if normP_H <= 0:
        raise ValueError("||P||_H must be positive")
    den = (cfg.A * cfg.B_p * cfg.r ** 5 * japanese(omega.frac_inf)
           * normP_H * math.log(japanese(omega.int_inf)))
    return (cfg.gamma / den) ** (1.0 / (2 * cfg.p - 2))


def _divisors_of(P: HomPoly, omega: FrequencySet) -> np.ndarray:
    if P.mode_set != omega.mode_set:
        raise ValueError("mode-set mismatch between polynomial and frequencies")
    if len(P.coeffs) == 0:
        return np.zeros(0)
    idx_k, idx_l, _, _ = P._np()
    w = omega.omega
    return w[idx_k].sum(axis=1) - w[idx_l].sum(axis=1)


def ad_z2(P: HomPoly, omega: FrequencySet) -> HomPoly:
    """{Z2, P} computed exactly through the diagonal action i*Omega per key."""
    div = _divisors_of(P, omega)
    keys = list(P.coeffs.keys())
    coeffs = {k: 1j * d * P.coeffs[k] for k, d in zip(keys, div) if d != 0.0}
    return HomPoly(P.mode_set, P.q, coeffs, validate=False)


def solve_cohomological(Q: HomPoly, omega: FrequencySet, gamma: float
                        ) -> tuple[HomPoly, HomPoly]:
    """Split Q into a generator and its gamma-resonant remainder.

    chi has coefficients Q_{k,l} / (i Omega(k,l)) on the keys with
    |Omega| >= gamma and q_res keeps the remaining keys unchanged, so that
    Q + {chi, Z2} = q_res holds coefficientwise.
    """
    if not Q.is_real:
        raise ValueError("cohomological equation expects a real-valued polynomial")
    div = _divisors_of(Q, omega)
    chi, res = {}, {}
    for (key, c), d in zip(Q.coeffs.items(), div):
        if abs(d) >= gamma:
            chi[key] = c / (1j * d)
        else:
            res[key] = c
    chi_p = HomPoly(Q.mode_set, Q.q, chi, validate=False, is_real=True)
    res_p = HomPoly(Q.mode_set, Q.q, res, validate=False, is_real=True)
    # verify Q + {chi, Z2} == q_res coefficientwise
    check = Q + (-ad_z2(chi_p, omega))
    scale = max((abs(c) for c in Q.coeffs.values()), default=1.0)
    for key in set(check.coeffs) | set(res_p.coeffs):
        if abs(check.coeffs.get(key, 0j) - res_p.coeffs.get(key, 0j)) > 1e-12 * scale:
            raise AssertionError("cohomological identity failed")
    return chi_p, res_p


def lie_transform(z2_omega: FrequencySet, series: dict[int, HomPoly], chi: HomPoly,
                  j_max: int) -> tuple[dict[int, HomPoly], list[int]]:
    """Apply exp(ad_chi) to Z2 + sum_j series[j], collected by half-degree <= j_max.

    The {chi, Z2} term is evaluated exactly through the diagonal action.
    Returns the new series and the list of half-degrees at which nonzero
    brackets were truncated.
    """
    out: dict[int, HomPoly] = {}
    truncated: list[int] = []

    def add(term: HomPoly):
        if len(term.coeffs) == 0:
            return
        j = term.q
        out[j] = out[j] + term if j in out else term

    c = chi.q
    chains = []
    if len(chi.coeffs) > 0:
        chains.append((-1.0, ad_z2(chi, z2_omega)))  # {chi, Z2} = -{Z2, chi}
    for j in sorted(series):
        chains.append((1.0, series[j]))

    for sign, head in chains:
        term = sign * head
        n = 0 if sign > 0 else 1   # the Z2 chain starts at ad^1
        # the n = 0 entry of the Z2 chain is Z2 itself, which stays outside the series
        if n == 1:
            if term.q > j_max:
                truncated.append(term.q)
                continue
            add(term * (1.0 / math.factorial(1)))
        else:
            add(term)
        while len(term.coeffs) > 0 and len(chi.coeffs) > 0:
            nxt_q = term.q + c - 1
            if nxt_q == term.q:
                break  # chi quadratic would loop forever; not used in practice
            if nxt_q > j_max:
                truncated.append(nxt_q)
                break
            term = poisson(chi, term)
            n += 1
            add(term * (1.0 / math.factorial(n)))
    return out, sorted(set(truncated))


def birkhoff(z2: HomPoly, P: HomPoly, omega: FrequencySet,
             cfg: NormalFormConfig) -> NormalFormResult:
    """Iterated normal form of H = Z2 + P up to order r.

    One step per target half-degree j' = p..r: the non-resonant part of the
    current Q^(2j') is removed by the generator of that degree and the series
    is pushed through the corresponding Lie transform.  A gamma at or above
    every divisor of a degree removes nothing there; that is a legitimate
    degenerate input, not an error.
    """
    if not P.is_real:
        raise ValueError("the perturbation must be real-valued")
    if P.q != cfg.p:
        raise ValueError(f"perturbation half-degree {P.q} does not match p={cfg.p}")
    if cfg.p < 2:
        raise ValueError("perturbation must have half-degree p >= 2")

    norm_p = norm_h(P, omega.omega_int, multistart=cfg.norm_multistart,
                    iters=cfg.norm_iters, seed=cfg.seed,
                    lower_levels=cfg.norm_lower_levels)
    eps = epsilon_r(cfg, norm_p.upper, omega)

    series: dict[int, HomPoly] = {P.q: P}
    generators: list[HomPoly] = []
    truncated: list[int] = []
    for jp in range(cfg.p, cfg.r + 1):
        Q = series.get(jp)
        if Q is None or len(Q.coeffs) == 0:
            generators.append(HomPoly(P.mode_set, jp, {}, validate=False, is_real=True))
            continue
        chi, q_res = solve_cohomological(Q, omega, cfg.gamma)
        generators.append(chi)
        if len(chi.coeffs) == 0:
            series[jp] = q_res
            continue
        series, trunc = lie_transform(omega, series, chi, cfg.J_max)
        truncated.extend(trunc)
        # the transform reproduces q_res at degree jp up to exact cancellation
        got = series.get(jp, HomPoly(P.mode_set, jp, {}, validate=False))
        scale = max((abs(c) for c in q_res.coeffs.values()), default=1.0)
        for key in set(got.coeffs) | set(q_res.coeffs):
            if abs(got.coeffs.get(key, 0j) - q_res.coeffs.get(key, 0j)) > 1e-12 * scale:
                raise AssertionError("lie transform disagrees with the cohomological step")
        series[jp] = q_res

    # gamma-resonance is exact per key for every normalized degree
    for j in range(cfg.p, cfg.r + 1):
        Qj = series.get(j)
        if Qj is None:
            continue
        div = _divisors_of(Qj, omega)
        if np.any(np.abs(div) >= cfg.gamma):
            raise AssertionError(f"degree {2 * j} kept a non-resonant key")

    tail = []
    for j in sorted(series):
        enc = norm_h(series[j], omega.omega_int, multistart=cfg.norm_multistart,
                     iters=cfg.norm_iters, seed=cfg.seed,
                     lower_levels=cfg.norm_lower_levels)
        bound = eps ** (-2.0 * (j - cfg.p)) * norm_p.upper
        tail.append(TailEntry(j, enc.upper, bound, enc.upper > bound * (1 + 1e-9)))

    return NormalFormResult(z2=z2, omega=omega, config=cfg, resonant=series,
                            generators=generators, eps_r=eps, norm_p=norm_p,
                            tail_report=tail, truncated_degrees=sorted(set(truncated)))


def transform_state(u: np.ndarray, generators, direction: str = "forward",
                    flow_dt: float = 0.05, flow_tol: float = 1e-14) -> np.ndarray:
    """Apply tau (forward) or tau^{-1} (inverse) to a state.

    forward composes the unit-time generator flows in construction order;
    inverse composes the time-(-1) flows in reverse order.
    """
    if direction == "forward":
        gens, t = list(generators), 1.0
    elif direction == "inverse":
        gens, t = list(reversed(list(generators))), -1.0
    else:
        raise ValueError("direction must be 'forward' or 'inverse'")
    v = np.asarray(u, dtype=complex).copy()
    for chi in gens:
        if len(chi.coeffs) == 0:
            continue
        v = flows.flow(chi.gradient, v, t, flow_dt, tol=flow_tol)
    return v


# ------------------------------------------------------------ (k, r, gamma)


@dataclass
class KRGammaReport:
    mode: int
    r: int
    gamma: float
    pairs_checked: int
    violations: list[tuple[tuple[int, ...], tuple[int, ...], float]] = field(default_factory=list)

    @property
    def certified(self) -> bool:
        return not self.violations


def suggest_gamma(mode_set: ModeSet, omega: FrequencySet, k: int, r: int,
                  safety: float = 0.5, cap: float = 0.999,
                  scope: str = "all") -> float:
    """A gamma guaranteed to pass check_krgamma on this truncation: a fraction
    of the smallest nonzero |Omega| over keys of half-degree <= r.

    scope="all" keeps gamma below every nonzero divisor, so the resonant set
    is exactly the equal-multiset kernel and the generator's denominators are
    bounded below by the full spectral gap.  scope="mode" only looks at keys
    whose two sides carry unequal multiplicity of mode k (a larger gamma, but
    the generator may then divide by smaller divisors on commuting keys).
    """
    w = {m: omega.value(m) for m in mode_set.modes}
    best = math.inf
    for q in range(1, r + 1):
        multis = list(combinations_with_replacement(mode_set.modes, q))
        sums = np.array([sum(w[m] for m in t) for t in multis])
        mult_k = np.array([t.count(k) for t in multis])
        for i0 in range(0, len(multis), 4096):
            i1 = min(i0 + 4096, len(multis))
            diff = np.abs(sums[i0:i1, None] - sums[None, :])
            if scope == "mode":
                diff[mult_k[i0:i1, None] == mult_k[None, :]] = np.inf
            else:
                diff[diff == 0.0] = np.inf
            best = min(best, float(diff.min()))
    return min(safety * best, cap)


def check_krgamma(mode_set: ModeSet, omega: FrequencySet, k: int, r: int,
                  gamma: float, max_pairs: int = 200_000_000,
                  max_report: int = 200) -> KRGammaReport:
    """Search for gamma-resonant keys of half-degree <= r that fail to commute
    with |u_k|^2 (unequal multiplicity of mode k on the two sides).

    An empty report certifies (k, r, gamma) non-resonance on this truncation.
    """
    if k not in mode_set:
        raise ValueError("mode k outside the mode set")
    w = {m: omega.value(m) for m in mode_set.modes}
    report = KRGammaReport(mode=k, r=r, gamma=gamma, pairs_checked=0)
    for q in range(1, r + 1):
        multis = list(combinations_with_replacement(mode_set.modes, q))
        n = len(multis)
        if report.pairs_checked + n * n > max_pairs:
            raise BudgetError("enumeration budget exceeded in check_krgamma")
        sums = np.array([sum(w[m] for m in t) for t in multis])
        mult_k = np.array([t.count(k) for t in multis])
        block = 4096
        for i0 in range(0, n, block):
            i1 = min(i0 + block, n)
            diff = np.abs(sums[i0:i1, None] - sums[None, :])
            bad = (diff <= gamma) & (mult_k[i0:i1, None] != mult_k[None, :])
            for bi, bj in zip(*np.nonzero(bad)):
                if len(report.violations) < max_report:
                    i = i0 + int(bi)
                    j = int(bj)
                    report.violations.append(
                        (multis[i], multis[j], float(sums[i] - sums[j])))
        report.pairs_checked += n * n
    return report
