"""Canonical perturbation theory for the quartic oscillator and double well.

The Hamiltonian is split as ``H = omega0 I0 + sum_nu eps^nu H_nu(phi0, I0)``
in the action-angle variables ``(phi0, I0)`` of the harmonic part. A
type-2 generating function

    W(phi0, I) = phi0 I + sum_mu eps^mu W_mu(phi0, I)

removes the angle dependence order by order: with ``I0 = I + delta``,
``delta = sum_mu eps^mu dW_mu/dphi0``,

    omega0 dW_mu/dphi0 = <Phi_mu> - Phi_mu,
    Phi_mu = [eps^mu] sum_nu eps^nu H_nu(phi0, I + delta_{<mu}).

Branches
--------
``k_positive``
    ``eps = lambda``, ``omega0 = sqrt(k)``, ``H_1 = I0^2 sin^4(phi0) / (6k)``.
``k_negative``
    Expansion about the left well bottom ``q = Q - a`` with
    ``a = sqrt(6 kappa)/eps``, ``kappa = -k`` and ``eps = sqrt(lambda)``;
    ``omega0 = sqrt(2 kappa)``, cubic and quartic terms in ``Q`` give
    ``H_1`` and ``H_2``. The constant well-bottom energy is dropped.

All series monomials carry their power of ``eps``, so ``W_mu`` below
includes the factor ``eps^mu``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from ..errors import DomainError, SeriesOrderError
from ..qmt import MetricValue
from .series import COS, INF, SIN, Monomial, TrigSeries, mono, substitute_action
from .surd import Surd

K_POSITIVE = "k_positive"
K_NEGATIVE = "k_negative"

# Smallest generating-function order that fixes the first three coefficients
# of every metric component on each branch.
MIN_ORDER = {K_POSITIVE: 2, K_NEGATIVE: 5}


@dataclass(frozen=True)
class BranchSpec:
    branch: str
    order: int

    def __post_init__(self):
        if self.branch not in (K_POSITIVE, K_NEGATIVE):
            raise DomainError(f"unknown branch {self.branch!r}")
        if int(self.order) != self.order or self.order < 1:
            raise DomainError(f"order must be a positive integer, got {self.order}")

    @classmethod
    def for_k(cls, k: float, order: int | None = None) -> "BranchSpec":
        branch = K_POSITIVE if k > 0 else K_NEGATIVE
        if k == 0:
            raise DomainError("perturbation series are singular at k = 0")
        return cls(branch, order if order is not None else MIN_ORDER[branch])

    def coupling(self, lam: float) -> float:
        return lam if self.branch == K_POSITIVE else math.sqrt(lam)


@dataclass(frozen=True)
class BranchModel:
    omega0: object
    omega0_pk: Fraction
    perturbation: TrigSeries
    q2: TrigSeries


def _sin1() -> TrigSeries:
    return TrigSeries.term(Fraction(1), 1, SIN)


@lru_cache(maxsize=None)
def branch_model(branch: str) -> BranchModel:
    s = _sin1()
    if branch == K_POSITIVE:
        h1 = s.power(4).scale(Fraction(1, 6), mono(2, 1, -1))
        q2 = s.power(2).scale(Fraction(2), mono(1, 0, Fraction(-1, 2)))
        return BranchModel(Fraction(1), Fraction(1, 2), h1, q2)
    root6 = Surd(1, 2, 1)
    big_q = s.scale(Surd(1, 1, 0), mono(Fraction(1, 2), 0, Fraction(-1, 4)))
    h1 = big_q.power(3).scale(-root6 / 6, mono(0, 1, Fraction(1, 2)))
    h2 = big_q.power(4).scale(Fraction(1, 24), mono(0, 2, 0))
    q = big_q - TrigSeries.term(root6, monomial=mono(0, -1, Fraction(1, 2)))
    return BranchModel(Surd(1, 2, 0), Fraction(1, 2), h1 + h2, q * q)


def _over_omega0(series: TrigSeries, model: BranchModel) -> TrigSeries:
    inv = 1 / model.omega0 if isinstance(model.omega0, Surd) else Fraction(1) / model.omega0
    return series.scale(inv, Monomial(Fraction(0), 0, -model.omega0_pk))


@dataclass(frozen=True)
class Solution:
    """Generating-function data of one branch to a given order."""

    spec: BranchSpec
    model: BranchModel
    W: tuple  # W_1..W_M
    secular: tuple  # <Phi_1>..<Phi_{M+1}>
    delta: TrigSeries  # I0 - I
    chi: TrigSeries  # phi - phi0


@lru_cache(maxsize=None)
def _solve(branch: str, order: int) -> Solution:
    spec = BranchSpec(branch, order)
    model = branch_model(branch)
    delta = TrigSeries.zero(order=0)
    W, secular = [], []
    for mu in range(1, order + 2):
        phi_mu = substitute_action(model.perturbation, delta).coefficient(mu)
        mean = phi_mu.mean()
        secular.append(mean)
        if mu == order + 1:
            break
        w_prime = _over_omega0(mean - phi_mu, model)
        w_mu = w_prime.integrate_phi()
        if not w_mu.has_zero_mean():
            raise SeriesOrderError(f"W_{mu} has a nonzero angle average")
        W.append(w_mu)
        delta.order = mu
        delta = delta + w_prime
    chi = TrigSeries.zero(order=INF)
    for w in W:
        chi = chi + w.d_action()
    chi.order = order
    return Solution(spec, model, tuple(W), tuple(secular), delta, chi)


def solve(spec: BranchSpec) -> Solution:
    return _solve(spec.branch, spec.order)


def w_functions(spec: BranchSpec) -> list[TrigSeries]:
    """``W_1..W_M``, each including its factor ``eps^mu``."""
    return list(solve(spec).W)


@dataclass(frozen=True)
class CanonicalTransform:
    """``I0 = action(phi0, I)`` and ``phi = phi0 + angle_shift(phi0, I)``."""

    action: TrigSeries
    angle_shift: TrigSeries

    def jacobian_ratio(self, phi0, I, k_abs, eps):
        """``(d phi/d phi0) / (d I0/d I)``; equals 1 for a canonical map."""
        num = 1.0 + self.angle_shift.d_phi().evaluate(phi0, I, k_abs, eps)
        den = self.action.d_action().evaluate(phi0, I, k_abs, eps)
        return num / den


def canonical_transform(spec: BranchSpec) -> CanonicalTransform:
    sol = solve(spec)
    action = TrigSeries.term(Fraction(1), monomial=mono(1)) + sol.delta
    action.order = spec.order
    return CanonicalTransform(action, sol.chi)


def energy_series(spec: BranchSpec) -> TrigSeries:
    """``E(I) = omega0 I + sum_mu <Phi_mu>``, known through ``eps^(M+1)``."""
    sol = solve(spec)
    e = TrigSeries.term(sol.model.omega0, monomial=Monomial(Fraction(1), 0, sol.model.omega0_pk))
    for s in sol.secular:
        e = e + s
    e.order = spec.order + 1
    return e


def frequency_series(spec: BranchSpec) -> TrigSeries:
    """``omega(I) = dE/dI``."""
    return energy_series(spec).d_action()


def deformation_series(spec: BranchSpec) -> tuple[TrigSeries, TrigSeries]:
    """``O1 = q^2/2`` and ``O2 = q^4/24`` as series in ``(phi0, I)``."""
    sol = solve(spec)
    q2 = sol.model.q2
    o1 = q2.scale(Fraction(1, 2))
    o2 = (q2 * q2).scale(Fraction(1, 24))
    return substitute_action(o1, sol.delta), substitute_action(o2, sol.delta)


@dataclass(frozen=True)
class BetaSeries:
    """``beta^(n) = A_n - i B_n`` for ``n >= 0`` as angle-free series."""

    real: dict = field(default_factory=dict)
    imag_neg: dict = field(default_factory=dict)

    def harmonics(self) -> list[int]:
        return sorted(self.real)

    def evaluate(self, n: int, I: float, k_abs: float, eps: float) -> complex:
        a = self.real[n].evaluate(0.0, I, k_abs, eps)
        b = self.imag_neg[n].evaluate(0.0, I, k_abs, eps)
        return complex(a, -b)


def _trig_of_shift(chi: TrigSeries, n: int, powers: list[TrigSeries], order) -> tuple[TrigSeries, TrigSeries]:
    """``cos(n chi)`` and ``sin(n chi)`` from precomputed powers of ``chi``."""
    c = TrigSeries.zero(order=INF)
    s = TrigSeries.zero(order=INF)
    for j, pj in enumerate(powers):
        coef = Fraction(n) ** j / math.factorial(j)
        sign = -1 if (j // 2) % 2 else 1
        if j % 2 == 0:
            c = c + pj.scale(sign * coef)
        else:
            s = s + pj.scale(sign * coef)
    c.order = min(c.order, order)
    s.order = min(s.order, order)
    return c, s


def _beta_one(f: TrigSeries, chi: TrigSeries) -> BetaSeries:
    # powers of chi needed so that dropped terms lie beyond the order of f
    j_max = max(1, int(f.order - f.lowest)) if not math.isinf(f.order) else 1
    powers = [TrigSeries.term(Fraction(1))]
    for _ in range(j_max):
        powers.append(powers[-1] * chi)
    n_max = f.max_harmonic + j_max * chi.max_harmonic
    real, imag = {}, {}
    real[0] = f.mean()
    imag[0] = TrigSeries.zero(order=real[0].order)
    half = Fraction(1, 2)
    for n in range(1, n_max + 1):
        c, s = _trig_of_shift(chi, n, powers, j_max)
        a = f.harmonic_of_product(c, n, COS) - f.harmonic_of_product(s, n, SIN)
        b = f.harmonic_of_product(c, n, SIN) + f.harmonic_of_product(s, n, COS)
        real[n] = a.scale(half)
        imag[n] = b.scale(half)
    return BetaSeries(real, imag)


@lru_cache(maxsize=None)
def _beta(branch: str, order: int) -> tuple[BetaSeries, BetaSeries]:
    spec = BranchSpec(branch, order)
    sol = solve(spec)
    jac = TrigSeries.term(Fraction(1)) + sol.chi.d_phi()
    o1, o2 = deformation_series(spec)
    return _beta_one(jac * o1, sol.chi), _beta_one(jac * o2, sol.chi)


def beta_series(spec: BranchSpec) -> tuple[BetaSeries, BetaSeries]:
    """Fourier coefficients of ``O1`` and ``O2`` in the true angle.

    ``beta_i^(n) = <(d phi/d phi0) O_i exp(-i n phi)>`` averaged over ``phi0``,
    with ``exp(-i n chi)`` expanded in powers of the angle shift.
    """
    return _beta(spec.branch, spec.order)


def _inverse_square(u: TrigSeries) -> TrigSeries:
    """``(1 + u)^-2`` for ``u`` of positive order."""
    j_max = int(u.order) if not math.isinf(u.order) else 0
    out = TrigSeries.term(Fraction(1))
    pj = TrigSeries.term(Fraction(1))
    for j in range(1, j_max + 1):
        pj = pj * u
        if pj.lowest > u.order:
            break
        out = out + pj.scale((-1) ** j * (j + 1))
    out.order = min(out.order, u.order)
    return out


@dataclass(frozen=True)
class CMTSeries:
    g11: TrigSeries
    g12: TrigSeries
    g22: TrigSeries

    def components(self) -> dict:
        return {"11": self.g11, "12": self.g12, "22": self.g22}

    def evaluate(self, I: float, k: float, lam: float, branch: str) -> MetricValue:
        eps = lam if branch == K_POSITIVE else math.sqrt(lam)
        kk = abs(k)
        return MetricValue(*(s.evaluate(0.0, I, kk, eps) for s in (self.g11, self.g12, self.g22)))

    def evaluate_identified(self, k: float, lam: float, f, hbar: float, branch: str) -> MetricValue:
        """Evaluate with every ``I^p`` replaced by ``(f[p] hbar)^p``."""
        eps = lam if branch == K_POSITIVE else math.sqrt(lam)
        kk = abs(k)
        out = []
        for s in (self.g11, self.g12, self.g22):
            terms = []
            for _, _, mk, c in s.items():
                if mk.pI.denominator != 1 or mk.pI < 1:
                    raise SeriesOrderError(f"cannot identify action power {mk.pI}")
                p = int(mk.pI)
                terms.append(float(c) * (f[p] * hbar) ** p * eps**mk.pe * kk ** float(mk.pk))
            out.append(math.fsum(terms))
        return MetricValue(*out)


@lru_cache(maxsize=None)
def _cmt(branch: str, order: int) -> CMTSeries:
    spec = BranchSpec(branch, order)
    b1, b2 = _beta(branch, order)
    sol = solve(spec)
    model = sol.model
    u = TrigSeries.zero(order=INF)
    for s in sol.secular:
        u = u + s.d_action()
    u.order = order + 1
    u = _over_omega0(u, model)
    w0sq = model.omega0 * model.omega0
    inv_w0sq = 1 / w0sq if isinstance(w0sq, Surd) else Fraction(1) / w0sq
    factor = _inverse_square(u).scale(inv_w0sq, Monomial(Fraction(0), 0, -2 * model.omega0_pk))
    out = []
    for x, y in ((b1, b1), (b1, b2), (b2, b2)):
        total = TrigSeries.zero(order=INF)
        for n in x.harmonics():
            if n == 0:
                continue
            prod = x.real[n] * y.real[n] + x.imag_neg[n] * y.imag_neg[n]
            total = total + prod.scale(Fraction(2, n * n))
        out.append(total * factor)
    return CMTSeries(*out)


def cmt_series(spec: BranchSpec) -> CMTSeries:
    """Classical metric as angle-free series in ``(I, eps, |k|)``."""
    return _cmt(spec.branch, spec.order)


# Expected (I power, |k| power) of the coefficient at table index alpha, and
# the coupling power where it sits.
def _table_layout(branch: str, comp: str, alpha: int):
    a = Fraction(alpha)
    if branch == K_POSITIVE:
        base = {"11": (2, Fraction(-2)), "12": (3, Fraction(-5, 2)), "22": (4, Fraction(-3))}[comp]
        return alpha, Fraction(base[0]) + a, base[1] - Fraction(3, 2) * a
    shift = {"11": (-2, Fraction(-1, 2)), "12": (-4, Fraction(1, 2)), "22": (-6, Fraction(3, 2))}[comp]
    return 2 * alpha + shift[0], Fraction(1) + a, shift[1] - Fraction(3, 2) * a


def cmt_series_assemble(spec: BranchSpec) -> dict:
    """Dimensionless coefficient tables from the classical metric series.

    Returns ``{component: [coefficient_0, coefficient_1, ...]}`` with exact
    coefficients, listing every index whose coupling power is within the
    known order. For ``k_positive`` these are ``b_alpha`` (sign-alternation
    removed); for ``k_negative`` they are ``c_alpha``.

    Raises
    ------
    SeriesOrderError
        If a coefficient carries powers of ``I`` or ``|k|`` different from
        the table layout, or odd couplings survive on the ``k_negative``
        branch.
    """
    cmt = cmt_series(spec)
    tables = {}
    for comp, series in cmt.components().items():
        if spec.branch == K_NEGATIVE:
            odd = [mk for _, _, mk, _ in series.items() if mk.pe % 2]
            if odd:
                raise SeriesOrderError(f"odd coupling powers in g{comp}")
        coeffs = []
        alpha = 0
        while True:
            pe, pI, pk = _table_layout(spec.branch, comp, alpha)
            if pe > series.order:
                break
            value = Fraction(0)
            for m, kind, mk, c in series.coefficient(pe).items():
                if (mk.pI, mk.pk) != (pI, pk):
                    raise SeriesOrderError(f"unexpected monomial {mk} in g{comp}")
                value = c
            if spec.branch == K_POSITIVE and alpha % 2:
                value = -value
            coeffs.append(value)
            alpha += 1
        tables[comp] = coeffs
    return tables


def dump(spec: BranchSpec) -> str:
    """Plain-text listing of the generated series for diffing."""
    sol = solve(spec)
    ct = canonical_transform(spec)
    o1, o2 = deformation_series(spec)
    b1, b2 = beta_series(spec)
    lines = [f"# branch {spec.branch} order {spec.order}",
             "# columns: factor, harmonic, phase, power of I, power of coupling, power of |k|"]

    def block(title, series):
        lines.append(f"[{title}] order={series.order}")
        text = series.dump()
        if text:
            lines.append(text)

    for mu, w in enumerate(sol.W, start=1):
        block(f"W_{mu}", w)
    block("energy", energy_series(spec))
    block("frequency", frequency_series(spec))
    block("I0", ct.action)
    block("angle_shift", ct.angle_shift)
    block("O1", o1)
    block("O2", o2)
    for name, beta in (("beta1", b1), ("beta2", b2)):
        for n in beta.harmonics():
            block(f"{name}^({n}) real", beta.real[n])
            block(f"{name}^({n}) minus_imag", beta.imag_neg[n])
    for comp, series in cmt_series(spec).components().items():
        block(f"g{comp}", series)
    return "\n".join(lines) + "\n"
