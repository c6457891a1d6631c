"""Combinatorial analysis of symbolic Gabor determinants.

Treating the window as a variable vector z = (z_0, …, z_{N-1}), the
determinant of the system matrix over a size-N support is a homogeneous
polynomial of degree N.  Its monomials are indexed by ordered partitions
(B_0, …, B_{N-1}) of the row set with |B_κ| = l_κ, where l_κ counts the
columns with time shift κ (the column profile).  This module implements:

* profiles, their canonical consecutive-block partition, and partition
  classes (coset representatives of the quotient by block-preserving
  permutations);
* the consecutive-index (CI) monomial and its coefficient, which factors as
  a phase times a product of Vandermonde determinants in roots of unity and
  is therefore never zero;
* the lowest-index monomial obtained greedily;
* moment statistics of the discrete variable taking value i with
  probability α_i/N for a monomial z^α: the CI monomial minimizes the first
  moment and strictly minimizes the second among all classes, which is what
  makes it appear uniquely in the expansion;
* the full N!-diagonal symbolic expansion (the independent oracle for all of
  the above), and the univariate polynomial obtained by substituting
  z_n -> x^(n²), whose nonvanishing drives the power-window construction.

Exact coefficients are elements of Z[ω] represented canonically in the group
ring Z[x]/(x^N - 1) (`CyclicPoly`); they can be reduced to residues in a
cyclotomic context or evaluated as complex numbers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, NamedTuple

import numpy as np

from .backends import (
    DEFAULT_MIN_BITS,
    CyclotomicContext,
    embedding_primes,
)

TimeFreqIndex = tuple[int, int]
Monomial = tuple[int, ...]  # exponent vector α with Σα = N


class DimensionTooLargeError(ValueError):
    """Request exceeds the factorial enumeration budget."""


class BudgetExceededError(RuntimeError):
    """Class enumeration would exceed the configured budget."""


class CyclicPoly:
    """Integer polynomial in a root of unity of order `order`.

    Elements of Z[x]/(x^order - 1); multiplication is cyclic convolution.
    A zero coefficient vector certifies the value 0; a nonzero vector may
    still evaluate to zero in Z[ω] (e.g. 1 + ω + ω² for order 3), so
    zero-ness of values is decided by residue/complex evaluation.
    """

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs=None):
        self.order = order
        if coeffs is None:
            self.coeffs = (0,) * order
        else:
            coeffs = tuple(int(c) for c in coeffs)
            if len(coeffs) != order:
                raise ValueError("coefficient vector must have length `order`")
            self.coeffs = coeffs

    @classmethod
    def monomial(cls, order: int, exponent: int, coeff: int = 1) -> "CyclicPoly":
        c = [0] * order
        c[exponent % order] = coeff
        return cls(order, c)

    @classmethod
    def one(cls, order: int) -> "CyclicPoly":
        return cls.monomial(order, 0)

    def __add__(self, other: "CyclicPoly") -> "CyclicPoly":
        self._check(other)
        return CyclicPoly(self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "CyclicPoly") -> "CyclicPoly":
        self._check(other)
        return CyclicPoly(self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "CyclicPoly":
        return CyclicPoly(self.order, [-a for a in self.coeffs])

    def __mul__(self, other) -> "CyclicPoly":
        if isinstance(other, int):
            return CyclicPoly(self.order, [other * a for a in self.coeffs])
        self._check(other)
        out = [0] * self.order
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[(i + j) % self.order] += a * b
        return CyclicPoly(self.order, out)

    __rmul__ = __mul__

    def _check(self, other) -> None:
        if not isinstance(other, CyclicPoly) or other.order != self.order:
            raise ValueError("operands must be cyclic polynomials of the same order")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, CyclicPoly)
            and other.order == self.order
            and other.coeffs == self.coeffs
        )

    def __hash__(self) -> int:
        return hash((self.order, self.coeffs))

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def residue(self, ctx: CyclotomicContext) -> int:
        """Image in GF(p) under x -> root of unity of order `order`."""
        om = ctx.root_of_unity(self.order)
        p = ctx.prime
        acc, power = 0, 1
        for c in self.coeffs:
            acc = (acc + c * power) % p
            power = power * om % p
        return acc

    def complex_value(self) -> complex:
        om = np.exp(2j * np.pi / self.order)
        return complex(sum(c * om**e for e, c in enumerate(self.coeffs)))

    def __repr__(self) -> str:
        return f"CyclicPoly({self.order}, {self.coeffs})"

    def __str__(self) -> str:
        terms = []
        for e, c in enumerate(self.coeffs):
            if not c:
                continue
            if e == 0:
                terms.append(f"{c}")
            else:
                unit = "ω" if e == 1 else f"ω^{e}"
                if c == 1:
                    terms.append(unit)
                elif c == -1:
                    terms.append(f"-{unit}")
                else:
                    terms.append(f"{c}{unit}")
        if not terms:
            return "0"
        out = terms[0]
        for t in terms[1:]:
            out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
        return out


# ---------------------------------------------------------------------------
# profiles and partitions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ColumnProfile:
    """Counts l_κ of support columns per time shift κ, with Σ l_κ = N."""

    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if any(c < 0 for c in counts):
            raise ValueError("counts must be nonnegative")
        if sum(counts) != len(counts):
            raise ValueError("counts must sum to the dimension")

    @property
    def n(self) -> int:
        return len(self.counts)

    @property
    def prefix_sums(self) -> tuple[int, ...]:
        """m_0 = 0, m_κ = l_0 + … + l_{κ-1}; length N+1 with m_N = N."""
        m = [0]
        for c in self.counts:
            m.append(m[-1] + c)
        return tuple(m)

    @property
    def is_normalized(self) -> bool:
        m = self.prefix_sums
        return all(m[k] - k >= 0 for k in range(self.n))

    def class_count(self) -> int:
        out = math.factorial(self.n)
        for c in self.counts:
            out //= math.factorial(c)
        return out


def profile_of_support(support, n: int) -> ColumnProfile:
    support = list(support)
    if len(support) != n:
        raise ValueError(f"support must have exactly {n} indices")
    counts = [0] * n
    for kappa, _ in support:
        counts[kappa % n] += 1
    return ColumnProfile(tuple(counts))


def canonical_partition(profile: ColumnProfile) -> list[range]:
    """Consecutive blocks A_κ = [m_κ, m_{κ+1}); empty when l_κ = 0."""
    m = profile.prefix_sums
    return [range(m[k], m[k + 1]) for k in range(profile.n)]


def partition_classes(profile: ColumnProfile) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All ordered partitions (B_0, …, B_{N-1}) of {0,…,N-1} with |B_κ| = l_κ.

    These are coset representatives for the monomial classes: each class
    contributes exactly one ordered partition, enumerated in lexicographic
    order of the (sorted) blocks.
    """
    n = profile.n

    def rec(k: int, remaining: tuple[int, ...]):
        if k == n:
            yield ()
            return
        for block in itertools.combinations(remaining, profile.counts[k]):
            rest = tuple(x for x in remaining if x not in block)
            for tail in rec(k + 1, rest):
                yield (block,) + tail

    return rec(0, tuple(range(n)))


def canonical_class(profile: ColumnProfile) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(block) for block in canonical_partition(profile))


def monomial_of_class(profile: ColumnProfile, cls) -> Monomial:
    """Exponent vector of the monomial produced by an ordered partition.

    Block B_κ contributes the variable indices (b - κ) mod N for b in B_κ,
    counted with multiplicity.
    """
    n = profile.n
    cls = tuple(tuple(b) for b in cls)
    if len(cls) != n or any(len(b) != c for b, c in zip(cls, profile.counts)):
        raise ValueError("class blocks do not match the profile sizes")
    if sorted(x for b in cls for x in b) != list(range(n)):
        raise ValueError("class blocks must partition {0,…,N-1}")
    alpha = [0] * n
    for kappa, block in enumerate(cls):
        for b in block:
            alpha[(b - kappa) % n] += 1
    return tuple(alpha)


def ci_monomial(profile: ColumnProfile) -> Monomial:
    """The consecutive-index monomial: the one from the canonical partition."""
    return monomial_of_class(profile, canonical_class(profile))


def normalize_profile(profile: ColumnProfile) -> tuple[int, ColumnProfile]:
    """Cyclic shift γ making every prefix defect m_κ - κ nonnegative.

    Returns (γ, shifted profile) with l'_κ = l_{(κ+γ) mod N}.  γ is the
    smallest index attaining min_κ (m_κ - κ); after the shift the minimum
    defect is 0, attained at κ = 0.
    """
    n = profile.n
    m = profile.prefix_sums
    defects = [m[k] - k for k in range(n)]
    gamma = defects.index(min(defects))
    shifted = ColumnProfile(tuple(profile.counts[(k + gamma) % n] for k in range(n)))
    assert shifted.is_normalized
    return gamma, shifted


def normalize_support(support, n: int) -> tuple[int, list[TimeFreqIndex]]:
    """Translate Λ by (-γ, 0) so its profile is normalized; lex-sorted result."""
    gamma, _ = normalize_profile(profile_of_support(support, n))
    out = sorted(((k - gamma) % n, l % n) for k, l in support)
    return gamma, out


def interval_of_profile(profile: ColumnProfile) -> tuple[int, int]:
    """(α, β) = (min, max) of the prefix defects m_κ - κ over 0 ≤ κ < N.

    The shifted blocks A_κ - κ, read as integer sets, tile exactly the
    interval [α, β]; this function verifies that and that β - α ≤ N - 1,
    raising AssertionError on any violation (which would be a bug, not a
    data error).
    """
    n = profile.n
    m = profile.prefix_sums
    defects = [m[k] - k for k in range(n)]
    alpha, beta = min(defects), max(defects)
    union: set[int] = set()
    for k in range(n):
        union.update(range(m[k] - k, m[k + 1] - (k + 1) + 1))
    assert union == set(range(alpha, beta + 1)), "shifted blocks do not tile an interval"
    assert beta - alpha <= n - 1
    return alpha, beta


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------


class MomentPair(NamedTuple):
    first: Fraction
    second: Fraction


def monomial_moments(alpha: Monomial) -> MomentPair:
    """Moments of the variable with P[X = i] = α_i / N."""
    n = len(alpha)
    e1 = Fraction(sum(i * a for i, a in enumerate(alpha)), n)
    e2 = Fraction(sum(i * i * a for i, a in enumerate(alpha)), n)
    return MomentPair(e1, e2)


def moments(profile: ColumnProfile, cls) -> MomentPair:
    """Moments of the monomial of a class of a *normalized* profile."""
    if not profile.is_normalized:
        raise ValueError("moments require a normalized profile (m_k - k >= 0)")
    return monomial_moments(monomial_of_class(profile, cls))


# ---------------------------------------------------------------------------
# the CI coefficient and the expansion oracle
# ---------------------------------------------------------------------------


def _vandermonde_in_omega(lams, n: int) -> CyclicPoly:
    out = CyclicPoly.one(n)
    for i in range(len(lams)):
        for j in range(i + 1, len(lams)):
            out = out * (
                CyclicPoly.monomial(n, lams[j]) - CyclicPoly.monomial(n, lams[i])
            )
    return out


def ci_coefficient(support, n: int) -> CyclicPoly:
    """Coefficient of the CI monomial in the normalized support's determinant.

    The support is translated in time to normalize its profile and sorted
    lexicographically; the coefficient is then the product over κ of
    ω^(m_κ·Σλ) · V(ω^(λ_1), …, ω^(λ_{l_κ})) with the Vandermonde V.  Under
    the lexicographic column order the block-canonical diagonal is the
    identity permutation, so the arrangement sign is +1.  The value is a
    product of nonvanishing Vandermondes in distinct roots of unity, hence
    never zero.
    """
    _, nsup = normalize_support(support, n)
    prof = profile_of_support(nsup, n)
    m = prof.prefix_sums
    out = CyclicPoly.one(n)
    for kappa in range(n):
        lams = [l for k, l in nsup if k == kappa]
        if not lams:
            continue
        out = out * CyclicPoly.monomial(n, m[kappa] * sum(lams))
        out = out * _vandermonde_in_omega(lams, n)
    return out


def _perm_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def expand_determinant(
    support, n: int, max_dimension: int = 6
) -> dict[Monomial, CyclicPoly]:
    """Full symbolic determinant expansion by enumerating all N! diagonals.

    Returns {exponent vector: coefficient in Z[x]/(x^N-1)}, dropping
    monomials whose coefficient representative is identically zero.  The
    support is used in lexicographic column order.  This is the brute-force
    oracle against which the closed-form machinery is validated.
    """
    if n > max_dimension:
        raise DimensionTooLargeError(f"refusing the {n}! diagonal enumeration")
    support = sorted((k % n, l % n) for k, l in support)
    if len(support) != n or len(set(support)) != n:
        raise ValueError(f"support must consist of {n} distinct indices")
    acc: dict[Monomial, list[int]] = {}
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        oexp = 0
        alpha = [0] * n
        for c, (kappa, lam) in enumerate(support):
            r = perm[c]
            oexp += r * lam
            alpha[(r - kappa) % n] += 1
        key = tuple(alpha)
        coeffs = acc.setdefault(key, [0] * n)
        coeffs[oexp % n] += sign
    return {k: CyclicPoly(n, v) for k, v in acc.items() if any(v)}


def lowest_index_monomial(support, n: int, all_tiebreaks: bool = False) -> Monomial:
    """Greedy monomial: repeatedly take an entry with minimal variable index,
    then delete its row and column.

    The result does not depend on which minimal-index entry is chosen; with
    all_tiebreaks=True every choice order is explored and the invariance is
    asserted (exponential — intended for small N).
    """
    support = sorted((k % n, l % n) for k, l in support)
    if len(support) != n or len(set(support)) != n:
        raise ValueError(f"support must consist of {n} distinct indices")
    kappas = [k for k, _ in support]

    def var(r: int, c: int) -> int:
        return (r - kappas[c]) % n

    def greedy(rows: frozenset[int], cols: frozenset[int], pick_all: bool) -> set[Monomial]:
        if not rows:
            return {()}
        best = min(var(r, c) for r in rows for c in cols)
        choices = [(r, c) for r in rows for c in cols if var(r, c) == best]
        if not pick_all:
            choices = choices[:1]
        results = set()
        for r, c in choices:
            for tail in greedy(rows - {r}, cols - {c}, pick_all):
                results.add(tuple(sorted((best,) + tail)))
        return results

    universe = frozenset(range(n))
    outcomes = greedy(universe, universe, all_tiebreaks)
    assert len(outcomes) == 1, "tie-breaking changed the lowest-index monomial"
    indices = next(iter(outcomes))
    alpha = [0] * n
    for i in indices:
        alpha[i] += 1
    return tuple(alpha)


# ---------------------------------------------------------------------------
# uniqueness verification
# ---------------------------------------------------------------------------


@dataclass
class CIUniquenessReport:
    profile: ColumnProfile
    class_count: int
    ci_class_hits: int
    first_moment_minimal: bool
    second_moment_strict: bool
    second_moments: list[Fraction]

    @property
    def passed(self) -> bool:
        return self.ci_class_hits == 1 and self.first_moment_minimal and self.second_moment_strict


def verify_ci_uniqueness(
    profile: ColumnProfile, max_classes: int = 2_000_000
) -> CIUniquenessReport:
    """Check, by enumerating every partition class of a normalized profile:

    (a) exactly one class produces the CI exponent vector;
    (b) the CI monomial has minimal first moment;
    (c) every non-canonical class has strictly larger second moment.
    """
    if not profile.is_normalized:
        raise ValueError("verify_ci_uniqueness requires a normalized profile")
    if profile.class_count() > max_classes:
        raise BudgetExceededError(
            f"{profile.class_count()} classes exceed the budget of {max_classes}"
        )
    ci_alpha = ci_monomial(profile)
    ci_m = monomial_moments(ci_alpha)
    canon = canonical_class(profile)
    hits = 0
    first_ok = True
    second_ok = True
    seconds: list[Fraction] = []
    for cls in partition_classes(profile):
        alpha = monomial_of_class(profile, cls)
        m = monomial_moments(alpha)
        seconds.append(m.second)
        if alpha == ci_alpha:
            hits += 1
        if m.first < ci_m.first:
            first_ok = False
        if cls != canon and m.second <= ci_m.second:
            second_ok = False
    return CIUniquenessReport(profile, len(seconds), hits, first_ok, second_ok, seconds)


def enumerate_profiles(n: int) -> Iterator[ColumnProfile]:
    """All column profiles for dimension n (compositions of n into n parts)."""
    for dividers in itertools.combinations(range(2 * n - 1), n - 1):
        counts = []
        prev = -1
        for d in dividers:
            counts.append(d - prev - 1)
            prev = d
        counts.append(2 * n - 2 - prev)
        yield ColumnProfile(tuple(counts))


# ---------------------------------------------------------------------------
# the squared-exponent substitution polynomial
# ---------------------------------------------------------------------------


@dataclass
class QPolynomial:
    """Q(x): the symbolic determinant with z_n replaced by x^(n²), mod p."""

    coeffs: tuple[int, ...]  # ascending powers, reduced mod context.prime
    context: CyclotomicContext
    n: int

    @property
    def degree(self) -> int:
        nz = [e for e, c in enumerate(self.coeffs) if c]
        return max(nz) if nz else -1

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(e for e, c in enumerate(self.coeffs) if c)

    def __bool__(self) -> bool:
        return any(self.coeffs)


def _interpolate_mod(xs: list[int], ys: list[int], p: int) -> list[int]:
    """Newton interpolation mod p; returns ascending coefficients."""
    k = len(xs)
    dd = [y % p for y in ys]
    for j in range(1, k):
        for i in range(k - 1, j - 1, -1):
            num = (dd[i] - dd[i - 1]) % p
            den = (xs[i] - xs[i - j]) % p
            dd[i] = num * pow(den, p - 2, p) % p
    poly = [dd[k - 1]]
    for i in range(k - 2, -1, -1):
        nxt = [0] * (len(poly) + 1)
        xi = xs[i] % p
        for t, c in enumerate(poly):
            nxt[t + 1] = (nxt[t + 1] + c) % p
            nxt[t] = (nxt[t] - xi * c) % p
        nxt[0] = (nxt[0] + dd[i]) % p
        poly = nxt
    return poly


def _q_eval_points(support, n: int, ctx: CyclotomicContext, count: int) -> list[int]:
    """Evaluate the symbolic determinant at windows z_j = t^(j²), t = 0..count-1."""
    from .backends import ResidueBackend, det_mod
    from .operators import Window, gabor_matrix

    backend = ResidueBackend(ctx)
    support = sorted((k % n, l % n) for k, l in support)
    values = []
    for t in range(count):
        # t = 0 is a valid point: z_0 = 0**0 = 1, the rest vanish
        entries = np.array([pow(t, j * j, ctx.prime) for j in range(n)], dtype=np.int64)
        w = Window(entries, backend)
        mat = gabor_matrix(w, support).matrix
        values.append(det_mod(mat.tolist(), ctx.prime))
    return values


def q_polynomial(
    support,
    n: int,
    context: CyclotomicContext | None = None,
    min_bits: int = DEFAULT_MIN_BITS,
    degree_slack: int = 4,
    escalation_primes: int = 3,
) -> QPolynomial:
    """Coefficients of Q(x), by exact evaluation/interpolation mod p.

    The determinant with z_j = t^(j²) is evaluated at N(N-1)² + 1 + slack
    points and interpolated.  The slack coefficients beyond the degree bound
    N(N-1)² are checked to vanish.  Q is a nonzero polynomial for every
    support; if all coefficients vanish mod the first prime (which a
    spurious-zero cascade could in principle cause), the computation is
    retried under further primes before failing.
    """
    degree_bound = n * (n - 1) ** 2
    count = degree_bound + 1 + degree_slack
    contexts = [context] if context is not None else embedding_primes(n, escalation_primes, min_bits)
    last = None
    for ctx in contexts:
        if ctx.prime <= count:
            raise ValueError("prime too small for the interpolation point count")
        ys = _q_eval_points(support, n, ctx, count)
        coeffs = _interpolate_mod(list(range(count)), ys, ctx.prime)
        if any(coeffs[degree_bound + 1 :]):
            raise AssertionError("interpolated Q exceeds its degree bound — bug")
        last = QPolynomial(tuple(coeffs[: degree_bound + 1]), ctx, n)
        if last:
            return last
    raise AssertionError("Q interpolated to zero under all escalation primes — bug")


def monomial_str(alpha: Monomial) -> str:
    """Render an exponent vector as e.g. "z0*z1^2"."""
    parts = []
    for i, a in enumerate(alpha):
        if a == 1:
            parts.append(f"z{i}")
        elif a > 1:
            parts.append(f"z{i}^{a}")
    return "*".join(parts) if parts else "1"
