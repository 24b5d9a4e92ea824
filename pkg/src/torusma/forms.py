"""(p,q)-form algebra on the torus: del, delbar, d, d^c, wedge, integration.

Components are stored only for strictly increasing multi-indices (J, K); a
component array is the coefficient of dz^J ^ dzbar^K with J and K each in
increasing order and all dz factors written before the dzbar factors.

The Kahler form of a metric g is omega(g) = i * sum g_{j kbar} dz^j ^ dzbar^k,
and a pair i dz^j ^ dzbar^j integrates to the unit real measure, so that
integral(omega_flat^n) = n! * Vol = n! on the unit torus (see CONVENTIONS.md).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .geometry import HermitianMetricField, metric_from_potential, positivity_check
from .grid import Grid, GridMismatchError, PeriodicScalarField, make_field, partial_x, partial_z, partial_zbar

Index = tuple[int, ...]


def increasing_indices(n: int, p: int) -> list[Index]:
    return list(itertools.combinations(range(n), p))


def merge_sign(a: Index, b: Index) -> tuple[Index, int] | None:
    """Merge two disjoint increasing index tuples; None if they overlap.

    Returns the merged increasing tuple and the sign of the interleaving
    permutation.
    """
    if set(a) & set(b):
        return None
    merged = tuple(sorted(a + b))
    perm = a + b
    sign = 1
    # count inversions of the concatenation relative to sorted order
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return merged, sign


@dataclass(frozen=True)
class PqForm:
    """A (p,q)-form as component fields over strictly increasing multi-indices."""

    grid: Grid
    p: int
    q: int
    components: dict[tuple[Index, Index], np.ndarray]

    def __post_init__(self) -> None:
        n = self.grid.n
        if not (0 <= self.p and 0 <= self.q):
            raise ValueError("bidegree must be nonnegative")
        expected = {
            (J, K)
            for J in increasing_indices(n, self.p)
            for K in increasing_indices(n, self.q)
        } if self.p <= n and self.q <= n else set()
        if set(self.components) != expected:
            raise ValueError(
                f"({self.p},{self.q})-form must carry exactly the components {sorted(expected)}"
            )
        for arr in self.components.values():
            if arr.shape != self.grid.shape:
                raise ValueError("component array shape does not match the grid")

    def component(self, J: Index, K: Index) -> np.ndarray:
        return self.components[(tuple(J), tuple(K))]

    def sup_norm(self) -> float:
        if not self.components:
            return 0.0
        return max(float(np.max(np.abs(a))) for a in self.components.values())

    def __add__(self, other: "PqForm") -> "PqForm":
        if (other.grid, other.p, other.q) != (self.grid, self.p, self.q):
            raise ValueError("can only add forms of equal bidegree on one grid")
        return PqForm(
            self.grid, self.p, self.q,
            {key: self.components[key] + other.components[key] for key in self.components},
        )

    def __sub__(self, other: "PqForm") -> "PqForm":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "PqForm":
        return PqForm(
            self.grid, self.p, self.q,
            {key: arr * scalar for key, arr in self.components.items()},
        )

    __rmul__ = __mul__


def zero_form(grid: Grid, p: int, q: int) -> PqForm:
    n = grid.n
    comps = {}
    if p <= n and q <= n:
        comps = {
            (J, K): np.zeros(grid.shape, dtype=complex)
            for J in increasing_indices(n, p)
            for K in increasing_indices(n, q)
        }
    return PqForm(grid, p, q, comps)


def scalar_form(f: PeriodicScalarField) -> PqForm:
    return PqForm(f.grid, 0, 0, {((), ()): f.values.astype(complex)})


@dataclass(frozen=True)
class FormSum:
    """A finite sum of forms of distinct bidegrees (a mixed-degree form)."""

    grid: Grid
    parts: dict[tuple[int, int], PqForm]

    def part(self, p: int, q: int) -> PqForm:
        return self.parts.get((p, q), zero_form(self.grid, p, q))

    def sup_norm(self) -> float:
        return max((f.sup_norm() for f in self.parts.values()), default=0.0)


def form_sum(parts: list[PqForm]) -> FormSum:
    grid = parts[0].grid
    acc: dict[tuple[int, int], PqForm] = {}
    for f in parts:
        if f.grid != grid:
            raise GridMismatchError("forms live on different grids")
        key = (f.p, f.q)
        acc[key] = acc[key] + f if key in acc else f
    return FormSum(grid, acc)


# ---------------------------------------------------------------------------
# Dolbeault operators

def del_(alpha: PqForm) -> PqForm:
    """Holomorphic exterior derivative, (p,q) -> (p+1,q)."""
    grid, n = alpha.grid, alpha.grid.n
    out = zero_form(grid, alpha.p + 1, alpha.q)
    if alpha.p + 1 > n:
        return out
    comps = {key: arr.copy() for key, arr in out.components.items()}
    for (J, K), arr in alpha.components.items():
        f = make_field(grid, arr)
        for j in range(n):
            if j in J:
                continue
            merged, sign = merge_sign((j,), J)
            comps[(merged, K)] = comps[(merged, K)] + sign * partial_z(f, j).values
    return PqForm(grid, alpha.p + 1, alpha.q, comps)


def delbar(alpha: PqForm) -> PqForm:
    """Antiholomorphic exterior derivative, (p,q) -> (p,q+1)."""
    grid, n = alpha.grid, alpha.grid.n
    out = zero_form(grid, alpha.p, alpha.q + 1)
    if alpha.q + 1 > n:
        return out
    comps = {key: arr.copy() for key, arr in out.components.items()}
    front = (-1) ** alpha.p  # dzbar^k crosses the dz^J block
    for (J, K), arr in alpha.components.items():
        f = make_field(grid, arr)
        for k in range(n):
            if k in K:
                continue
            merged, sign = merge_sign((k,), K)
            comps[(J, merged)] = comps[(J, merged)] + front * sign * partial_zbar(f, k).values
    return PqForm(grid, alpha.p, alpha.q + 1, comps)


def exterior_d(alpha: PqForm) -> FormSum:
    """d = del + delbar, returned as the pair of graded pieces."""
    return form_sum([del_(alpha), delbar(alpha)])


def d_sum(alpha: FormSum) -> FormSum:
    return form_sum([piece for f in alpha.parts.values() for piece in (del_(f), delbar(f))])


def d_c(u: PeriodicScalarField) -> FormSum:
    """d^c u = i (delbar - del) u for a real 0-form u."""
    if not u.is_real:
        raise ValueError("d^c is defined for real functions")
    holo = del_(scalar_form(u)) * (-1j)
    anti = delbar(scalar_form(u)) * 1j
    return form_sum([holo, anti])


# ---------------------------------------------------------------------------
# wedge products and integration

def wedge(alpha: PqForm, beta: PqForm) -> PqForm:
    """Graded product with canonical-ordering sign bookkeeping."""
    if alpha.grid != beta.grid:
        raise GridMismatchError("forms live on different grids")
    grid, n = alpha.grid, alpha.grid.n
    p, q = alpha.p + beta.p, alpha.q + beta.q
    if p > n or q > n:
        raise ValueError(f"wedge overflows the top bidegree: ({p},{q}) with n={n}")
    out = zero_form(grid, p, q)
    comps = {key: arr.copy() for key, arr in out.components.items()}
    cross = (-1) ** (alpha.q * beta.p)  # dzbar^K1 moves past dz^J2
    for (J1, K1), a in alpha.components.items():
        for (J2, K2), b in beta.components.items():
            mj = merge_sign(J1, J2)
            mk = merge_sign(K1, K2)
            if mj is None or mk is None:
                continue
            (J, sj), (K, sk) = mj, mk
            comps[(J, K)] = comps[(J, K)] + (cross * sj * sk) * (a * b)
    return PqForm(grid, p, q, comps)


def wedge_sum(alpha: FormSum | PqForm, beta: FormSum | PqForm) -> FormSum:
    aparts = list(alpha.parts.values()) if isinstance(alpha, FormSum) else [alpha]
    bparts = list(beta.parts.values()) if isinstance(beta, FormSum) else [beta]
    pieces = []
    for a in aparts:
        for b in bparts:
            if a.p + b.p <= a.grid.n and a.q + b.q <= a.grid.n:
                pieces.append(wedge(a, b))
    if not pieces:
        return FormSum(aparts[0].grid, {})
    return form_sum(pieces)


def form_power(alpha: PqForm, k: int) -> PqForm:
    """alpha^k for a (1,1)-form; k = 0 yields the constant 1 (0,0)-form."""
    grid = alpha.grid
    out = PqForm(grid, 0, 0, {((), ()): np.ones(grid.shape, dtype=complex)})
    for _ in range(k):
        out = wedge(out, alpha)
    return out


def integrate_top(alpha: PqForm) -> complex:
    """Integrate an (n,n)-form over the torus via the real-measure reduction."""
    n = alpha.grid.n
    if (alpha.p, alpha.q) != (n, n):
        raise ValueError(f"integrate_top needs a ({n},{n})-form, got ({alpha.p},{alpha.q})")
    comp = alpha.component(tuple(range(n)), tuple(range(n)))
    # canonical dz^1..n ^ dzbar^1..n -> interleaved pairs -> real measure
    sigma = (-1) ** (n * (n - 1) // 2)
    factor = sigma * (-1j) ** n
    return complex(factor * np.mean(comp))


def kahler_form(g: HermitianMetricField) -> PqForm:
    """omega(g) = i * sum g_{j kbar} dz^j ^ dzbar^k."""
    comps = {
        ((j,), (k,)): 1j * g.mats[..., j, k]
        for j in range(g.grid.n)
        for k in range(g.grid.n)
    }
    return PqForm(g.grid, 1, 1, comps)


def real_11_deviation(alpha: PqForm) -> float:
    """Deviation from the real (1,1) convention alpha = i h with h Hermitian."""
    if (alpha.p, alpha.q) != (1, 1):
        raise ValueError("real (1,1) check needs a (1,1)-form")
    n = alpha.grid.n
    dev = 0.0
    for j in range(n):
        for k in range(n):
            h_jk = alpha.component((j,), (k,)) / 1j
            h_kj = alpha.component((k,), (j,)) / 1j
            dev = max(dev, float(np.max(np.abs(h_jk - np.conj(h_kj)))))
    return dev


def uniqueness_functional(
    phi1: PeriodicScalarField,
    phi2: PeriodicScalarField,
    g: HermitianMetricField,
) -> float:
    """Stokes-theorem energy of the difference of two admissible potentials.

    sum_{k=0}^{n-1} integral d(u) ^ d^c(u) ^ omega_1^k ^ omega_2^{n-k-1}
    with u = phi1 - phi2; nonnegative, zero iff u is constant.
    """
    n = g.grid.n
    g1 = metric_from_potential(g, phi1)
    g2 = metric_from_potential(g, phi2)
    for name, gi in (("phi1", g1), ("phi2", g2)):
        rep = positivity_check(gi)
        if not rep.is_positive:
            raise ValueError(f"potential {name} is inadmissible (min eig {rep.min_eig:.3e})")
    u = make_field(g.grid, phi1.values.real - phi2.values.real)
    du = exterior_d(scalar_form(u))
    dcu = d_c(u)
    energy = wedge_sum(du, dcu)  # the (1,1) part carries the integral
    w1 = kahler_form(g1)
    w2 = kahler_form(g2)
    total = 0.0 + 0.0j
    for k in range(n):
        weight = wedge(form_power(w1, k), form_power(w2, n - 1 - k))
        total += integrate_top(wedge(energy.part(1, 1), weight))
    if abs(total.imag) > 1e-10 * max(1.0, abs(total.real)):
        raise FloatingPointError(f"uniqueness functional came out non-real: {total}")
    return float(total.real)
