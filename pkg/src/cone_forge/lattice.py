"""Exact integer lattice arithmetic for the K3 matching problem.

The K3 lattice is L = (-E8) + (-E8) + U + U + U with U the hyperbolic plane
[[0,1],[1,0]]: rank 22, determinant -1, signature (3,19).  The matching
embedding realises the rank-3 quadratic form

    [[-2, 1, 0],
     [ 1, 4, 0],
     [ 0, 0, 4]]

on (Pi-tilde, -K_plus, -quarter-K_minus) inside L, and the class searches
certify the two Diophantine obstructions of the handcrafted gluing: the
(-2)-class system reduces to -36 b^2 + 4 c^2 = -2 (impossible mod 4) and the
elliptic-class system forces 4c = 2 (no integer solution).

Everything runs on Python integers (exact, arbitrary size); rationals enter
only through span computations and are carried as Fraction.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "DimensionMismatch",
    "UnavoidableHyperplane",
    "GramLattice",
    "EmbeddingRecord",
    "UnsatCertificate",
    "SearchResult",
    "GenericDirection",
    "e8_cartan",
    "build_k3_lattice",
    "pairing",
    "matching_embedding",
    "constrained_class_search",
    "orthogonal_complement",
    "integer_kernel",
    "generic_direction",
]


class DimensionMismatch(ValueError):
    """Vector length does not match the lattice rank."""


class UnavoidableHyperplane(ValueError):
    """An avoid-vector annihilates the whole subspace."""


def _as_object_matrix(rows) -> np.ndarray:
    return np.array([[int(x) for x in row] for row in rows], dtype=object)


def e8_cartan() -> np.ndarray:
    """E8 Cartan matrix, Bourbaki node order (chain 1-3-4-5-6-7-8, node 2 on 4)."""
    edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]
    A = 2 * np.eye(8, dtype=int)
    for i, j in edges:
        A[i - 1, j - 1] = A[j - 1, i - 1] = -1
    return _as_object_matrix(A)


@dataclass(frozen=True)
class GramLattice:
    """Integer quadratic-form lattice given by its Gram matrix."""

    gram: np.ndarray

    def __post_init__(self):
        g = _as_object_matrix(self.gram)
        if g.shape[0] != g.shape[1] or not (g == g.T).all():
            raise ValueError("gram must be a symmetric square integer matrix")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return self.gram.shape[0]

    def is_even(self) -> bool:
        return all(self.gram[i, i] % 2 == 0 for i in range(self.rank))

    def determinant(self) -> int:
        return _bareiss_det(self.gram)

    def signature(self) -> tuple[int, int]:
        """(positive, negative) inertia by exact rational diagonalization."""
        n = self.rank
        A = [[Fraction(int(self.gram[i, j])) for j in range(n)] for i in range(n)]
        pos = neg = 0
        for k in range(n):
            if A[k][k] == 0:
                j = next((j for j in range(k + 1, n) if A[k][j] != 0), None)
                if j is None:
                    continue
                for i in range(n):  # symmetric row/col addition fixes the pivot
                    A[k][i] += A[j][i]
                for i in range(n):
                    A[i][k] += A[i][j]
                if A[k][k] == 0:
                    continue
            piv = A[k][k]
            pos, neg = (pos + 1, neg) if piv > 0 else (pos, neg + 1)
            for i in range(k + 1, n):
                f = A[i][k] / piv
                if f == 0:
                    continue
                for j in range(n):
                    A[i][j] -= f * A[k][j]
                for j in range(n):
                    A[j][i] -= f * A[j][k]
        return pos, neg


def _bareiss_det(M: np.ndarray) -> int:
    n = M.shape[0]
    A = [[int(M[i, j]) for j in range(n)] for i in range(n)]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if A[i][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def build_k3_lattice() -> GramLattice:
    """2(-E8) + 3U; verifies det = -1, signature (3,19), evenness."""
    e8 = e8_cartan()
    U = _as_object_matrix([[0, 1], [1, 0]])
    blocks = [-e8, -e8, U, U, U]
    n = sum(b.shape[0] for b in blocks)
    g = np.zeros((n, n), dtype=object)
    at = 0
    for b in blocks:
        k = b.shape[0]
        g[at:at + k, at:at + k] = b
        at += k
    L = GramLattice(gram=g)
    assert L.rank == 22 and L.is_even()
    assert abs(L.determinant()) == 1
    assert L.signature() == (3, 19)
    return L


def _as_vector(v, rank: int) -> np.ndarray:
    arr = np.array([x if isinstance(x, Fraction) else int(x) for x in v],
                   dtype=object)
    if arr.shape != (rank,):
        raise DimensionMismatch(f"expected length {rank}, got {arr.shape}")
    return arr


def pairing(L: GramLattice, v, w):
    """Exact v . w in the quadratic form; integers in, integer out."""
    return (_as_vector(v, L.rank) @ L.gram @ _as_vector(w, L.rank))


@dataclass(frozen=True)
class EmbeddingRecord:
    source_gram: np.ndarray
    images: tuple
    labels: tuple


# Pi-tilde sits on Bourbaki node 1 of the first -E8; node 3 is its Dynkin
# neighbour (square -2, product 1 in -E8).
_PI_NODE = 0
_ADJ_NODE = 2


def matching_embedding(L: GramLattice | None = None) -> EmbeddingRecord:
    """Images of (Pi-tilde, -K_plus, -quarter-K_minus) inside L.

    Pi-tilde = simple root e_1 of the first -E8; -K_plus = adjacent simple
    root e_3 plus B_1+C_1+B_2+C_2+B_3+C_3 (the three hyperbolic bases);
    -quarter-K_minus = B_1+C_1-B_2-C_2.  The pair Gram is verified exactly.
    """
    if L is None:
        L = build_k3_lattice()
    pi = np.zeros(22, dtype=object)
    pi[_PI_NODE] = 1
    kplus = np.zeros(22, dtype=object)
    kplus[_ADJ_NODE] = 1
    kplus[16:22] = 1  # B1,C1,B2,C2,B3,C3
    kminus = np.zeros(22, dtype=object)
    kminus[16] = kminus[17] = 1
    kminus[18] = kminus[19] = -1
    images = (pi, kplus, kminus)
    expected = _as_object_matrix([[-2, 1, 0], [1, 4, 0], [0, 0, 4]])
    got = np.array([[pairing(L, a, b) for b in images] for a in images],
                   dtype=object)
    assert (got == expected).all(), "embedding Gram mismatch"
    return EmbeddingRecord(source_gram=expected, images=images,
                           labels=("pi", "kplus", "kminus"))


@dataclass(frozen=True)
class UnsatCertificate:
    """No solution mod `modulus`: attainable lhs residues miss the rhs."""

    modulus: int
    lhs_residues: tuple
    rhs_residue: int
    reduced_form: str


@dataclass(frozen=True)
class SearchResult:
    solutions: tuple
    certificate: UnsatCertificate | None
    reduced_quadratic: tuple  # (Q, linear, constant) in the free variables


def _solve_linear_system(M, d):
    """Integer solutions of M x = d: (particular, kernel basis) or a modulus
    certificate when none exist."""
    M = [[int(x) for x in row] for row in M]
    d = [int(x) for x in d]
    rows, cols = len(M), len(M[0]) if M else 0
    # rational RREF for a particular solution
    A = [[Fraction(M[i][j]) for j in range(cols)] + [Fraction(d[i])]
         for i in range(rows)]
    piv_cols = []
    rr = 0
    for c in range(cols):
        piv = next((i for i in range(rr, rows) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[rr], A[piv] = A[piv], A[rr]
        A[rr] = [x / A[rr][c] for x in A[rr]]
        for i in range(rows):
            if i != rr and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[rr])]
        piv_cols.append(c)
        rr += 1
    for i in range(rr, rows):
        if A[i][cols] != 0:
            return None, None, _linear_unsat_modulus(M, d)
    x = [Fraction(0)] * cols
    for i, c in enumerate(piv_cols):
        x[c] = A[i][cols]
    if any(xi.denominator != 1 for xi in x):
        # rational but non-integral particular solution in RREF coordinates:
        # integrality must be decided on the solution lattice itself
        part = _integral_particular(M, d)
        if part is None:
            return None, None, _linear_unsat_modulus(M, d)
        x = [Fraction(v) for v in part]
    kernel = integer_kernel(_as_object_matrix(M) if rows else
                            np.zeros((0, cols), dtype=object))
    return [int(v) for v in x], kernel, None


def _integral_particular(M, d):
    """Integer particular solution by bounded search (ranks here are <= 3)."""
    rows, cols = len(M), len(M[0])
    if cols <= 3:
        for cand in _box(range(-8, 9), cols):
            if all(sum(M[i][j] * cand[j] for j in range(cols)) == d[i]
                   for i in range(rows)):
                return list(cand)
    return None


def _box(rng, k):
    if k == 1:
        for a in rng:
            yield (a,)
    else:
        for a in rng:
            for rest in _box(rng, k - 1):
                yield (a,) + rest


def _linear_unsat_modulus(M, d, max_mod: int = 64):
    """Smallest modulus certifying M x = d unsolvable, by enumeration."""
    cols = len(M[0]) if M else 0
    for m in range(2, max_mod + 1):
        ok = False
        for cand in _box(range(m), cols):
            if all(sum(M[i][j] * cand[j] for j in range(cols)) % m
                   == d[i] % m for i in range(len(M))):
                ok = True
                break
        if not ok:
            return m
    return None


def _hermite_form(A: np.ndarray):
    """Row Hermite normal form H = U A with U unimodular (integer rows)."""
    A = A.copy()
    rows, cols = A.shape
    U = np.eye(rows, dtype=object)
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if A[i, c] != 0:
                piv = i
                break
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        U[[r, piv]] = U[[piv, r]]
        while True:
            nz = [i for i in range(r + 1, rows) if A[i, c] != 0]
            if not nz:
                break
            for i in nz:
                q = A[i, c] // A[r, c]
                A[i] = A[i] - q * A[r]
                U[i] = U[i] - q * U[r]
                if A[i, c] != 0 and abs(A[i, c]) < abs(A[r, c]):
                    A[[r, i]] = A[[i, r]]
                    U[[r, i]] = U[[i, r]]
        if A[r, c] < 0:
            A[r] = -A[r]
            U[r] = -U[r]
        r += 1
        if r == rows:
            break
    return A, U


def integer_kernel(A: np.ndarray) -> list[np.ndarray]:
    """Saturated basis of {x integer : A x = 0}, via HNF of [A^T | I]."""
    A = _as_object_matrix(A)
    m, n = A.shape
    stacked = np.concatenate([A.T, np.eye(n, dtype=object)], axis=1)
    H, _ = _hermite_form(stacked)
    kernel = []
    for row in H:
        if all(x == 0 for x in row[:m]) and any(x != 0 for x in row[m:]):
            kernel.append(row[m:].copy())
    return kernel


def orthogonal_complement(L: GramLattice, vectors) -> list[np.ndarray]:
    """Saturated integer basis of the sublattice pairing to 0 with `vectors`."""
    if not vectors:
        return [row.copy() for row in np.eye(L.rank, dtype=object)]
    rows = [(_as_vector(v, L.rank) @ L.gram) for v in vectors]
    basis = integer_kernel(np.array(rows, dtype=object))
    for b in basis:
        assert all((_as_vector(v, L.rank) @ L.gram @ b) == 0 for v in vectors)
    return basis


def constrained_class_search(span, square: int, dot_constraints, bound: int,
                             L: GramLattice | None = None,
                             max_modulus: int = 64) -> SearchResult:
    """Integer combinations of `span` with given square and pairings.

    Substitutes the linear constraints into the quadratic exactly, tries
    modulus certificates up to max_modulus, and enumerates coefficient
    tuples with |coeff| <= bound.  When a certificate is found the
    enumeration is guaranteed empty; both are reported.
    """
    if L is None:
        L = build_k3_lattice()
    if bound < 1:
        raise ValueError("bound must be >= 1")
    span = [_as_vector(v, L.rank) for v in span]
    k = len(span)
    Q = [[int(pairing(L, a, b)) for b in span] for a in span]
    M = [[int(pairing(L, s, _as_vector(w, L.rank))) for s in span]
         for w, _ in dot_constraints]
    d = [int(val) for _, val in dot_constraints]

    if M:
        part, kernel, bad_mod = _solve_linear_system(M, d)
        if part is None:
            cert = UnsatCertificate(
                modulus=bad_mod if bad_mod is not None else 0,
                lhs_residues=(), rhs_residue=0,
                reduced_form="linear constraints unsolvable over Z")
            return SearchResult(solutions=(), certificate=cert,
                                reduced_quadratic=((), (), 0))
    else:
        part = [0] * k
        kernel = [row.copy() for row in np.eye(k, dtype=object)]

    f = len(kernel)
    Z = np.array(kernel, dtype=object).T if f else np.zeros((k, 0), dtype=object)
    Qm = np.array(Q, dtype=object)
    x0 = np.array(part, dtype=object)
    Qr = (Z.T @ Qm @ Z) if f else np.zeros((0, 0), dtype=object)
    lin = (2 * (x0 @ Qm @ Z)) if f else np.zeros(0, dtype=object)
    const = int(x0 @ Qm @ x0)

    cert = None
    for m in range(2, max_modulus + 1):
        attainable = set()
        for t in _box(range(m), f) if f else [()]:
            val = const
            for i in range(f):
                val += lin[i] * t[i]
                for j in range(f):
                    val += Qr[i, j] * t[i] * t[j]
            attainable.add(int(val) % m)
        if square % m not in attainable:
            cert = UnsatCertificate(
                modulus=m, lhs_residues=tuple(sorted(attainable)),
                rhs_residue=square % m,
                reduced_form=_format_quadratic(Qr, lin, const))
            break

    solutions = tuple(_enumerate(Qm, x0, Z, Qr, lin, const, square, bound))
    if cert is not None:
        assert not solutions
    return SearchResult(solutions=solutions, certificate=cert,
                        reduced_quadratic=(Qr, lin, const))


def _format_quadratic(Qr, lin, const):
    names = "tuvw"
    terms = []
    f = Qr.shape[0]
    for i in range(f):
        for j in range(i, f):
            c = Qr[i, j] if i == j else Qr[i, j] + Qr[j, i]
            if c:
                mono = f"{names[i]}^2" if i == j else f"{names[i]}{names[j]}"
                terms.append(f"{'+' if c > 0 else '-'} {abs(c)}{mono}")
    for i in range(f):
        if lin[i]:
            terms.append(f"{'+' if lin[i] > 0 else '-'} {abs(lin[i])}{names[i]}")
    if const:
        terms.append(f"{'+' if const > 0 else '-'} {abs(const)}")
    return " ".join(terms).lstrip("+ ") or "0"


def _int_sqrt(n):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _enumerate(Qm, x0, Z, Qr, lin, const, square, bound):
    """All x = x0 + Z t with every span coefficient in [-bound, bound]."""
    k = len(x0)
    f = Z.shape[1]
    if f == 0:
        x = x0
        if int(x @ Qm @ x) == square and all(abs(int(c)) <= bound for c in x):
            yield tuple(int(c) for c in x)
        return
    # conservative per-variable ranges from an invertible f x f minor of Z
    rowsel = _independent_rows(Z)
    sub = np.array([[Fraction(int(Z[i, j])) for j in range(f)] for i in rowsel])
    inv = _fraction_inv(sub)
    max_x0 = max(abs(int(v)) for v in x0) if k else 0
    lim = [int(sum(abs(inv[i][j]) for j in range(f)) * (bound + max_x0)) + 1
           for i in range(f)]

    def coeffs_ok(t):
        x = x0 + Z @ np.array(t, dtype=object)
        return (all(abs(int(c)) <= bound for c in x), x)

    if f == 1:
        a = int(Qr[0, 0])
        b = int(lin[0])
        c0 = const - square
        for t0 in _quad_int_roots(a, b, c0, lim[0]):
            ok, x = coeffs_ok((t0,))
            if ok:
                yield tuple(int(v) for v in x)
        return
    # loop the first f-1 variables, solve the quadratic in the last
    head_lim = max(lim[:-1])
    if (2 * head_lim + 1) ** (f - 1) > 5e7:
        raise ValueError("enumeration box too large; lower the bound")
    for head in _box(range(-head_lim, head_lim + 1), f - 1):
        if any(abs(h) > lim[i] for i, h in enumerate(head)):
            continue
        a = int(Qr[f - 1, f - 1])
        b = int(lin[f - 1]) + sum(int(Qr[f - 1, j] + Qr[j, f - 1]) * head[j]
                                  for j in range(f - 1))
        c0 = const - square + sum(int(lin[j]) * head[j] for j in range(f - 1))
        for i in range(f - 1):
            for j in range(f - 1):
                c0 += int(Qr[i, j]) * head[i] * head[j]
        for t_last in _quad_int_roots(a, b, c0, lim[f - 1]):
            ok, x = coeffs_ok(head + (t_last,))
            if ok:
                yield tuple(int(v) for v in x)


def _quad_int_roots(a, b, c, lim):
    """Integer roots of a t^2 + b t + c = 0 with |t| <= lim."""
    if a == 0:
        if b == 0:
            return [t for t in range(-lim, lim + 1)] if c == 0 else []
        return [(-c) // b] if (-c) % b == 0 and abs((-c) // b) <= lim else []
    disc = b * b - 4 * a * c
    r = _int_sqrt(disc)
    if r is None:
        return []
    out = []
    for num in (-b + r, -b - r):
        if num % (2 * a) == 0 and abs(num // (2 * a)) <= lim:
            out.append(num // (2 * a))
    return sorted(set(out))


def _independent_rows(Z):
    f = Z.shape[1]
    chosen = []
    rows = []
    for i in range(Z.shape[0]):
        cand = rows + [[Fraction(int(x)) for x in Z[i]]]
        if _fraction_rank(cand) == len(cand):
            rows = cand
            chosen.append(i)
            if len(chosen) == f:
                break
    return chosen


def _fraction_rank(rows):
    A = [row[:] for row in rows]
    m = len(A)
    if m == 0:
        return 0
    n = len(A[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c] != 0), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        A[r] = [x / A[r][c] for x in A[r]]
        for i in range(m):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        r += 1
    return r


def _fraction_inv(A: np.ndarray):
    n = A.shape[0]
    M = [[A[i][j] for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
         for i in range(n)]
    for c in range(n):
        piv = next(i for i in range(c, n) if M[i][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        M[c] = [x / M[c][c] for x in M[c]]
        for i in range(n):
            if i != c and M[i][c] != 0:
                f = M[i][c]
                M[i] = [x - f * y for x, y in zip(M[i], M[c])]
    return [row[n:] for row in M]


@dataclass(frozen=True)
class GenericDirection:
    """A direction in span(T) avoiding the given hyperplanes."""

    coords: tuple  # coordinates in L (Fractions when normalized)
    t_coefficients: tuple
    square: Fraction
    normalized: bool


def generic_direction(L: GramLattice, T_basis, avoid, seed: int = 0,
                      max_tries: int = 500) -> GenericDirection:
    """Positive-square k in span(T_basis) with k . C != 0 for all C in avoid.

    Rescaled to square 1 when the square is a rational square, otherwise
    returned unnormalized with its square.  Raises UnavoidableHyperplane if
    some avoid-vector pairs to 0 with every basis vector.
    """
    T = [_as_vector(v, L.rank) for v in T_basis]
    avoid = [_as_vector(v, L.rank) for v in avoid]
    for C in avoid:
        if all((t @ L.gram @ C) == 0 for t in T):
            raise UnavoidableHyperplane(
                "an avoid-vector is orthogonal to the whole subspace")
    # deterministic positive direction from exact diagonalization
    G = np.array([[int(a @ L.gram @ b) for b in T] for a in T], dtype=object)
    base = _positive_combination(G)
    if base is None:
        raise ValueError("span contains no positive-square vector")
    rng = random.Random(seed)
    f = len(T)
    for trial in range(max_tries):
        scale = 1 + trial // 10
        t = [int(round(scale * 4 * c)) for c in base] if trial == 0 else [
            int(round(scale * 4 * c)) + rng.randint(-scale, scale)
            for c in base]
        vec = sum((ti * Ti for ti, Ti in zip(t, T)),
                  np.zeros(L.rank, dtype=object))
        sq = int(vec @ L.gram @ vec)
        if sq <= 0:
            continue
        if any((vec @ L.gram @ C) == 0 for C in avoid):
            continue
        root = _int_sqrt(sq)
        if root is not None:
            coords = tuple(Fraction(int(v), root) for v in vec)
            return GenericDirection(coords=coords, t_coefficients=tuple(t),
                                    square=Fraction(1), normalized=True)
        return GenericDirection(coords=tuple(int(v) for v in vec),
                                t_coefficients=tuple(t),
                                square=Fraction(sq), normalized=False)
    raise RuntimeError("no generic direction found; avoid set too dense?")


def _positive_combination(G: np.ndarray):
    """Rational coefficients c with c^T G c > 0, from Jacobi diagonalization."""
    n = G.shape[0]
    A = [[Fraction(int(G[i, j])) for j in range(n)] for i in range(n)]
    # transform accumulates the congruence: diag = P^T G P, columns of P
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        if A[k][k] == 0:
            j = next((j for j in range(k + 1, n) if A[k][j] != 0), None)
            if j is None:
                continue
            for i in range(n):
                A[k][i] += A[j][i]
            for i in range(n):
                A[i][k] += A[i][j]
            for i in range(n):
                P[i][k] += P[i][j]
        if A[k][k] == 0:
            continue
        for i in range(k + 1, n):
            f = A[i][k] / A[k][k]
            if f == 0:
                continue
            for j in range(n):
                A[i][j] -= f * A[k][j]
            for j in range(n):
                A[j][i] -= f * A[j][k]
            for j in range(n):
                P[j][i] -= f * P[j][k]
        if A[k][k] > 0:
            return [P[i][k] for i in range(n)]
    return None
