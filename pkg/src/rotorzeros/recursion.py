"""Transfer recursion for the chain partition function.

The two-boundary kernel Psi_N(zeta1, zeta2, zeta12) is built inductively:
Psi_2 couples two single-spin transforms through exp(J * Delta_2D), and each
further spin enters through exp(J * Delta_3D) followed by identifying the
second and third vector slots.  The full-chain function of the squared
field is then the diagonal phi_N(zeta) = Psi_N(zeta, zeta, zeta), so that
Z_N(z) = phi_N(z^2).

Two engines compute the same recursion:

* ``operator`` applies the nilpotent differential-operator exponentials
  literally on sparse polynomials (exact, any field; cost grows quickly
  with the truncation degree because of the transient six-variable ring);
* ``fast`` evaluates the identical step through a Taylor re-expansion of
  Psi_{N-1} around the diagonal, which needs only univariate transforms.
  Both agree exactly whenever no truncation pressure exists, and agree on
  every stabilized coefficient otherwise (see tests).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .measures import LaplaceSeries, RadialMeasure, laplace_transform
from .polys import (
    FLOAT,
    GRAM_VARS,
    PAIR_VARS,
    RATIONAL,
    GramOperator,
    OperatorTerm,
    TruncatedPoly,
    coerce_scalar,
    diagonal_series,
    exp_operator,
    merge_2_3,
)

# Exponent tuples over GRAM_VARS for operator multipliers.
_E = {name: tuple(1 if v == name else 0 for v in GRAM_VARS) for name in GRAM_VARS}
_E3 = {name: tuple(1 if v == name else 0 for v in PAIR_VARS) for name in PAIR_VARS}


def delta_operator(arity, D) -> GramOperator:
    """The Gram-variable representative of D_z1 . D_z2.

    arity 2 acts on the pair ring (g11, g22, g12); arity 3 on the full
    six-coordinate ring with the third vector as spectator.  Every term
    lowers total degree by one, so the operator exponential is nilpotent
    on polynomials.
    """
    if D < 1 or int(D) != D:
        raise ValueError(f"dimension must be a positive integer, got {D}")
    D = int(D)
    if arity == 2:
        zero = (0, 0, 0)
        terms = (
            OperatorTerm(D, zero, ("g12",)),
            OperatorTerm(2, _E3["g11"], ("g11", "g12")),
            OperatorTerm(2, _E3["g22"], ("g22", "g12")),
            OperatorTerm(4, _E3["g12"], ("g11", "g22")),
            OperatorTerm(1, _E3["g12"], ("g12", "g12")),
        )
        return GramOperator(PAIR_VARS, terms, D)
    if arity == 3:
        zero = (0,) * 6
        terms = (
            OperatorTerm(D, zero, ("g12",)),
            OperatorTerm(2, _E["g11"], ("g11", "g12")),
            OperatorTerm(2, _E["g22"], ("g22", "g12")),
            OperatorTerm(1, _E["g33"], ("g13", "g23")),
            OperatorTerm(4, _E["g12"], ("g11", "g22")),
            OperatorTerm(1, _E["g12"], ("g12", "g12")),
            OperatorTerm(2, _E["g13"], ("g11", "g23")),
            OperatorTerm(1, _E["g13"], ("g12", "g13")),
            OperatorTerm(2, _E["g23"], ("g22", "g13")),
            OperatorTerm(1, _E["g23"], ("g12", "g23")),
        )
        return GramOperator(GRAM_VARS, terms, D)
    raise ValueError(f"arity must be 2 or 3, got {arity}")


def _series_poly(v: LaplaceSeries, var, variables):
    return TruncatedPoly.from_univariate(
        v.coefficients, var, variables, v.truncation_degree, v.field
    )


def psi_two(v1: LaplaceSeries, v2: LaplaceSeries, J, D) -> TruncatedPoly:
    """Psi_2 = exp(J * Delta_2D) v1(g11) v2(g22), in the ring (g11, g22, g12).

    Exact given the truncated inputs.  In rational mode the pi^(D/2) mass
    factors of v1 and v2 are carried outside the polynomial (see
    LaplaceSeries.pi_power).
    """
    if v1.dimension != v2.dimension:
        raise ValueError("transforms have different dimensions")
    if v1.truncation_degree != v2.truncation_degree or v1.field != v2.field:
        raise ValueError("transforms must share truncation degree and field")
    p = _series_poly(v1, "g11", PAIR_VARS) * _series_poly(v2, "g22", PAIR_VARS)
    return exp_operator(J, delta_operator(2, D), p)


def psi_step(v: LaplaceSeries, psi_prev: TruncatedPoly, J, D) -> TruncatedPoly:
    """One chain extension: absorb a new boundary spin into Psi_{N-1}.

    Relabels psi_prev into the slots (g22, g33, g23), multiplies by the new
    spin's transform in g11, applies exp(J * Delta_3D) in the six-variable
    ring, and identifies slots 2 and 3.
    """
    if psi_prev.variables != PAIR_VARS:
        raise ValueError("psi_prev must live in the pair ring (g11, g22, g12)")
    if psi_prev.max_degree != v.truncation_degree or psi_prev.field != v.field:
        raise ValueError("transform and kernel must share degree cap and field")
    shifted = psi_prev.relabel({"g11": "g22", "g22": "g33", "g12": "g23"})
    p = _series_poly(v, "g11", GRAM_VARS) * shifted.embed(GRAM_VARS)
    q = exp_operator(J, delta_operator(3, D), p)
    return merge_2_3(q)


# ---------------------------------------------------------------------------
# Fast engine: the same step through diagonal Taylor data
# ---------------------------------------------------------------------------
#
# Integrating the new spin sigma exactly gives
#
#   Psi_N(z1^2, z2^2, z1.z2) = integral chi(d sigma) e^{z1.sigma}
#       * Psi_{N-1}(zeta2 + 2Jt + J^2 s,  zeta2,  zeta2 + Jt),
#
# with t = z2.sigma and s = sigma^2.  Expanding Psi_{N-1} around the
# diagonal (zeta2, zeta2, zeta2) and using
#
#   integral chi(d sigma) e^{z1.sigma} t^m s^p = (z2 . grad_z1)^m V_p(zeta1),
#   V_p = (2D d/dzeta + 4 zeta d^2/dzeta^2)^p v,
#   (z2 . grad_z1)^m V = sum_a m! 2^(m-2a)/(a!(m-2a)!)
#                              * zeta2^a zeta12^(m-2a) V^((m-a)),
#
# turns one chain extension into dense univariate algebra.  All weights are
# positive, so for nonnegative profiles no cancellation occurs.


def _falling(n, k):
    return math.perm(n, k) if 0 <= k <= n else 0


def _advance_float(v_coeffs, P, J, D, M):
    """One fast-engine step on dense float tensors P[a1, a2, a12]."""
    n1 = M + 1
    idx = np.arange(n1)
    # Regrade P by total degree: R[alpha, gamma, d] = P[alpha, d-alpha-gamma, gamma]
    A_, G_, D_ = np.meshgrid(idx, idx, idx, indexing="ij", sparse=False)
    B_ = D_ - A_ - G_
    valid = (B_ >= 0) & (B_ <= M)
    R = np.zeros((n1, n1, n1))
    R[valid] = P[A_[valid], B_[valid], G_[valid]]
    # Falling-factorial transforms along the slot-1 and slot-3 axes.
    F = np.zeros((n1, n1))
    for i in range(n1):
        for a in range(i, n1):
            F[i, a] = _falling(a, i)
    S = np.einsum("ia,agd->igd", F, R, optimize=True)
    S = np.einsum("kg,igd->ikd", F, S, optimize=True)
    # Diagonal derivative data A[i, k, n] = S[i, k, n+i+k].
    I_, K_, N_ = A_, G_, D_
    DSUM = N_ + I_ + K_
    ok = DSUM <= M
    Adata = np.zeros((n1, n1, n1))
    Adata[ok] = S[I_[ok], K_[ok], DSUM[ok]]
    # B[p, m, n] = (1/p!) sum_j 2^j / (j! (m-j)!) A[p+j, m-j, n]
    Bdata = np.zeros((n1, n1, n1))
    fact = np.array([math.factorial(k) for k in range(n1)], dtype=float)
    for j in range(n1):
        w = np.zeros(n1)
        w[j:] = (2.0**j) / (math.factorial(j) * fact[: n1 - j])
        Bdata[: n1 - j, j:, :] += w[None, j:, None] * Adata[j:, : n1 - j, :]
    Bdata /= fact[:, None, None]
    # Laplacian lifts V_p of the new spin's transform.
    V = np.zeros((n1, n1))
    V[0, :] = v_coeffs
    for p in range(1, n1):
        n = np.arange(n1 - 1)
        V[p, : n1 - 1] = 2.0 * (n + 1) * (D + 2.0 * n) * V[p - 1, 1:]
    out = np.zeros((n1, n1, n1))
    tri_cache = {}
    for p in range(n1):
        for m in range(n1 - p):
            Bv = Bdata[p, m]
            if not Bv.any():
                continue
            for a in range(m // 2 + 1):
                q = m - a
                w = (
                    math.factorial(m)
                    * 2.0 ** (m - 2 * a)
                    / (math.factorial(a) * math.factorial(m - 2 * a))
                    * float(J) ** (m + 2 * p)
                )
                L = M - (m - a)
                if L < 0 or w == 0.0:
                    continue
                nmax = L + 1
                Vq = _falling_weights(n1, q) * _shift(V[p], q, n1)
                block = np.outer(Vq[:nmax], Bv[:nmax])
                tri = tri_cache.get(nmax)
                if tri is None:
                    tri = np.add.outer(np.arange(nmax), np.arange(nmax)) <= L
                    tri_cache[nmax] = tri
                out[:nmax, a : a + nmax, m - 2 * a] += w * np.where(tri, block, 0.0)
    return out


def _falling_weights(n1, q):
    n = np.arange(n1)
    if q == 0:
        return np.ones(n1)
    return np.array([_falling(k + q, q) for k in n], dtype=float)


def _shift(vec, q, n1):
    out = np.zeros(n1)
    if q < n1:
        out[: n1 - q] = vec[q:]
    return out


def _advance_exact(v_coeffs, P, J, D, M):
    """Rational-field version of _advance_float on sparse dicts."""
    J = coerce_scalar(J, RATIONAL)
    if J == 0:
        # the step collapses to v(zeta1) times the diagonal of the kernel
        diag = {}
        for (al, be, ga), c in P.items():
            n = al + be + ga
            diag[n] = diag.get(n, Fraction(0)) + c
        out = {}
        for n1, cv in enumerate(v_coeffs):
            if cv == 0 or n1 > M:
                continue
            for n2, c in diag.items():
                if c != 0 and n1 + n2 <= M:
                    key = (n1, n2, 0)
                    out[key] = out.get(key, Fraction(0)) + cv * c
        return {k: v for k, v in out.items() if v != 0}
    # Diagonal derivative data A[(i,k)][n].
    Adata = {}
    for (al, be, ga), c in P.items():
        for i in range(al + 1):
            fi = _falling(al, i)
            for k in range(ga + 1):
                n = al + be + ga - i - k
                key = (i, k)
                arr = Adata.setdefault(key, {})
                arr[n] = arr.get(n, Fraction(0)) + c * fi * _falling(ga, k)
    Bdata = {}
    for (i, k), arr in Adata.items():
        # (i, k) = (p + j, m - j) for every split of i
        for j in range(i + 1):
            p, m = i - j, k + j
            w = Fraction(2**j, math.factorial(j) * math.factorial(k) * math.factorial(p))
            tgt = Bdata.setdefault((p, m), {})
            for n, c in arr.items():
                tgt[n] = tgt.get(n, Fraction(0)) + w * c
    V = [list(v_coeffs)]
    for p in range(1, M + 1):
        prev = V[-1]
        V.append(
            [2 * (n + 1) * (D + 2 * n) * prev[n + 1] for n in range(len(prev) - 1)]
        )
    out = {}
    for (p, m), arr in Bdata.items():
        if p > M or m > M:
            continue
        for a in range(m // 2 + 1):
            q = m - a
            w = (
                Fraction(math.factorial(m) * 2 ** (m - 2 * a),
                         math.factorial(a) * math.factorial(m - 2 * a))
                * J ** (m + 2 * p)
            )
            L = M - (m - a)
            Vp = V[p] if p < len(V) else []
            for n1v in range(min(L + 1, max(len(Vp) - q, 0))):
                vq = Vp[n1v + q] * _falling(n1v + q, q)
                if vq == 0:
                    continue
                for n2, c in arr.items():
                    if n1v + n2 > L:
                        continue
                    key = (n1v, n2 + a, m - 2 * a)
                    val = out.get(key, Fraction(0)) + w * vq * c
                    if val == 0:
                        out.pop(key, None)
                    else:
                        out[key] = val
    return out


# ---------------------------------------------------------------------------
# Partition series
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartitionSeries:
    """phi_N as a univariate truncated series with provenance metadata.

    Z_N(z) = phi(z^2); for nonnegative radial profiles every coefficient
    is a positive moment integral.
    """

    coefficients: tuple
    chain_length: int
    dimension: int
    coupling: float
    measure_label: str
    truncation_degree: int
    field: str = FLOAT
    pi_power: Fraction = Fraction(0)

    def float_coefficients(self):
        scale = math.pi ** float(self.pi_power)
        return np.array([float(c) * scale for c in self.coefficients])

    def evaluate(self, zeta):
        total = 0.0 + 0.0j
        for c in reversed(self.float_coefficients()):
            total = total * zeta + c
        return total

    def to_csv(self):
        lines = ["n,a_n"]
        for n, c in enumerate(self.float_coefficients()):
            lines.append(f"{n},{float(c)!r}")
        return "\n".join(lines) + "\n"

    def metadata(self, stable_through=None):
        data = {
            "N": self.chain_length,
            "D": self.dimension,
            "J": float(self.coupling),
            "measure": self.measure_label,
            "M": self.truncation_degree,
        }
        if stable_through is not None:
            data["stable_through"] = stable_through
        return data


def _diag_from_tensor(P, M):
    n1 = M + 1
    deg = np.add.outer(np.add.outer(np.arange(n1), np.arange(n1)), np.arange(n1))
    return np.bincount(deg.ravel(), weights=P.ravel(), minlength=n1)[: n1]


def _poly_to_tensor(p: TruncatedPoly, M):
    P = np.zeros((M + 1, M + 1, M + 1))
    for (a, b, c), v in p.terms.items():
        P[a, b, c] = float(v)
    return P


def phi_from_transform(v: LaplaceSeries, N, J, D, engine="fast") -> PartitionSeries:
    """Diagonal partition series built from an explicit transform series.

    Useful for surrogate kernels; ``phi`` wraps this for real measures.
    """
    if N < 1 or int(N) != N:
        raise ValueError(f"chain length must be a positive integer, got {N}")
    N = int(N)
    M = v.truncation_degree
    if N == 1:
        coeffs = tuple(v.coefficients)
    elif engine == "fast":
        coeffs = _phi_fast(v, N, J, D)[N]
    elif engine == "operator":
        coeffs = _phi_operator(v, N, J, D)[N]
    else:
        raise ValueError(f"unknown engine {engine!r}")
    coeffs = tuple(coeffs) + tuple(
        coerce_scalar(0, v.field) for _ in range(M + 1 - len(coeffs))
    )
    return PartitionSeries(
        coeffs[: M + 1], N, int(D), J, v.measure_label, M, v.field, v.pi_power * N
    )


def _phi_fast(v: LaplaceSeries, N, J, D):
    M = v.truncation_degree
    diags = {1: list(v.coefficients)}
    if v.field == RATIONAL:
        P = {}
        for n, c in enumerate(v.coefficients):
            if c != 0:
                P[(n, 0, 0)] = c
        for step in range(2, N + 1):
            P = _advance_exact(v.coefficients, P, J, D, M)
            diag = [Fraction(0)] * (M + 1)
            for (a, b, c), val in P.items():
                diag[a + b + c] += val
            diags[step] = diag
        return diags
    v_arr = np.array([float(c) for c in v.coefficients])
    P = np.zeros((M + 1, M + 1, M + 1))
    P[:, 0, 0] = v_arr
    for step in range(2, N + 1):
        P = _advance_float(v_arr, P, float(J), int(D), M)
        diags[step] = list(_diag_from_tensor(P, M))
    return diags


def _phi_operator(v: LaplaceSeries, N, J, D):
    diags = {1: list(v.coefficients)}
    psi = None
    for step in range(2, N + 1):
        psi = psi_two(v, v, J, D) if step == 2 else psi_step(v, psi, J, D)
        diag = diagonal_series(psi)
        diag = diag + [coerce_scalar(0, v.field)] * (v.truncation_degree + 1 - len(diag))
        diags[step] = diag
    return diags


def psi_kernel(v: LaplaceSeries, N, J, D, engine="fast") -> TruncatedPoly:
    """The two-boundary kernel Psi_N itself, as a pair-ring polynomial.

    phi is its diagonal; the full kernel is useful for slot-sensitive
    checks and for seeding longer chains.
    """
    if N < 2 or int(N) != N:
        raise ValueError("the two-boundary kernel needs at least two spins")
    N = int(N)
    M = v.truncation_degree
    if engine == "operator":
        psi = psi_two(v, v, J, D)
        for _ in range(3, N + 1):
            psi = psi_step(v, psi, J, D)
        return psi
    if engine != "fast":
        raise ValueError(f"unknown engine {engine!r}")
    if v.field == RATIONAL:
        P = {(n, 0, 0): c for n, c in enumerate(v.coefficients) if c != 0}
        for _ in range(2, N + 1):
            P = _advance_exact(v.coefficients, P, J, D, M)
        return TruncatedPoly(PAIR_VARS, dict(P), M, RATIONAL)
    v_arr = np.array([float(c) for c in v.coefficients])
    P = np.zeros((M + 1, M + 1, M + 1))
    P[:, 0, 0] = v_arr
    for _ in range(2, N + 1):
        P = _advance_float(v_arr, P, float(J), int(D), M)
    terms = {}
    for a, b, c in zip(*np.nonzero(P)):
        terms[(int(a), int(b), int(c))] = float(P[a, b, c])
    return TruncatedPoly(PAIR_VARS, terms, M, FLOAT)


def stable_coefficient_count(lower: PartitionSeries, upper: PartitionSeries, rel_tol=1e-10):
    """Highest index K with a_0..a_K agreeing between two truncation degrees.

    The ladder's coefficient-level convergence check: a coefficient is
    stable when its relative change between successive degrees is below
    ``rel_tol``.
    """
    a = lower.float_coefficients()
    b = upper.float_coefficients()
    count = 0
    for n in range(min(len(a), len(b))):
        ref = max(abs(b[n]), 1e-300)
        if abs(a[n] - b[n]) / ref >= rel_tol:
            break
        count = n + 1
    return count


def phi(N, D, J, measure: RadialMeasure, M, field=FLOAT, engine="fast") -> PartitionSeries:
    """Partition series phi_{N,D} for a chain of N spins at coupling J.

    N = 1 returns the single-spin transform; longer chains iterate the
    transfer recursion at truncation degree M.  Z_N(z) = phi(z^2).
    """
    v = laplace_transform(measure, D, M, field)
    return phi_from_transform(v, N, J, D, engine)


def phi_chain(Ns, D, J, measure: RadialMeasure, M, field=FLOAT, engine="fast"):
    """phi for every chain length in Ns, sharing one recursion sweep."""
    Ns = sorted(set(int(n) for n in Ns))
    if not Ns or Ns[0] < 1:
        raise ValueError("chain lengths must be positive integers")
    v = laplace_transform(measure, D, M, field)
    if engine == "fast":
        diags = _phi_fast(v, Ns[-1], J, D)
    else:
        diags = _phi_operator(v, Ns[-1], J, D)
    out = {}
    for n in Ns:
        coeffs = tuple(diags[n])
        coeffs = coeffs + tuple(
            coerce_scalar(0, v.field) for _ in range(M + 1 - len(coeffs))
        )
        out[n] = PartitionSeries(
            coeffs[: M + 1], n, int(D), J, measure.label, M, field, v.pi_power * n
        )
    return out
