"""Root localization and Lee-Yang verdicts for truncated partition series.

The Lee-Yang property of a chain says every zero of Z_N, viewed through
zeta = z^2, sits on the negative real axis, so the series factors as
Z_N(0) * prod_j (1 + gamma_j * zeta) with gamma_j > 0.  This module finds
the zeros of degree-limited truncations (companion-matrix seeds refined by
simultaneous Aberth-Ehrlich iteration), classifies them against an
axis tolerance, and runs the truncation ladder that separates genuine
zeros from truncation artifacts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .measures import RadialMeasure
from .recursion import phi_chain

RESIDUAL_TOL = 1e-10
DRIFT_TOL = 1e-8
# A k-fold root of a float polynomial splits by ~eps^(1/k) * conditioning;
# measured splits for doubled kernels stay below ~1e-5 relative, well away
# from genuine root separations, so clusters are merged at 2e-5.
CLUSTER_TOL = 2e-5
AXIS_TOL = 1e-6
ABERTH_CAP = 200

NEGATIVE_REAL = "negative-real"
OFF_AXIS = "off-axis"
UNSTABLE = "unstable"

VERIFIED = "LeeYangVerified"
VIOLATED = "LeeYangViolated"
INCONCLUSIVE = "Inconclusive"


def _polyval_many(coeffs, x):
    # ascending coefficients, Horner
    total = np.zeros_like(x, dtype=complex)
    for c in coeffs[::-1]:
        total = total * x + c
    return total


def _residual_scale(coeffs, x):
    powers = np.ones_like(x, dtype=float)
    scale = np.full(x.shape, abs(coeffs[0]), dtype=float)
    ax = np.abs(x)
    for c in coeffs[1:]:
        powers = powers * ax
        np.maximum(scale, abs(c) * powers, out=scale)
    return scale


@dataclass(frozen=True)
class RootSet:
    """Roots of one truncation with per-root convergence flags."""

    roots: tuple
    converged: tuple
    residuals: tuple
    window: int


def find_roots(coefficients, window=None, detailed=False):
    """All roots of the degree-``window`` truncation of a series.

    Seeds come from the balanced companion matrix; an Aberth-Ehrlich sweep
    refines them until |p(root)| <= 1e-10 * max_k |c_k root^k| or the
    iteration cap is hit (such roots are flagged, not silently returned).
    Returns a list of complex roots, or a RootSet when ``detailed``.
    """
    coeffs = np.asarray(
        [complex(c) for c in coefficients], dtype=complex
    )
    if window is None:
        window = len(coeffs) - 1
    if window > len(coeffs) - 1:
        raise ValueError(f"window {window} exceeds series degree {len(coeffs) - 1}")
    coeffs = coeffs[: window + 1]
    nz = np.nonzero(np.abs(coeffs))[0]
    if nz.size == 0 or nz[-1] == 0:
        empty = RootSet((), (), (), window)
        return empty if detailed else []
    coeffs = coeffs[: nz[-1] + 1]
    if abs(coeffs[-1]) == 0:
        raise ValueError("leading reported coefficient is zero")
    # zeros are scale-invariant; a power-of-two normalization is lossless,
    # so positive rescalings of the input cannot perturb well-conditioned roots
    coeffs = coeffs / 2.0 ** np.round(np.log2(np.max(np.abs(coeffs))))
    deg = len(coeffs) - 1
    roots = np.roots(coeffs[::-1])
    dcoeffs = coeffs[1:] * np.arange(1, deg + 1)
    converged = np.zeros(deg, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(ABERTH_CAP):
            pv = _polyval_many(coeffs, roots)
            scale = _residual_scale(coeffs, roots)
            converged = np.abs(pv) <= RESIDUAL_TOL * scale
            if converged.all():
                break
            dv = _polyval_many(dcoeffs, roots)
            ratio = np.where(dv != 0, pv / np.where(dv == 0, 1.0, dv), 0.0)
            diff = roots[:, None] - roots[None, :]
            np.fill_diagonal(diff, np.inf)
            s = (1.0 / diff).sum(axis=1)
            denom = 1.0 - ratio * s
            step = np.where(np.abs(denom) > 1e-300, ratio / denom, ratio)
            step = np.where(np.isfinite(step), step, 0.0)
            roots = roots - np.where(converged, 0.0, step)
        pv = _polyval_many(coeffs, roots)
        scale = _residual_scale(coeffs, roots)
        converged = np.abs(pv) <= RESIDUAL_TOL * scale
        converged &= np.isfinite(roots)
    # canonical order: modulus, then real, then imaginary part (ties from
    # conjugate pairs would otherwise order unpredictably)
    order = np.lexsort((roots.imag, roots.real, np.abs(roots)))
    roots = roots[order]
    converged = converged[order]
    residuals = np.abs(pv[order]) / scale[order]
    result = RootSet(
        tuple(roots.tolist()), tuple(bool(b) for b in converged), tuple(residuals.tolist()), window
    )
    return result if detailed else list(result.roots)


def newton_check(coefficients):
    """Log-concavity a_k^2 >= a_{k-1} a_{k+1} at every interior index.

    A necessary condition for a nonnegative-coefficient polynomial to be
    real-rooted; a failure certifies a Lee-Yang violation of the
    truncation, a pass alone is inconclusive.
    """
    c = [float(x) for x in coefficients]
    out = []
    for k in range(1, len(c) - 1):
        out.append((k, c[k] * c[k] >= c[k - 1] * c[k + 1]))
    return out


def _cluster(rootset: RootSet, tol=CLUSTER_TOL):
    """Group nearly-coincident roots into (centroid, multiplicity) clusters.

    A double root of a float polynomial splits by ~sqrt(eps); the centroid
    is first-order accurate, so stability tracking uses clusters.
    """
    clusters = []
    for root, conv in zip(rootset.roots, rootset.converged):
        for c in clusters:
            if abs(root - c["sum"] / c["mult"]) <= tol * (1 + abs(root)):
                c["sum"] += root
                c["mult"] += 1
                c["converged"] &= conv
                break
        else:
            clusters.append({"sum": root, "mult": 1, "converged": conv})
    return [
        (c["sum"] / c["mult"], c["mult"], c["converged"])
        for c in clusters
    ]


def _classify_root(zeta, tol):
    scale = tol * (1.0 + abs(zeta))
    if abs(zeta.imag) <= scale and zeta.real < 0:
        return NEGATIVE_REAL
    if abs(zeta.imag) > 10 * scale or zeta.real >= 0:
        return OFF_AXIS
    return UNSTABLE


@dataclass(frozen=True)
class ZeroReport:
    """Located roots with Lee-Yang classification and ladder diagnostics."""

    roots: tuple
    multiplicities: tuple
    verdicts: tuple
    stable: tuple
    gammas: tuple
    truncation_degrees: tuple
    drift_per_root: tuple
    overall: str
    gamma_sum: float = 0.0
    notes: str = ""

    def stable_roots(self):
        return [r for r, s in zip(self.roots, self.stable) if s]

    def reconstruct_coefficients(self, constant, count=4):
        """Partial-product coefficients of Z(0) * prod (1 + gamma zeta).

        Sums only the reported gammas, so it reproduces low-order series
        coefficients only when the stable window captures every dominant
        root (the infinite product's tail is otherwise missing).
        """
        coeffs = [complex(constant)]
        for g in self.gammas:
            coeffs = [
                (coeffs[i] if i < len(coeffs) else 0)
                + g * (coeffs[i - 1] if i >= 1 else 0)
                for i in range(len(coeffs) + 1)
            ]
        return [c.real for c in coeffs[:count]]

    def to_json(self):
        return json.dumps(
            {
                "roots": [[r.real, r.imag] for r in self.roots],
                "multiplicities": list(self.multiplicities),
                "verdicts": list(self.verdicts),
                "stable": list(self.stable),
                "gammas": list(self.gammas),
                "gamma_sum": self.gamma_sum,
                "truncation_degrees": list(self.truncation_degrees),
                "drift_per_root": list(self.drift_per_root),
                "overall": self.overall,
                "notes": self.notes,
            }
        )

    def to_csv(self):
        lines = ["re_zeta,im_zeta,multiplicity,class,stable,gamma"]
        for r, mult, v, s in zip(self.roots, self.multiplicities, self.verdicts, self.stable):
            gamma = -1.0 / r.real if v == NEGATIVE_REAL and r.real < 0 else ""
            lines.append(f"{r.real!r},{r.imag!r},{mult},{v},{int(s)},{gamma}")
        return "\n".join(lines) + "\n"


def classify_lee_yang(roots, tol=AXIS_TOL, stable=None, truncation_degrees=(), drifts=None, multiplicities=None, notes=""):
    """Classify roots and issue the overall Lee-Yang verdict.

    A root is negative-real only if |Im zeta| <= tol * (1 + |zeta|) and
    Re zeta < 0; off-axis requires leaving a 10x wider wedge (or a
    nonnegative real part).  Only stable roots enter the overall verdict.
    """
    roots = [complex(r) for r in roots]
    n = len(roots)
    stable = [True] * n if stable is None else list(stable)
    multiplicities = [1] * n if multiplicities is None else list(multiplicities)
    drifts = [0.0] * n if drifts is None else list(drifts)
    verdicts = [_classify_root(r, tol) for r in roots]
    stable_verdicts = [v for v, s in zip(verdicts, stable) if s]
    if not stable_verdicts:
        overall = INCONCLUSIVE
    elif any(v == OFF_AXIS for v in stable_verdicts):
        overall = VIOLATED
    elif all(v == NEGATIVE_REAL for v in stable_verdicts):
        overall = VERIFIED
    else:
        overall = INCONCLUSIVE
    gammas = []
    for r, v, s, mult in zip(roots, verdicts, stable, multiplicities):
        if s and v == NEGATIVE_REAL:
            gammas.extend([-1.0 / r.real] * mult)
    gammas.sort(reverse=True)
    gamma_sum = float(sum(gammas))
    if gammas:
        notes = (notes + " " if notes else "") + (
            "gamma_sum covers the stable window only; the entire function's tail is excluded."
        )
    return ZeroReport(
        tuple(roots),
        tuple(multiplicities),
        tuple(verdicts),
        tuple(bool(s) for s in stable),
        tuple(gammas),
        tuple(truncation_degrees),
        tuple(drifts),
        overall,
        gamma_sum,
        notes,
    )


def default_window(M):
    """Reporting window: tail coefficients of a truncation are unreliable."""
    return min(M // 2, 30)


def stabilize_series(series_by_degree, tol=AXIS_TOL, drift_tol=DRIFT_TOL):
    """Ladder protocol on precomputed series {M: coefficients}.

    Solves the full truncation at every stage, clusters nearly-coincident
    roots, and marks a top-ladder cluster stable when a cluster of equal
    multiplicity in the previous stage sits within ``drift_tol`` relative
    distance and the iteration converged.  Only the first
    ``default_window(M)`` clusters are reported: beyond that the roots of
    a truncation carry no information about the entire function.
    """
    degrees = sorted(series_by_degree)
    if len(degrees) < 2:
        raise ValueError("degree ladder needs at least two stages")
    clusters_by_degree = {}
    for M in degrees:
        rs = find_roots(series_by_degree[M], detailed=True)
        clusters_by_degree[M] = _cluster(rs)
    top, prev = clusters_by_degree[degrees[-1]], clusters_by_degree[degrees[-2]]
    top = top[: default_window(degrees[-1])]
    roots, mults, stable, drifts = [], [], [], []
    used = set()
    for zeta, mult, conv in top:
        best, best_drift = None, math.inf
        for idx, (pz, pm, pconv) in enumerate(prev):
            if idx in used or pm != mult:
                continue
            d = abs(zeta - pz) / (1.0 + abs(zeta))
            if d < best_drift:
                best, best_drift = idx, d
        ok = best is not None and best_drift < drift_tol and conv
        if best is not None and ok:
            used.add(best)
        roots.append(zeta)
        mults.append(mult)
        stable.append(bool(ok))
        drifts.append(best_drift if best is not None else math.inf)
    report = classify_lee_yang(
        roots,
        tol=tol,
        stable=stable,
        truncation_degrees=tuple(degrees),
        drifts=drifts,
        multiplicities=mults,
    )
    return report


def stabilize(N, D, J, measure: RadialMeasure, degree_ladder, tol=AXIS_TOL, drift_tol=DRIFT_TOL, field="float64", engine="fast"):
    """Run phi over the truncation ladder and report stabilized zeros."""
    reports = stabilize_chain([N], D, J, measure, degree_ladder, tol, drift_tol, field, engine)
    return reports[N]


def stabilize_chain(Ns, D, J, measure: RadialMeasure, degree_ladder, tol=AXIS_TOL, drift_tol=DRIFT_TOL, field="float64", engine="fast"):
    """stabilize() for several chain lengths sharing one recursion sweep."""
    degrees = sorted(set(int(m) for m in degree_ladder))
    if len(degrees) < 2:
        raise ValueError("degree ladder needs at least two stages")
    per_n = {n: {} for n in Ns}
    for M in degrees:
        chain = phi_chain(Ns, D, J, measure, M, field, engine)
        for n in Ns:
            per_n[n][M] = chain[n].float_coefficients()
    return {n: stabilize_series(per_n[n], tol=tol, drift_tol=drift_tol) for n in Ns}
