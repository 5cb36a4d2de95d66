"""Sparse truncated polynomial algebra over named Gram coordinates.

A chain of D-vector spins is analyzed through the rotation invariants
g_jk = z_j . z_k of up to three complex vectors.  This module provides the
polynomial ring in those six coordinates (with total-degree truncation),
linear differential operators whose every term lowers total degree by one,
and their exactly-nilpotent exponentials.

Two coefficient fields are supported: ``float64`` for production runs and
``rational`` (``fractions.Fraction``) for exact identity verification.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

# Canonical coordinate order.  g11, g22, g33 are the squared vectors
# (diagonal Gram entries), g12, g13, g23 the mixed products.
GRAM_VARS = ("g11", "g22", "g33", "g12", "g13", "g23")
PAIR_VARS = ("g11", "g22", "g12")

FLOAT = "float64"
RATIONAL = "rational"


class FieldMismatchError(ValueError):
    """Raised when operands use different coefficient fields."""


class VariableMismatchError(ValueError):
    """Raised when operands use different variable sets."""


def coerce_scalar(value, field_name):
    """Convert a scalar into the given coefficient field.

    Floats are rejected in rational mode: a float carries rounding, so
    feeding one into an exact computation would silently poison it.
    """
    if field_name == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        raise FieldMismatchError(
            f"rational field requires Fraction or int scalars, got {type(value).__name__}"
        )
    if field_name == FLOAT:
        if isinstance(value, complex):
            return value
        return float(value)
    raise ValueError(f"unknown coefficient field {field_name!r}")


def _zero(field_name):
    return Fraction(0) if field_name == RATIONAL else 0.0


@dataclass(frozen=True)
class TruncatedPoly:
    """Sparse polynomial with a total-degree cap.

    ``terms`` maps exponent tuples (aligned with ``variables``) to nonzero
    coefficients; every stored multi-index has total degree <= ``max_degree``.
    Instances are treated as immutable values.
    """

    variables: tuple[str, ...]
    terms: dict[tuple[int, ...], object]
    max_degree: int
    field: str = FLOAT

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise VariableMismatchError("duplicate variable names")
        for name in self.variables:
            if name not in GRAM_VARS:
                raise VariableMismatchError(f"unknown Gram coordinate {name!r}")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables, max_degree, field_name=FLOAT):
        return cls(tuple(variables), {}, max_degree, field_name)

    @classmethod
    def constant(cls, value, variables, max_degree, field_name=FLOAT):
        value = coerce_scalar(value, field_name)
        if value == 0:
            return cls.zero(variables, max_degree, field_name)
        exp = (0,) * len(tuple(variables))
        return cls(tuple(variables), {exp: value}, max_degree, field_name)

    @classmethod
    def monomial(cls, exponents, coefficient, variables, max_degree, field_name=FLOAT):
        variables = tuple(variables)
        exponents = tuple(int(e) for e in exponents)
        if len(exponents) != len(variables):
            raise VariableMismatchError("exponent tuple does not match variables")
        coefficient = coerce_scalar(coefficient, field_name)
        if sum(exponents) > max_degree or coefficient == 0:
            return cls.zero(variables, max_degree, field_name)
        return cls(variables, {exponents: coefficient}, max_degree, field_name)

    @classmethod
    def from_univariate(cls, coefficients, var, variables, max_degree, field_name=FLOAT):
        """Lift a coefficient list c_0..c_n in ``var`` into the ring."""
        variables = tuple(variables)
        idx = variables.index(var)
        terms = {}
        for n, c in enumerate(coefficients):
            if n > max_degree:
                break
            c = coerce_scalar(c, field_name)
            if c == 0:
                continue
            exp = [0] * len(variables)
            exp[idx] = n
            terms[tuple(exp)] = c
        return cls(variables, terms, max_degree, field_name)

    # -- basic queries ------------------------------------------------

    def degree(self):
        """Total degree of the stored polynomial (-1 for the zero poly)."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def coefficient(self, exponents):
        return self.terms.get(tuple(exponents), _zero(self.field))

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, TruncatedPoly):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.field == other.field
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.variables, self.field, frozenset(self.terms.items())))

    # -- arithmetic ---------------------------------------------------

    def _check_compat(self, other):
        if self.variables != other.variables:
            raise VariableMismatchError(
                f"variable sets differ: {self.variables} vs {other.variables}"
            )
        if self.field != other.field:
            raise FieldMismatchError(f"fields differ: {self.field} vs {other.field}")
        if self.max_degree != other.max_degree:
            raise ValueError(
                f"degree caps differ: {self.max_degree} vs {other.max_degree}"
            )

    def __add__(self, other):
        if not isinstance(other, TruncatedPoly):
            return NotImplemented
        self._check_compat(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = terms.get(exp, _zero(self.field)) + c
            if s == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = s
        return TruncatedPoly(self.variables, terms, self.max_degree, self.field)

    def __neg__(self):
        return TruncatedPoly(
            self.variables,
            {e: -c for e, c in self.terms.items()},
            self.max_degree,
            self.field,
        )

    def __sub__(self, other):
        if not isinstance(other, TruncatedPoly):
            return NotImplemented
        return self + (-other)

    def scale(self, scalar):
        scalar = coerce_scalar(scalar, self.field)
        if scalar == 0:
            return TruncatedPoly.zero(self.variables, self.max_degree, self.field)
        return TruncatedPoly(
            self.variables,
            {e: c * scalar for e, c in self.terms.items()},
            self.max_degree,
            self.field,
        )

    def __mul__(self, other):
        if not isinstance(other, TruncatedPoly):
            return self.scale(other)
        self._check_compat(other)
        cap = self.max_degree
        terms = {}
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > cap:
                    continue  # truncation: silently drop over-cap products
                exp = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(exp, _zero(self.field)) + c1 * c2
                if s == 0:
                    terms.pop(exp, None)
                else:
                    terms[exp] = s
        return TruncatedPoly(self.variables, terms, cap, self.field)

    __rmul__ = __mul__

    # -- calculus and substitution -------------------------------------

    def derivative(self, var, order=1):
        """Partial derivative with respect to one Gram coordinate."""
        idx = self.variables.index(var)
        terms = self.terms
        for _ in range(order):
            new_terms = {}
            for exp, c in terms.items():
                k = exp[idx]
                if k == 0:
                    continue
                new_exp = exp[:idx] + (k - 1,) + exp[idx + 1 :]
                new_terms[new_exp] = new_terms.get(new_exp, _zero(self.field)) + c * k
            terms = {e: c for e, c in new_terms.items() if c != 0}
        return TruncatedPoly(self.variables, terms, self.max_degree, self.field)

    def relabel(self, mapping):
        """Rename variables (a bijection onto a subset of GRAM_VARS).

        The result uses the canonical order of the renamed set.
        """
        new_names = tuple(mapping.get(v, v) for v in self.variables)
        if len(set(new_names)) != len(new_names):
            raise VariableMismatchError("relabel mapping is not injective")
        order = tuple(v for v in GRAM_VARS if v in new_names)
        perm = [new_names.index(v) for v in order]
        terms = {}
        for exp, c in self.terms.items():
            terms[tuple(exp[p] for p in perm)] = c
        return TruncatedPoly(order, terms, self.max_degree, self.field)

    def embed(self, variables):
        """View the polynomial in a larger variable set (zero exponents added)."""
        variables = tuple(variables)
        pos = []
        for v in self.variables:
            if v not in variables:
                raise VariableMismatchError(f"target set is missing {v!r}")
            pos.append(variables.index(v))
        terms = {}
        for exp, c in self.terms.items():
            new_exp = [0] * len(variables)
            for p, e in zip(pos, exp):
                new_exp[p] = e
            terms[tuple(new_exp)] = c
        return TruncatedPoly(variables, terms, self.max_degree, self.field)

    def evaluate(self, point):
        """Evaluate at a complex point given as ``{var: value}``.

        Terms are summed in sorted exponent order so results are
        deterministic regardless of dict history.
        """
        values = [point[v] for v in self.variables]
        total = 0j
        for exp in sorted(self.terms):
            c = self.terms[exp]
            term = complex(c)
            for val, e in zip(values, exp):
                if e:
                    term *= val**e
            total += term
        return total

    # -- serialization --------------------------------------------------

    def to_json(self):
        entries = []
        for exp in sorted(self.terms):
            c = self.terms[exp]
            if self.field == RATIONAL:
                coeff = f"{c.numerator}/{c.denominator}"
            else:
                coeff = c
            entries.append({"exp": list(exp), "coeff": coeff})
        return json.dumps(
            {
                "vars": list(self.variables),
                "maxDegree": self.max_degree,
                "field": self.field,
                "terms": entries,
            }
        )

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        field_name = data.get("field", FLOAT)
        terms = {}
        for entry in data["terms"]:
            coeff = entry["coeff"]
            if isinstance(coeff, str):
                num, den = coeff.split("/")
                coeff = Fraction(int(num), int(den))
            coeff = coerce_scalar(coeff, field_name)
            terms[tuple(entry["exp"])] = coeff
        return cls(tuple(data["vars"]), terms, data["maxDegree"], field_name)


# ---------------------------------------------------------------------------
# Differential operators
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorTerm:
    """One primitive term: coefficient * monomial * product of partials."""

    coefficient: object
    multiplier: tuple[int, ...]
    derivatives: tuple[str, ...]


@dataclass(frozen=True)
class GramOperator:
    """A sum of degree-lowering (monomial x partial-derivative) terms.

    Every term must lower total degree by exactly one; this is what makes
    exp(J * op) terminate after deg(p) applications on any polynomial p.
    """

    variables: tuple[str, ...]
    terms: tuple[OperatorTerm, ...]
    dimension: int

    def __post_init__(self):
        for t in self.terms:
            drop = len(t.derivatives) - sum(t.multiplier)
            if drop != 1:
                raise ValueError(
                    f"operator term must lower degree by 1, got drop={drop}"
                )
            for d in t.derivatives:
                if d not in self.variables:
                    raise VariableMismatchError(f"derivative in unknown variable {d!r}")


def apply_operator(op: GramOperator, p: TruncatedPoly) -> TruncatedPoly:
    """Apply a GramOperator once.  Output degree <= deg(p) - 1."""
    for v in op.variables:
        if v not in p.variables:
            raise VariableMismatchError(
                f"polynomial lacks operator variable {v!r}"
            )
    out = TruncatedPoly.zero(p.variables, p.max_degree, p.field)
    for term in op.terms:
        q = p
        for d in term.derivatives:
            q = q.derivative(d)
            if q.is_zero():
                break
        if q.is_zero():
            continue
        mono = TruncatedPoly.monomial(
            _pad_exponents(term.multiplier, op.variables, p.variables),
            coerce_scalar(term.coefficient, p.field),
            p.variables,
            p.max_degree,
            p.field,
        )
        out = out + mono * q
    return out


def _pad_exponents(exps, from_vars, to_vars):
    padded = [0] * len(to_vars)
    for v, e in zip(from_vars, exps):
        padded[to_vars.index(v)] = e
    return tuple(padded)


def exp_operator(J, op: GramOperator, p: TruncatedPoly) -> TruncatedPoly:
    """Compute sum_k (J^k / k!) op^k p.

    The sum terminates at k = deg(p) because each application lowers total
    degree by one, so no truncation error is introduced beyond what is
    already present in p.
    """
    J = coerce_scalar(J, p.field)
    if J == 0 or p.is_zero():
        return p
    out = p
    power = p
    scale = coerce_scalar(1, p.field)
    for k in range(1, p.degree() + 1):
        power = apply_operator(op, power)
        if power.is_zero():
            break
        if p.field == RATIONAL:
            scale = scale * J / k
        else:
            scale = scale * J / float(k)
        out = out + power.scale(scale)
    return out


def merge_2_3(p: TruncatedPoly) -> TruncatedPoly:
    """Identify slots 2 and 3: g33 -> g22, g23 -> g22, g13 -> g12.

    Takes a six-variable polynomial to the three-variable ring
    (g11, g22, g12), collecting like terms.  Total degree is preserved.
    """
    if p.variables != GRAM_VARS:
        raise VariableMismatchError("merge_2_3 expects the full six-variable ring")
    terms = {}
    for (e1, e2, e3, e12, e13, e23), c in p.terms.items():
        exp = (e1, e2 + e3 + e23, e12 + e13)
        s = terms.get(exp, _zero(p.field)) + c
        if s == 0:
            terms.pop(exp, None)
        else:
            terms[exp] = s
    return TruncatedPoly(PAIR_VARS, terms, p.max_degree, p.field)


def diagonal_series(p: TruncatedPoly) -> list:
    """Restrict all variables to a single one: coefficients of p(z, z, ..., z)."""
    out = [_zero(p.field)] * (p.max_degree + 1)
    for exp, c in p.terms.items():
        out[sum(exp)] += c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def random_poly(variables, max_degree, rng, field_name=RATIONAL, n_terms=12, cap=None):
    """Random sparse polynomial for property tests (seeded rng)."""
    variables = tuple(variables)
    cap = max_degree if cap is None else cap
    terms = {}
    for _ in range(n_terms):
        exp = [0] * len(variables)
        budget = int(rng.integers(0, max_degree + 1))
        for _k in range(budget):
            exp[int(rng.integers(0, len(variables)))] += 1
        num = int(rng.integers(-9, 10))
        if num == 0:
            continue
        if field_name == RATIONAL:
            coeff = Fraction(num, int(rng.integers(1, 7)))
        else:
            coeff = float(num)
        exp = tuple(exp)
        terms[exp] = terms.get(exp, _zero(field_name)) + coeff
    terms = {e: c for e, c in terms.items() if c != 0}
    return TruncatedPoly(variables, terms, cap, field_name)
