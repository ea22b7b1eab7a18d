"""Exact arithmetic for integer-coefficient Laurent polynomials.

A polynomial in n variables is stored sparsely as a map from exponent
vectors (length-n tuples of ints, negative entries allowed) to nonzero
integer coefficients.  Zero coefficients are pruned on construction, so
two polynomials are equal exactly when their term maps are equal, and
equality is plain data comparison.  Coefficients are Python ints and
never overflow.

Terms are ordered lexicographically by exponent vector.  That single
order drives serialization, the deterministic ordering of whole
polynomials (``sort_key``), and the reduction order inside exact
division.  Variable names are not stored per term; they are supplied
at formatting time only.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Optional, Sequence

from .errors import ExactDivisionFailed

Exponents = tuple[int, ...]


class LaurentPoly:
    """Immutable sparse Laurent polynomial with integer coefficients."""

    __slots__ = ("arity", "terms", "_key", "_hash")

    def __init__(self, arity: int, terms: Mapping[Exponents, int]):
        if arity < 0:
            raise ValueError("arity must be nonnegative")
        pruned = {}
        for exps, coeff in terms.items():
            if coeff == 0:
                continue
            exps = tuple(exps)
            if len(exps) != arity:
                raise ValueError(f"exponent vector {exps} does not have arity {arity}")
            pruned[exps] = coeff
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "terms", pruned)
        object.__setattr__(self, "_key", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, arity: int) -> "LaurentPoly":
        return cls(arity, {})

    @classmethod
    def one(cls, arity: int) -> "LaurentPoly":
        return cls(arity, {(0,) * arity: 1})

    @classmethod
    def constant(cls, value: int, arity: int) -> "LaurentPoly":
        return cls(arity, {(0,) * arity: value})

    @classmethod
    def variable(cls, index: int, arity: int) -> "LaurentPoly":
        if not 0 <= index < arity:
            raise ValueError(f"variable index {index} out of range for arity {arity}")
        exps = [0] * arity
        exps[index] = 1
        return cls(arity, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exponents: Sequence[int], coeff: int = 1) -> "LaurentPoly":
        return cls(len(exponents), {tuple(exponents): coeff})

    # -- basic queries -----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0,) * self.arity: 1}

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def coefficient(self, exponents: Sequence[int]) -> int:
        return self.terms.get(tuple(exponents), 0)

    def min_exponent(self, index: int) -> int:
        """Smallest exponent of variable ``index`` over all terms (poly must be nonzero)."""
        if not self.terms:
            raise ValueError("zero polynomial has no exponents")
        return min(e[index] for e in self.terms)

    def sort_key(self):
        """Deterministic total-order key: terms sorted lexicographically."""
        key = self._key
        if key is None:
            key = tuple(sorted(self.terms.items()))
            object.__setattr__(self, "_key", key)
        return key

    # -- ring operations ---------------------------------------------------

    def _coerce(self, other) -> Optional["LaurentPoly"]:
        if isinstance(other, LaurentPoly):
            if other.arity != self.arity:
                raise ValueError(f"arity mismatch: {self.arity} vs {other.arity}")
            return other
        if isinstance(other, int):
            return LaurentPoly.constant(other, self.arity)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            total = out.get(exps, 0) + coeff
            if total:
                out[exps] = total
            else:
                out.pop(exps, None)
        return LaurentPoly(self.arity, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.arity, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if not self.terms or not other.terms:
            return LaurentPoly.zero(self.arity)
        out: dict[Exponents, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exps = tuple(a + b for a, b in zip(e1, e2))
                total = out.get(exps, 0) + c1 * c2
                if total:
                    out[exps] = total
                else:
                    del out[exps]
        return LaurentPoly(self.arity, out)

    __rmul__ = __mul__

    def __pow__(self, power: int):
        if power < 0:
            # only monomials with unit coefficient are invertible over Z
            if not self.is_monomial():
                raise ValueError("negative powers require a monomial")
            ((exps, coeff),) = self.terms.items()
            if coeff not in (1, -1):
                raise ValueError("negative powers require a unit coefficient")
            inv = LaurentPoly(self.arity, {tuple(-e for e in exps): coeff})
            return inv ** (-power)
        result = LaurentPoly.one(self.arity)
        base = self
        while power:
            if power & 1:
                result = result * base
            base = base * base
            power >>= 1
        return result

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.arity == other.arity and self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.arity, self.sort_key()))
            object.__setattr__(self, "_hash", h)
        return h

    def __lt__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.sort_key() <= other.sort_key()

    def __bool__(self):
        return bool(self.terms)

    # -- calculus and normal forms ------------------------------------------

    def derivative(self, index: int) -> "LaurentPoly":
        """Formal partial derivative in variable ``index`` (any integer exponents)."""
        if not 0 <= index < self.arity:
            raise ValueError(f"variable index {index} out of range")
        out: dict[Exponents, int] = {}
        for exps, coeff in self.terms.items():
            k = exps[index]
            if k == 0:
                continue
            shifted = list(exps)
            shifted[index] = k - 1
            out[tuple(shifted)] = coeff * k
        return LaurentPoly(self.arity, out)

    def reduced_form(self) -> tuple["LaurentPoly", Exponents]:
        """Split into (numerator, denominator exponents).

        The denominator entry for variable i is max(0, -(min exponent of i)),
        so the numerator has nonnegative exponents and self equals
        numerator / prod(x_i ** d_i).
        """
        if not self.terms:
            raise ValueError("zero polynomial has no reduced form")
        denom = tuple(max(0, -self.min_exponent(i)) for i in range(self.arity))
        num = {
            tuple(e + d for e, d in zip(exps, denom)): coeff
            for exps, coeff in self.terms.items()
        }
        return LaurentPoly(self.arity, num), denom

    def has_positive_coefficients(self) -> bool:
        """True when every stored coefficient is positive (poly must be nonzero).

        Multiplying by a monomial never changes the coefficient multiset, so
        this is also positivity of the reduced numerator.
        """
        if not self.terms:
            raise ValueError("zero polynomial has no coefficient sign")
        return all(c > 0 for c in self.terms.values())

    # -- formatting ----------------------------------------------------------

    def __repr__(self):
        return f"LaurentPoly({format_poly(self)})"

    def __str__(self):
        return format_poly(self)


def coordinates(arity: int) -> tuple[LaurentPoly, ...]:
    """The coordinate cluster x_1, ..., x_n."""
    return tuple(LaurentPoly.variable(i, arity) for i in range(arity))


def poly_sum(items: Iterable[LaurentPoly], arity: int) -> LaurentPoly:
    total = LaurentPoly.zero(arity)
    for item in items:
        total = total + item
    return total


def poly_prod(items: Iterable[LaurentPoly], arity: int) -> LaurentPoly:
    total = LaurentPoly.one(arity)
    for item in items:
        total = total * item
    return total


def add(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a + b


def mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    return a * b


def try_div_exact(a: LaurentPoly, b: LaurentPoly) -> Optional[LaurentPoly]:
    """Return q with q * b == a over integer coefficients, or None.

    Both operands are first shifted into honest polynomials (minimum
    exponent zero per variable); a Laurent quotient exists exactly when the
    shifted polynomial quotient does, because minimum exponents per
    variable are additive under multiplication.  The shifted division is
    reduction against the lexicographic leading term, which terminates on
    nonnegative exponents and fails fast at the first non-matching leading
    monomial or non-dividing leading coefficient.
    """
    if a.arity != b.arity:
        raise ValueError("arity mismatch")
    if b.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    if a.is_zero():
        return LaurentPoly.zero(a.arity)

    arity = a.arity
    shift_a = tuple(a.min_exponent(i) for i in range(arity))
    shift_b = tuple(b.min_exponent(i) for i in range(arity))
    rem = {
        tuple(e - s for e, s in zip(exps, shift_a)): c for exps, c in a.terms.items()
    }
    divisor = {
        tuple(e - s for e, s in zip(exps, shift_b)): c for exps, c in b.terms.items()
    }
    lead_b = max(divisor)
    lead_b_coeff = divisor[lead_b]

    quot: dict[Exponents, int] = {}
    while rem:
        lead_r = max(rem)
        diff = tuple(e - f for e, f in zip(lead_r, lead_b))
        if any(d < 0 for d in diff):
            return None
        coeff_r = rem[lead_r]
        if coeff_r % lead_b_coeff != 0:
            return None
        factor = coeff_r // lead_b_coeff
        quot[diff] = factor
        for exps, coeff in divisor.items():
            target = tuple(d + e for d, e in zip(diff, exps))
            total = rem.get(target, 0) - factor * coeff
            if total:
                rem[target] = total
            else:
                rem.pop(target, None)

    offset = tuple(sa - sb for sa, sb in zip(shift_a, shift_b))
    return LaurentPoly(arity, {tuple(e + o for e, o in zip(exps, offset)): c
                               for exps, c in quot.items()})


def div_exact(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact division; raises ExactDivisionFailed when no Laurent quotient exists."""
    quotient = try_div_exact(a, b)
    if quotient is None:
        raise ExactDivisionFailed(f"({format_poly(a)}) is not divisible by ({format_poly(b)})")
    return quotient


def substitute(a: LaurentPoly, images: Sequence[LaurentPoly]) -> Optional[LaurentPoly]:
    """Evaluate ``a`` at the given images of its variables.

    Negative exponents are handled by splitting a into numerator over a
    monomial denominator and dividing exactly at the end.  Returns None
    when the result is not a Laurent polynomial in the target ring, which
    is a meaningful outcome (the substituted value left the Laurent ring),
    not an error.
    """
    if len(images) != a.arity:
        raise ValueError("need one image per variable")
    if a.arity == 0:
        raise ValueError("cannot substitute into an arity-0 polynomial")
    target = images[0].arity
    if any(img.arity != target for img in images):
        raise ValueError("images must share one arity")
    if a.is_zero():
        return LaurentPoly.zero(target)

    numerator, denom = a.reduced_form()
    value = LaurentPoly.zero(target)
    power_cache: dict[tuple[int, int], LaurentPoly] = {}

    def power(i: int, k: int) -> LaurentPoly:
        got = power_cache.get((i, k))
        if got is None:
            got = images[i] ** k
            power_cache[(i, k)] = got
        return got

    for exps, coeff in numerator.terms.items():
        term = LaurentPoly.constant(coeff, target)
        for i, e in enumerate(exps):
            if e:
                term = term * power(i, e)
        value = value + term
    divisor = LaurentPoly.one(target)
    for i, d in enumerate(denom):
        if d:
            divisor = divisor * power(i, d)
    if divisor.is_one():
        return value
    return try_div_exact(value, divisor)


def default_names(arity: int, stem: str = "x") -> list[str]:
    return [f"{stem}{i + 1}" for i in range(arity)]


def format_poly(a: LaurentPoly, names: Optional[Sequence[str]] = None) -> str:
    """Human-readable rendering with 1-based default variable names."""
    if names is None:
        names = default_names(a.arity)
    if not a.terms:
        return "0"
    pieces = []
    for exps, coeff in sorted(a.terms.items(), reverse=True):
        factors = [
            names[i] if e == 1 else f"{names[i]}^{e}"
            for i, e in enumerate(exps)
            if e != 0
        ]
        if not factors:
            body = str(abs(coeff))
        else:
            magnitude = "" if abs(coeff) == 1 else f"{abs(coeff)}*"
            body = magnitude + "*".join(factors)
        sign = "-" if coeff < 0 else "+"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        text += f" {sign} {body}"
    return text


def poly_to_json(a: LaurentPoly) -> dict:
    """JSON form with lexicographically sorted terms and string coefficients."""
    return {
        "arity": a.arity,
        "terms": [
            {"e": list(exps), "c": str(coeff)}
            for exps, coeff in sorted(a.terms.items())
        ],
    }


def poly_from_json(data: Mapping) -> LaurentPoly:
    arity = int(data["arity"])
    terms = {tuple(int(e) for e in item["e"]): int(item["c"]) for item in data["terms"]}
    return LaurentPoly(arity, terms)
