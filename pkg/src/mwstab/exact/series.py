"""Sparse truncated series in (a, mu, lambda) with exact coefficients.

Three layers share one bookkeeping scheme:

* :class:`ScalarSeries` - keys ``(p, q, r, im)``: a-power, mu-power,
  lambda-power, and the imaginary marker (``im = 1`` means the term
  carries one factor of ``i``; ``i*i`` folds into the sign).
* :class:`TrigPolySeries` - scalar keys extended by a harmonic ``(n, par)``
  with ``par = 0`` for cos (``n = 0`` is the constant) and ``1`` for sin.
* :class:`OperatorSeries` - trig keys extended by a derivative order ``s``;
  a term is ``coeff * a^p mu^q lambda^r i^im * trig(nz) * d^s/dz^s`` in
  canonical form (multiplication to the left of the derivative).

Terms whose a- or mu-power exceeds the truncation caps are dropped on
insertion; everything kept is exact.  Lambda stays linear at the operator
level and quadratic after the 2x2 determinant.
"""

from fractions import Fraction

from .ring import Coeff

__all__ = ["ScalarSeries", "TrigPolySeries", "OperatorSeries",
           "ExactEngineError", "DEFAULT_CAPS"]

DEFAULT_CAPS = (2, 2)


class ExactEngineError(ArithmeticError):
    """Internal consistency failure of the exact engine."""


def _coeff(value):
    if isinstance(value, Coeff):
        return value
    if isinstance(value, (int, Fraction)):
        return Coeff.rational(value)
    raise TypeError(f"expected Coeff/int/Fraction, got {type(value).__name__}")


def _combine_im(im1, im2):
    """i^im1 * i^im2 -> (sign, im)."""
    total = im1 + im2
    if total == 2:
        return -1, 0
    return 1, total


class _Series:
    """Shared sparse-dict plumbing; subclasses fix the key layout."""

    __slots__ = ("terms", "caps")
    KEY_LEN = None
    MAX_R = 2

    def __init__(self, caps=DEFAULT_CAPS, terms=None):
        self.caps = tuple(caps)
        self.terms = {}
        if terms:
            for key, val in terms.items():
                self._insert(key, val)

    def _insert(self, key, coeff):
        coeff = _coeff(coeff)
        if coeff.is_zero():
            return
        if len(key) != self.KEY_LEN:
            raise ValueError(f"bad key length for {type(self).__name__}")
        p, q, r, im = key[:4]
        if p < 0 or q < 0:
            raise ExactEngineError("negative a- or mu-power")
        if r > self.MAX_R:
            raise ExactEngineError(
                f"lambda power {r} exceeds limit {self.MAX_R}")
        if im not in (0, 1):
            raise ExactEngineError("imaginary marker must be 0 or 1")
        if p > self.caps[0] or q > self.caps[1]:
            return  # truncated
        new = self.terms.get(key, Coeff.zero()) + coeff
        if new.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    # ----- linear structure ------------------------------------------------

    def _empty(self):
        return type(self)(caps=self.caps)

    def copy(self, caps=None):
        out = type(self)(caps=caps or self.caps)
        for key, val in self.terms.items():
            out._insert(key, val)
        return out

    def __add__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        out = self.copy()
        for key, val in other.terms.items():
            out._insert(key, val)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, coeff, dp=0, dq=0, dr=0, dim=0):
        """Multiply by ``coeff * a^dp mu^dq lambda^dr i^dim``."""
        coeff = _coeff(coeff)
        out = self._empty()
        for key, val in self.terms.items():
            p, q, r, im = key[:4]
            sign, new_im = _combine_im(im, dim)
            new_key = (p + dp, q + dq, r + dr, new_im) + key[4:]
            out._insert(new_key, val * coeff * sign)
        return out

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def sorted_items(self):
        return sorted(self.terms.items(), key=lambda item: item[0])

    def __repr__(self):
        return (f"{type(self).__name__}({len(self.terms)} terms, "
                f"caps={self.caps})")


class ScalarSeries(_Series):
    """Polynomial in (a, mu, lambda, i) with Coeff coefficients."""

    KEY_LEN = 4

    @classmethod
    def term(cls, coeff, p=0, q=0, r=0, im=0, caps=DEFAULT_CAPS):
        out = cls(caps=caps)
        out._insert((p, q, r, im), coeff)
        return out

    @classmethod
    def one(cls, caps=DEFAULT_CAPS):
        return cls.term(Coeff.one(), caps=caps)

    def __mul__(self, other):
        if not isinstance(other, ScalarSeries):
            return NotImplemented
        out = self._empty()
        for (p1, q1, r1, im1), c1 in self.terms.items():
            for (p2, q2, r2, im2), c2 in other.terms.items():
                sign, im = _combine_im(im1, im2)
                out._insert((p1 + p2, q1 + q2, r1 + r2, im),
                            c1 * c2 * sign)
        return out

    def inverse(self):
        """Series inverse within the truncation caps.

        Requires an invertible constant term (a monomial without gamma);
        valid because the correction is nilpotent under truncation.
        """
        unit = self.terms.get((0, 0, 0, 0))
        if unit is None:
            raise ExactEngineError("cannot invert a series without unit term")
        inv_unit = unit.reciprocal()
        normalized = self.scale(inv_unit)
        correction = normalized - ScalarSeries.one(caps=self.caps)
        result = ScalarSeries.one(caps=self.caps)
        power = ScalarSeries.one(caps=self.caps)
        sign = 1
        for _ in range(self.caps[0] + self.caps[1] + 2):
            power = power * correction
            if power.is_zero():
                break
            sign = -sign
            result = result + power.scale(sign)
        else:
            raise ExactEngineError("series inverse did not terminate")
        return result.scale(inv_unit)

    def coefficient(self, p, q, r=0, im=0):
        return self.terms.get((p, q, r, im), Coeff.zero())

    def lambda_part(self, r):
        """Terms of the given lambda power, with the power stripped."""
        out = self._empty()
        for (p, q, rr, im), val in self.terms.items():
            if rr == r:
                out._insert((p, q, 0, im), val)
        return out

    def strip_i(self):
        """Divide by i: requires every term to carry the marker."""
        out = self._empty()
        for (p, q, r, im), val in self.terms.items():
            if im != 1:
                raise ExactEngineError("series is not purely imaginary")
            out._insert((p, q, r, 0), val)
        return out

    def require_real(self):
        for key in self.terms:
            if key[3] != 0:
                raise ExactEngineError("series is not real")
        return self

    def mu_divide(self, power):
        """Exact division by mu^power; parity guarantees divisibility."""
        out = self._empty()
        for (p, q, r, im), val in self.terms.items():
            if q < power:
                raise ExactEngineError(
                    f"term mu^{q} not divisible by mu^{power} "
                    "(parity violation)")
            out._insert((p, q - power, r, im), val)
        return out

    def evalf(self, a, mu, k, gamma=0.0):
        """Numeric value; defined for series without lambda or i content."""
        total = 0.0
        for (p, q, r, im), val in self.terms.items():
            if r or im:
                raise ExactEngineError("evalf needs a real lambda-free series")
            total += val.evalf(k, gamma) * a**p * mu**q
        return total


_BASIS_TAGS = {
    "1": (0, 0), "cos1": (1, 0), "sin1": (1, 1), "cos2": (2, 0),
    "sin2": (2, 1), "cos3": (3, 0), "sin3": (3, 1),
}


def _trig_product(n1, par1, n2, par2):
    """Product-to-sum rules; returns [(Fraction, n, par)]."""
    if n1 == 0:
        return [(Fraction(1), n2, par2)]
    if n2 == 0:
        return [(Fraction(1), n1, par1)]
    half = Fraction(1, 2)
    total, diff = n1 + n2, n1 - n2
    if par1 == 0 and par2 == 0:
        return [(half, abs(diff), 0), (half, total, 0)]
    if par1 == 1 and par2 == 1:
        return [(half, abs(diff), 0), (-half, total, 0)]
    out = [(half, total, 1)]
    # sin(diff) with the sign convention of the two mixed cases
    sign = half if par1 == 1 else -half
    if diff > 0:
        out.append((sign, diff, 1))
    elif diff < 0:
        out.append((-sign, -diff, 1))
    return out


def _deriv_tag(n, par, order):
    """d^order/dz^order of cos(nz)/sin(nz) -> (Fraction, n, par) or None."""
    coeff = Fraction(1)
    for _ in range(order):
        if n == 0:
            return None
        if par == 0:
            coeff *= -n
            par = 1
        else:
            coeff *= n
            par = 0
    return coeff, n, par


class TrigPolySeries(_Series):
    """Trigonometric polynomial whose coefficients are scalar-series terms."""

    KEY_LEN = 6

    @classmethod
    def term(cls, coeff, p=0, q=0, r=0, im=0, n=0, par=0, caps=DEFAULT_CAPS):
        if n == 0 and par == 1:
            return cls(caps=caps)  # sin(0z) vanishes
        out = cls(caps=caps)
        out._insert((p, q, r, im, n, par), coeff)
        return out

    @classmethod
    def basis(cls, tag, caps=DEFAULT_CAPS):
        n, par = _BASIS_TAGS[tag]
        return cls.term(Coeff.one(), n=n, par=par, caps=caps)

    def inner(self, other):
        """Torus-average pairing against a real trig series.

        Matching harmonics pair with weight 1 (constant) or 1/2; valid as
        the L2 inner product because the second factor is real.
        """
        if not isinstance(other, TrigPolySeries):
            raise TypeError("inner expects a TrigPolySeries")
        out = ScalarSeries(caps=self.caps)
        for (p1, q1, r1, im1, n1, par1), c1 in self.terms.items():
            for (p2, q2, r2, im2, n2, par2), c2 in other.terms.items():
                if (n1, par1) != (n2, par2):
                    continue
                weight = Fraction(1) if n1 == 0 else Fraction(1, 2)
                sign, im = _combine_im(im1, im2)
                out._insert((p1 + p2, q1 + q2, r1 + r2, im),
                            c1 * c2 * weight * sign)
        return out

    def harmonic(self, n, par, p=None, q=None, r=0, im=0):
        """Collect the coefficient of one harmonic (optionally filtered)."""
        total = Coeff.zero()
        for (tp, tq, tr, tim, tn, tpar), val in self.terms.items():
            if (tn, tpar) != (n, par) or (tr, tim) != (r, im):
                continue
            if p is not None and tp != p:
                continue
            if q is not None and tq != q:
                continue
            total = total + val
        return total


class OperatorSeries(_Series):
    """Differential operator in canonical ``trig * d^s`` form, s <= 2."""

    KEY_LEN = 7
    MAX_R = 1
    MAX_S = 2

    def _insert(self, key, coeff):
        if len(key) == self.KEY_LEN and key[6] > self.MAX_S:
            raise ExactEngineError(
                f"derivative order {key[6]} exceeds limit {self.MAX_S}")
        if len(key) == self.KEY_LEN and key[4] == 0 and key[5] == 1:
            return  # sin(0z) factor
        super()._insert(key, coeff)

    @classmethod
    def term(cls, coeff, p=0, q=0, r=0, im=0, n=0, par=0, s=0,
             caps=DEFAULT_CAPS):
        out = cls(caps=caps)
        out._insert((p, q, r, im, n, par, s), coeff)
        return out

    def add_term(self, coeff, p=0, q=0, r=0, im=0, n=0, par=0, s=0):
        """In-place accumulation helper used by the model builders."""
        self._insert((p, q, r, im, n, par, s), coeff)

    def add_deriv2_of_product(self, coeff, p, n, par, r=0):
        """Canonical expansion of ``coeff * d^2/dz^2 ( trig(nz) * . )``.

        Leibniz: ``f d'' + 2 f' d' + f''`` for ``f = trig(nz)``.
        """
        self.add_term(coeff, p=p, r=r, n=n, par=par, s=2)
        first = _deriv_tag(n, par, 1)
        if first is not None:
            fc, fn, fpar = first
            self.add_term(coeff * (2 * fc), p=p, r=r, n=fn, par=fpar, s=1)
        second = _deriv_tag(n, par, 2)
        if second is not None:
            sc, sn, spar = second
            self.add_term(coeff * sc, p=p, r=r, n=sn, par=spar, s=0)

    def commutator_z(self):
        """Commutator with multiplication by z: ``[f d^s, z] = s f d^(s-1)``.

        Well defined on the torus even though z itself is not periodic.
        """
        out = self._empty()
        for (p, q, r, im, n, par, s), val in self.terms.items():
            if s == 0:
                continue
            out._insert((p, q, r, im, n, par, s - 1), val * s)
        return out

    def apply(self, func):
        """Apply the operator to a derivative-free trig polynomial."""
        if isinstance(func, str):
            func = TrigPolySeries.basis(func, caps=self.caps)
        out = TrigPolySeries(caps=self.caps)
        for (p1, q1, r1, im1, n1, par1, s), c1 in self.terms.items():
            for (p2, q2, r2, im2, n2, par2), c2 in func.terms.items():
                deriv = _deriv_tag(n2, par2, s)
                if deriv is None:
                    continue
                dcoeff, dn, dpar = deriv
                sign, im = _combine_im(im1, im2)
                base = c1 * c2 * dcoeff * sign
                for frac, n, par in _trig_product(n1, par1, dn, dpar):
                    if n == 0 and par == 1:
                        continue
                    out._insert((p1 + p2, q1 + q2, r1 + r2, im, n, par),
                                base * frac)
        return out
