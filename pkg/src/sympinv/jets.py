"""Truncated power-series scalars carrying derivative data.

`TaylorJet` (one variable) and `MultiJet` (several variables) store Taylor
coefficients c_sigma = d^sigma f / sigma! around a basepoint and implement
exact truncated arithmetic through their order.  Two coefficient modes exist:

* float mode - coefficients in a float64 numpy vector, products dispatched to
  the selected kernel backend;
* exact mode - coefficients in a plain list of objects supporting field
  operations (``fractions.Fraction``, dual numbers, ...), used by the
  exact-rational oracles.

Every downstream invariant evaluator is written against ordinary ``+ - * /``
scalars, so the same formula runs on numbers and on jets of either mode.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from . import _tables
from .errors import (
    BasepointMismatch,
    DivisionByZeroJet,
    DomainError,
    OrderExhausted,
    SingularLinearPart,
)
from .kernels import mul1, mul_table

_DIV_FLOOR = 1e-300  # constant terms below this are machine-degenerate divisors


def _is_plain_number(x):
    return isinstance(x, (int, float, np.integer, np.floating))


def _same_base(a, b, exact):
    if exact:
        return a == b
    return abs(a - b) <= 1e-9 * (1.0 + abs(a) + abs(b))


def _factorial_multi(sigma):
    out = 1
    for e in sigma:
        out *= math.factorial(e)
    return out


# ---------------------------------------------------------------------------
# univariate jets
# ---------------------------------------------------------------------------

class TaylorJet:
    """Univariate truncated series; coeffs[j] = f^(j)(t0)/j!."""

    __slots__ = ("coeffs", "basepoint", "exact")

    def __init__(self, coeffs, basepoint=0.0, exact=None):
        if exact is None:
            exact = not all(_is_plain_number(c) for c in coeffs)
        if exact:
            self.coeffs = list(coeffs)
        else:
            self.coeffs = np.asarray(coeffs, dtype=np.float64)
        self.basepoint = basepoint
        self.exact = exact

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, value, order, basepoint=0.0, exact=False):
        zero = value * 0
        return cls([value] + [zero] * order, basepoint, exact=exact or not _is_plain_number(value))

    @classmethod
    def variable(cls, basepoint, order, exact=False):
        one = Fraction(1) if exact else 1.0
        zero = one * 0
        coeffs = [basepoint] + ([one] + [zero] * (order - 1) if order >= 1 else [])
        return cls(coeffs, basepoint, exact=exact)

    # -- basic queries -------------------------------------------------------

    @property
    def order(self):
        return len(self.coeffs) - 1

    def value(self):
        return self.coeffs[0]

    def derivative_at(self, j):
        """j-th derivative of the represented germ at the basepoint."""
        if j > self.order:
            raise OrderExhausted(f"derivative {j} of an order-{self.order} jet")
        return self.coeffs[j] * math.factorial(j)

    def truncate(self, new_order):
        if new_order >= self.order:
            return self
        return TaylorJet(self.coeffs[: new_order + 1], self.basepoint, exact=self.exact)

    def derivative(self):
        """Jet of f' (one order lower)."""
        if self.order < 1:
            raise OrderExhausted("cannot differentiate an order-0 jet")
        coeffs = [self.coeffs[j] * j for j in range(1, self.order + 1)]
        return TaylorJet(coeffs, self.basepoint, exact=self.exact)

    def __repr__(self):
        return f"TaylorJet({list(self.coeffs)!r}, basepoint={self.basepoint!r})"

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        """Align operands; returns (a_coeffs, b_coeffs, n, exact) or None."""
        if isinstance(other, MultiJet):
            raise TypeError("cannot mix TaylorJet with MultiJet")
        if isinstance(other, TaylorJet):
            if not _same_base(self.basepoint, other.basepoint, self.exact and other.exact):
                raise BasepointMismatch(
                    f"basepoints {self.basepoint!r} and {other.basepoint!r}"
                )
            n = min(self.order, other.order)
            exact = self.exact or other.exact
            a = list(self.coeffs[: n + 1]) if exact else self.coeffs[: n + 1]
            b = list(other.coeffs[: n + 1]) if exact else other.coeffs[: n + 1]
            return a, b, n, exact
        return None

    def _new(self, coeffs, exact):
        return TaylorJet(coeffs, self.basepoint, exact=exact)

    def __add__(self, other):
        pair = self._coerce(other) if isinstance(other, (TaylorJet, MultiJet)) else None
        if pair is not None:
            a, b, n, exact = pair
            if exact:
                return self._new([x + y for x, y in zip(a, b)], True)
            return self._new(a + b, False)
        coeffs = list(self.coeffs) if self.exact else self.coeffs.copy()
        coeffs[0] = coeffs[0] + other
        return self._new(coeffs, self.exact)

    __radd__ = __add__

    def __neg__(self):
        if self.exact:
            return self._new([-c for c in self.coeffs], True)
        return self._new(-self.coeffs, False)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TaylorJet) else -1 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other) if isinstance(other, (TaylorJet, MultiJet)) else None
        if pair is not None:
            a, b, n, exact = pair
            if exact:
                out = []
                for k in range(n + 1):
                    acc = a[0] * b[k]
                    for i in range(1, k + 1):
                        acc = acc + a[i] * b[k - i]
                    out.append(acc)
                return self._new(out, True)
            return self._new(mul1(a, b, n + 1), False)
        if self.exact:
            return self._new([c * other for c in self.coeffs], True)
        return self._new(self.coeffs * float(other), False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TaylorJet):
            return self * other.reciprocal()
        return self * _scalar_reciprocal(other, self.exact)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self):
        c0 = self.coeffs[0]
        if self.exact:
            if c0 == 0:
                raise DivisionByZeroJet("exact divisor with zero constant term")
        elif abs(c0) < _DIV_FLOOR:
            raise DivisionByZeroJet(f"divisor constant term {c0!r}")
        t = self / c0 - 1  # nilpotent
        res = self.constant(_one_like(c0), self.order, self.basepoint, exact=self.exact)
        for _ in range(self.order):
            res = 1 - t * res
        return res / c0

    def __pow__(self, expo):
        return _jet_pow(self, expo)


# ---------------------------------------------------------------------------
# multivariate jets
# ---------------------------------------------------------------------------

class MultiJet:
    """Dense truncated series in several variables over graded-lex monomials."""

    __slots__ = ("nvars", "order", "coeffs", "basepoint", "exact")

    def __init__(self, nvars, order, coeffs, basepoint, exact=None):
        self.nvars = nvars
        self.order = order
        if exact is None:
            exact = not all(_is_plain_number(c) for c in coeffs)
        if exact:
            self.coeffs = list(coeffs)
        else:
            self.coeffs = np.asarray(coeffs, dtype=np.float64)
        if len(self.coeffs) != _tables.count(nvars, order):
            raise ValueError("coefficient vector does not match the dense layout")
        self.basepoint = tuple(basepoint)
        self.exact = exact

    # -- construction -------------------------------------------------------

    @classmethod
    def constant(cls, value, nvars, order, basepoint, exact=False):
        zero = value * 0
        n = _tables.count(nvars, order)
        return cls(nvars, order, [value] + [zero] * (n - 1), basepoint,
                   exact=exact or not _is_plain_number(value))

    @classmethod
    def variable(cls, i, nvars, order, basepoint, exact=False):
        one = Fraction(1) if exact else 1.0
        zero = one * 0
        n = _tables.count(nvars, order)
        coeffs = [zero] * n
        coeffs[0] = basepoint[i]
        if order >= 1:
            pos = _tables.index_of(nvars, order)[
                tuple(1 if k == i else 0 for k in range(nvars))
            ]
            coeffs[pos] = one
        return cls(nvars, order, coeffs, basepoint, exact=exact)

    @classmethod
    def from_partials(cls, partials, nvars, order, basepoint, exact=False):
        """Build from a map multi-index -> partial derivative value."""
        n = _tables.count(nvars, order)
        zero = Fraction(0) if exact else 0.0
        coeffs = [zero] * n
        pos = _tables.index_of(nvars, order)
        for sigma, val in partials.items():
            fac = _factorial_multi(sigma)
            if exact and isinstance(val, (int, Fraction)):
                coeffs[pos[tuple(sigma)]] = Fraction(val, fac)
            else:
                coeffs[pos[tuple(sigma)]] = val / fac
        return cls(nvars, order, coeffs, basepoint, exact=exact)

    # -- queries --------------------------------------------------------------

    def value(self):
        return self.coeffs[0]

    def coefficient(self, sigma):
        return self.coeffs[_tables.index_of(self.nvars, self.order)[tuple(sigma)]]

    def partial_at(self, sigma):
        """Partial derivative d^sigma f at the basepoint."""
        if sum(sigma) > self.order:
            raise OrderExhausted(f"partial {sigma} of an order-{self.order} jet")
        return self.coefficient(sigma) * _factorial_multi(sigma)

    def truncate(self, new_order):
        if new_order >= self.order:
            return self
        n = _tables.count(self.nvars, new_order)
        return MultiJet(self.nvars, new_order, self.coeffs[:n], self.basepoint,
                        exact=self.exact)

    def partial(self, direction):
        """Jet of df/dx_direction (one order lower)."""
        if self.order < 1:
            raise OrderExhausted("cannot differentiate an order-0 jet")
        src, dst, mult = _tables.partial_table(self.nvars, self.order, direction)
        n = _tables.count(self.nvars, self.order - 1)
        if self.exact:
            zero = _zero_like(self.coeffs[0])
            out = [zero] * n
            for s, d, m in zip(src, dst, mult):
                out[d] = out[d] + self.coeffs[s] * int(m)
            return MultiJet(self.nvars, self.order - 1, out, self.basepoint, exact=True)
        out = np.zeros(n)
        out[dst] = self.coeffs[src] * mult
        return MultiJet(self.nvars, self.order - 1, out, self.basepoint, exact=False)

    def restrict_to_var(self, i):
        """Univariate jet along variable i (others frozen at the basepoint)."""
        coeffs = []
        pos = _tables.index_of(self.nvars, self.order)
        for j in range(self.order + 1):
            sigma = tuple(j if k == i else 0 for k in range(self.nvars))
            coeffs.append(self.coeffs[pos[sigma]])
        return TaylorJet(coeffs, self.basepoint[i], exact=self.exact)

    def __repr__(self):
        return (f"MultiJet(nvars={self.nvars}, order={self.order}, "
                f"basepoint={self.basepoint!r})")

    # -- arithmetic -----------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, TaylorJet):
            raise TypeError("cannot mix MultiJet with TaylorJet")
        if isinstance(other, MultiJet):
            if other.nvars != self.nvars:
                raise TypeError("variable counts differ")
            exact = self.exact or other.exact
            if not all(_same_base(a, b, exact)
                       for a, b in zip(self.basepoint, other.basepoint)):
                raise BasepointMismatch(
                    f"basepoints {self.basepoint!r} and {other.basepoint!r}"
                )
            n_ord = min(self.order, other.order)
            a = self.truncate(n_ord)
            b = other.truncate(n_ord)
            return a, b, n_ord, exact
        return None

    def _new(self, coeffs, order, exact):
        return MultiJet(self.nvars, order, coeffs, self.basepoint, exact=exact)

    def __add__(self, other):
        pair = self._coerce(other) if isinstance(other, (TaylorJet, MultiJet)) else None
        if pair is not None:
            a, b, n_ord, exact = pair
            if exact:
                return self._new([x + y for x, y in zip(list(a.coeffs), list(b.coeffs))],
                                 n_ord, True)
            return self._new(a.coeffs + b.coeffs, n_ord, False)
        coeffs = list(self.coeffs) if self.exact else self.coeffs.copy()
        coeffs[0] = coeffs[0] + other
        return self._new(coeffs, self.order, self.exact)

    __radd__ = __add__

    def __neg__(self):
        if self.exact:
            return self._new([-c for c in self.coeffs], self.order, True)
        return self._new(-self.coeffs, self.order, False)

    def __sub__(self, other):
        return self + (-other if isinstance(other, MultiJet) else -1 * other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other) if isinstance(other, (TaylorJet, MultiJet)) else None
        if pair is not None:
            a, b, n_ord, exact = pair
            pi, pj, pr = _tables.product_table(self.nvars, n_ord)
            if exact:
                ac, bc = a.coeffs, b.coeffs
                zero = _zero_like(ac[0] * bc[0])
                out = [zero] * _tables.count(self.nvars, n_ord)
                for i, j, r in zip(pi, pj, pr):
                    out[r] = out[r] + ac[i] * bc[j]
                return self._new(out, n_ord, True)
            n = _tables.count(self.nvars, n_ord)
            return self._new(mul_table(a.coeffs, b.coeffs, pi, pj, pr, n), n_ord, False)
        if self.exact:
            return self._new([c * other for c in self.coeffs], self.order, True)
        return self._new(self.coeffs * float(other), self.order, False)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, MultiJet):
            return self * other.reciprocal()
        return self * _scalar_reciprocal(other, self.exact)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self):
        c0 = self.coeffs[0]
        if self.exact:
            if c0 == 0:
                raise DivisionByZeroJet("exact divisor with zero constant term")
        elif abs(c0) < _DIV_FLOOR:
            raise DivisionByZeroJet(f"divisor constant term {c0!r}")
        t = self / c0 - 1
        res = self.constant(_one_like(c0), self.nvars, self.order, self.basepoint,
                            exact=self.exact)
        for _ in range(self.order):
            res = 1 - t * res
        return res / c0

    def __pow__(self, expo):
        return _jet_pow(self, expo)


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------

def _zero_like(x):
    return x * 0


def _scalar_reciprocal(x, exact):
    if isinstance(x, (int, Fraction)) and exact:
        return Fraction(1, 1) / x
    if hasattr(x, "reciprocal"):
        return x.reciprocal()
    return 1.0 / float(x)


def _one_like(x):
    if isinstance(x, Fraction):
        return Fraction(1)
    if _is_plain_number(x):
        return 1.0
    return x * 0 + 1


def _const_like(jet, value):
    if isinstance(jet, TaylorJet):
        return TaylorJet.constant(value, jet.order, jet.basepoint, exact=jet.exact)
    return MultiJet.constant(value, jet.nvars, jet.order, jet.basepoint, exact=jet.exact)


def _horner(jet_h, series_coeffs):
    """Sum series_coeffs[k] * jet_h^k, jet_h nilpotent, by Horner from the top."""
    res = _const_like(jet_h, series_coeffs[-1])
    for c in reversed(series_coeffs[:-1]):
        res = res * jet_h + c
    return res


def _jet_pow(x, expo):
    if isinstance(expo, (int, np.integer)):
        expo = int(expo)
        if expo < 0:
            return x.reciprocal() ** (-expo)
        res = _const_like(x, _one_like(x.coeffs[0]))
        base = x
        while expo:
            if expo & 1:
                res = res * base
            base = base * base if expo > 1 else base
            expo >>= 1
        return res
    if isinstance(expo, Fraction):
        if expo.denominator == 1:
            return x ** int(expo)
        return _binomial_series(x, expo)
    if isinstance(expo, float) and float(expo).is_integer():
        return x ** int(expo)
    raise DomainError(f"unsupported exponent {expo!r}: integer or Fraction required")


def _nth_root_scalar(c0, q, exact):
    """Real q-th root of the constant term; exact mode demands a perfect power."""
    if exact:
        fr = Fraction(c0)
        if fr < 0 and q % 2 == 0:
            raise DomainError("even root of a negative constant term")
        sign = -1 if fr < 0 else 1
        num = _int_root(abs(fr.numerator), q)
        den = _int_root(fr.denominator, q)
        if num is None or den is None:
            raise DomainError(
                f"{c0!r} is not a perfect {q}-th power; exact mode needs one"
            )
        return Fraction(sign * num, den)
    c0 = float(c0)
    if c0 < 0:
        if q % 2 == 0:
            raise DomainError("even root of a negative constant term")
        return -((-c0) ** (1.0 / q))
    return c0 ** (1.0 / q)


def _int_root(n, q):
    if n == 0:
        return 0
    r = round(n ** (1.0 / q))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**q == n:
            return cand
    return None


def _binomial_series(x, expo):
    """x**expo for a non-integer rational exponent via (1+h)^expo around c0."""
    c0 = x.coeffs[0]
    exact = x.exact
    if exact:
        if c0 == 0:
            raise DomainError("rational power of a jet with zero constant term")
        root = _nth_root_scalar(c0, expo.denominator, True)
        lead = root ** expo.numerator
    else:
        if abs(c0) < _DIV_FLOOR:
            raise DomainError("rational power of a jet with zero constant term")
        if c0 < 0 and expo.denominator % 2 == 0:
            raise DomainError("even root of a negative constant term")
        root = _nth_root_scalar(c0, expo.denominator, False)
        lead = root ** expo.numerator
    order = x.order
    h = x / c0 - 1
    coeffs = _binomial_coeffs(expo, order, exact)
    return _horner(h, coeffs) * lead


def _binomial_coeffs(expo, order, exact):
    """binom(expo, k) for k = 0..order in the requested scalar mode."""
    one = Fraction(1) if exact else 1.0
    e = expo if exact else float(expo)
    coeffs = [one]
    acc = one
    for k in range(1, order + 1):
        acc = acc * (e - (k - 1)) / k
        coeffs.append(acc)
    return coeffs


def _is_jet(x):
    return isinstance(x, (TaylorJet, MultiJet))


def _analytic(x, float_fn, series_fn, exact_ok=False, name=""):
    if _is_jet(x):
        if x.exact and not exact_ok:
            raise DomainError(f"{name} is not available in exact mode")
        c0 = x.coeffs[0]
        coeffs = series_fn(c0, x.order, x.exact)
        return _horner(x - c0, coeffs)
    if isinstance(x, Fraction) and not exact_ok:
        raise DomainError(f"{name} is not available in exact mode")
    return float_fn(float(x))


def exp(x):
    def series(c0, order, exact):
        e0 = math.exp(float(c0))
        return [e0 / math.factorial(k) for k in range(order + 1)]
    return _analytic(x, math.exp, series, name="exp")


def log(x):
    def series(c0, order, exact):
        c0 = float(c0)
        if c0 <= 0:
            raise DomainError("log of a non-positive constant term")
        out = [math.log(c0)]
        for k in range(1, order + 1):
            out.append((-1) ** (k + 1) / (k * c0**k))
        return out
    if not _is_jet(x) and float(x) <= 0:
        raise DomainError("log of a non-positive argument")
    return _analytic(x, math.log, series, name="log")


def sin(x):
    def series(c0, order, exact):
        s, c = math.sin(float(c0)), math.cos(float(c0))
        cycle = [s, c, -s, -c]
        return [cycle[k % 4] / math.factorial(k) for k in range(order + 1)]
    return _analytic(x, math.sin, series, name="sin")


def cos(x):
    def series(c0, order, exact):
        s, c = math.sin(float(c0)), math.cos(float(c0))
        cycle = [c, -s, -c, s]
        return [cycle[k % 4] / math.factorial(k) for k in range(order + 1)]
    return _analytic(x, math.cos, series, name="cos")


def sqrt(x):
    if _is_jet(x):
        if not x.exact and float(x.coeffs[0]) < 0:
            raise DomainError("sqrt of a negative constant term")
        return _binomial_series(x, Fraction(1, 2))
    if isinstance(x, Fraction):
        return _nth_root_scalar(x, 2, True)
    if float(x) < 0:
        raise DomainError("sqrt of a negative argument")
    return math.sqrt(float(x))


def cbrt(x):
    if _is_jet(x):
        c0 = x.coeffs[0]
        if x.exact:
            lead = _nth_root_scalar(c0, 3, True)
        else:
            if abs(float(c0)) < _DIV_FLOOR:
                raise DomainError("cbrt of a jet with zero constant term")
            lead = _nth_root_scalar(float(c0), 3, False)
        h = x / c0 - 1
        coeffs = _binomial_coeffs(Fraction(1, 3), x.order, x.exact)
        return _horner(h, coeffs) * lead
    if isinstance(x, Fraction):
        return _nth_root_scalar(x, 3, True)
    return _nth_root_scalar(float(x), 3, False)


# ---------------------------------------------------------------------------
# composition and inversion
# ---------------------------------------------------------------------------

def compose(outer, inner):
    """Jet of outer(inner(t)); inner's value must equal outer's basepoint."""
    if isinstance(outer, MultiJet):
        raise TypeError("use compose_multi for multivariate outer jets")
    exact = outer.exact or inner.exact
    if not _same_base(inner.value(), outer.basepoint, exact):
        raise BasepointMismatch(
            f"inner value {inner.value()!r} != outer basepoint {outer.basepoint!r}"
        )
    order = min(outer.order, inner.order)
    h = (inner - inner.value()).truncate(order)
    coeffs = list(outer.coeffs[: order + 1])
    return _horner(h, coeffs)


def compose_multi(outer, inners):
    """Jet of outer(g_1(y),...,g_p(y)) for MultiJet outer in p variables."""
    inners = list(inners)
    if len(inners) != outer.nvars:
        raise TypeError(f"outer expects {outer.nvars} inner jets, got {len(inners)}")
    exact = outer.exact or any(g.exact for g in inners)
    for bp, g in zip(outer.basepoint, inners):
        if not _same_base(g.value(), bp, exact):
            raise BasepointMismatch(
                f"inner value {g.value()!r} != outer basepoint coordinate {bp!r}"
            )
    order = min([outer.order] + [g.order for g in inners])
    hs = [(g - g.value()).truncate(order) for g in inners]
    mons = _tables.monomials(outer.nvars, outer.order)
    acc = _const_like(hs[0], outer.coeffs[0])
    memo = {}
    for pos_idx, sigma in enumerate(mons):
        deg = sum(sigma)
        if deg == 0 or deg > order:
            continue
        first = next(k for k, e in enumerate(sigma) if e > 0)
        parent = tuple(e - 1 if k == first else e for k, e in enumerate(sigma))
        if sum(parent) == 0:
            mono_jet = hs[first]
        else:
            mono_jet = memo[parent] * hs[first]
        memo[sigma] = mono_jet
        c = outer.coeffs[pos_idx]
        if not exact and c == 0.0:
            continue
        acc = acc + mono_jet * c
    return acc


def _linear_part_matrix(jets):
    p = len(jets)
    pos = _tables.index_of(p, jets[0].order)
    rows = []
    for s in jets:
        rows.append([s.coeffs[pos[tuple(1 if k == j else 0 for k in range(p))]]
                     for j in range(p)])
    return rows


def invert_series(s):
    """Inverse of a jet map through its order.

    Accepts a single TaylorJet (p = 1) or a sequence of p MultiJets in p
    variables; returns the jet(s) of the inverse map centered at the image
    point, so compose(s, invert_series(s)) is the identity through order K.
    """
    if isinstance(s, TaylorJet):
        inv = _invert_multi([_taylor_to_multi(s)])
        return inv[0].restrict_to_var(0)
    return _invert_multi(list(s))


def _taylor_to_multi(t):
    n = _tables.count(1, t.order)
    assert n == t.order + 1
    return MultiJet(1, t.order, list(t.coeffs), (t.basepoint,), exact=t.exact)


def _invert_multi(jets):
    p = len(jets)
    if any(g.nvars != p for g in jets):
        raise TypeError("need p jets in p variables")
    order = min(g.order for g in jets)
    jets = [g.truncate(order) for g in jets]
    exact = any(g.exact for g in jets)
    a = jets[0].basepoint
    b = tuple(g.value() for g in jets)
    lin = _linear_part_matrix(jets)
    linv = _invert_matrix(lin, exact)

    # target-space coordinate jets
    ys = [MultiJet.variable(j, p, order, b, exact=exact) for j in range(p)]
    y_shift = [ys[j] - b[j] for j in range(p)]

    def affine_step(rhs):
        out = []
        for i in range(p):
            acc = _const_like(rhs[0], a[i])
            for j in range(p):
                acc = acc + rhs[j] * linv[i][j]
            out.append(acc)
        return out

    # nonlinear parts N_i = s_i - b_i - L(x - a)
    xs = [MultiJet.variable(j, p, order, a, exact=exact) for j in range(p)]
    n_parts = []
    for i in range(p):
        lin_i = _const_like(xs[0], b[i] * 0)
        for j in range(p):
            lin_i = lin_i + (xs[j] - a[j]) * lin[i][j]
        n_parts.append(jets[i] - b[i] - lin_i)

    t_cur = affine_step(y_shift)
    for _ in range(max(order - 1, 0)):
        n_of_t = [compose_multi(n_parts[i], t_cur) for i in range(p)]
        t_cur = affine_step([y_shift[j] - n_of_t[j] for j in range(p)])
    return t_cur


def _invert_matrix(rows, exact):
    p = len(rows)
    if not exact:
        mat = np.asarray(rows, dtype=np.float64)
        sv = np.linalg.svd(mat, compute_uv=False)
        if sv[-1] <= 1e-12 * max(sv[0], 1e-300):
            raise SingularLinearPart(f"relative smallest singular value {sv[-1]/max(sv[0],1e-300):.3e}")
        return np.linalg.inv(mat).tolist()
    # exact Gauss-Jordan; pivots must be invertible (nonzero "real" part for
    # dual numbers), but elimination must clear every nonzero entry including
    # pure-epsilon ones
    aug = [list(r) + [_one_like(r[0]) if i == j else _zero_like(r[0])
                      for j in range(p)] for i, r in enumerate(rows)]
    for col in range(p):
        piv = None
        for r in range(col, p):
            if not _exact_is_zero(aug[r][col]):
                piv = r
                break
        if piv is None:
            raise SingularLinearPart("exact linear part is singular")
        aug[col], aug[piv] = aug[piv], aug[col]
        pval = aug[col][col]
        aug[col] = [v / pval for v in aug[col]]
        for r in range(p):
            if r != col and not _fully_zero(aug[r][col]):
                f = aug[r][col]
                aug[r] = [v - f * w for v, w in zip(aug[r], aug[col])]
    return [row[p:] for row in aug]


def _exact_is_zero(x):
    """Not invertible in the exact scalar ring (zero real part)."""
    re = getattr(x, "re", x)
    return re == 0


def _fully_zero(x):
    return x == 0 or (getattr(x, "re", 1) == 0 and getattr(x, "eps", 1) == 0)


def total_derivative(f, direction=0):
    """Total derivative along one base variable of a graph-restricted jet.

    On jets whose dependent-variable data is already substituted this realizes
    the total derivative operator, since d/dx_i sees the full chain.
    """
    if isinstance(f, TaylorJet):
        return f.derivative()
    return f.partial(direction)
