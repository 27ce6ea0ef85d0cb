"""Truncated multivariate Taylor arithmetic (jets).

A :class:`Jet` stores the Taylor coefficients of a function around a base
point, truncated per variable *group*: a :class:`JetSpace` is declared as a
tuple of ``(n_vars, max_total_degree)`` groups and keeps every monomial whose
per-group total degree stays within the group cap.  Arithmetic is exact
calculus on the retained coefficients, so derivative extraction carries no
truncation error beyond floating point.

Two layouts cover everything the library needs:

* ``((2, 5),)`` - the two scalar metric arguments (b^2, s) to total order 5;
* ``((n, k), (n, 1))`` - k-th order direction jets together with first-order
  base-point jets, for spray and curvature oracles.

Multiplication is a sparse fused scatter product over a precomputed index
table (see :mod:`finslerlab.backend`).
"""

from __future__ import annotations

import itertools
import math
import threading
from functools import lru_cache

import numpy as np

from . import backend
from .errors import DomainError

_FACT = [math.factorial(k) for k in range(14)]


def _bounded_exponents(nvars, cap):
    if nvars == 0:
        yield ()
        return
    for head in range(cap + 1):
        for tail in _bounded_exponents(nvars - 1, cap - head):
            yield (head,) + tail


class JetSpace:
    """Monomial basis and multiplication table for one truncation layout."""

    def __init__(self, groups):
        self.groups = tuple((int(nv), int(cap)) for nv, cap in groups)
        self.nvars = sum(nv for nv, _ in self.groups)
        self.max_total = sum(cap for _, cap in self.groups)
        slices = []
        off = 0
        for nv, cap in self.groups:
            slices.append((off, off + nv, cap))
            off += nv
        self._gslices = slices
        per_group = [list(_bounded_exponents(nv, cap)) for nv, cap in self.groups]
        exps = sorted(
            (tuple(itertools.chain.from_iterable(combo)) for combo in itertools.product(*per_group)),
            key=lambda e: (sum(e), e),
        )
        self.exps = exps
        self.index = {e: i for i, e in enumerate(exps)}
        self.nmon = len(exps)
        self._mul_table = None
        self._shift_maps = {}
        self._restrict_maps = {}
        self._lock = threading.Lock()

    def __repr__(self):
        return f"JetSpace{self.groups}"

    def _admissible(self, e):
        return all(sum(e[lo:hi]) <= cap for lo, hi, cap in self._gslices)

    def mul_table(self):
        if self._mul_table is None:
            with self._lock:
                if self._mul_table is None:
                    ti, tj, tk = [], [], []
                    for i, ei in enumerate(self.exps):
                        di = sum(ei)
                        for j, ej in enumerate(self.exps):
                            if di + sum(ej) > self.max_total:
                                continue
                            e = tuple(a + b for a, b in zip(ei, ej))
                            k = self.index.get(e)
                            if k is not None and self._admissible(e):
                                ti.append(i)
                                tj.append(j)
                                tk.append(k)
                    self._mul_table = (
                        np.asarray(ti, dtype=np.int64),
                        np.asarray(tj, dtype=np.int64),
                        np.asarray(tk, dtype=np.int64),
                    )
        return self._mul_table

    def shift_map(self, v):
        """Index of each monomial with exponent of variable v raised by one (-1 if outside)."""
        m = self._shift_maps.get(v)
        if m is None:
            m = np.full(self.nmon, -1, dtype=np.int64)
            for i, e in enumerate(self.exps):
                up = e[:v] + (e[v] + 1,) + e[v + 1 :]
                m[i] = self.index.get(up, -1)
            self._shift_maps[v] = m
        return m

    def restrict_map(self, sub):
        """For a subspace over the leading variables, map its monomials into this space."""
        key = sub.groups
        m = self._restrict_maps.get(key)
        if m is None:
            pad = self.nvars - sub.nvars
            if pad < 0:
                raise ValueError("subspace has more variables than parent")
            m = np.empty(sub.nmon, dtype=np.int64)
            for i, e in enumerate(sub.exps):
                full = e + (0,) * pad
                try:
                    m[i] = self.index[full]
                except KeyError:
                    raise ValueError(f"{sub} is not embeddable in {self}") from None
            self._restrict_maps[key] = m
        return m

    def extend(self, extra_groups):
        return jetspace(self.groups + tuple(extra_groups))

    # -- constructors -------------------------------------------------

    def constant(self, value):
        c = np.zeros(self.nmon)
        c[0] = value
        return Jet(self, c)

    def variable(self, v, value):
        c = np.zeros(self.nmon)
        c[0] = value
        c[self.index[tuple(1 if i == v else 0 for i in range(self.nvars))]] = 1.0
        return Jet(self, c)

    def variables(self, values, offset=0):
        return [self.variable(offset + i, float(v)) for i, v in enumerate(values)]


@lru_cache(maxsize=None)
def jetspace(groups):
    return JetSpace(groups)


class Jet:
    __slots__ = ("space", "c")

    def __init__(self, space, coeffs):
        self.space = space
        self.c = coeffs

    @property
    def value(self):
        return self.c[0]

    # -- ring operations ----------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.space is not self.space:
                raise ValueError("jets from different spaces")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return None  # scalar fast path
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = self.c.copy()
            c[0] += other
            return Jet(self.space, c)
        return Jet(self.space, self.c + o.c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, -self.c)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = self.c.copy()
            c[0] -= other
            return Jet(self.space, c)
        return Jet(self.space, self.c - o.c)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.space, self.c * other)
        ti, tj, tk = self.space.mul_table()
        return Jet(self.space, backend.mul(self.c, o.c, ti, tj, tk, self.space.nmon))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            return Jet(self.space, self.c / other)
        return self * o.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)):
            if p < 0:
                return self.reciprocal() ** (-p)
            out = self.space.constant(1.0)
            base = self
            k = int(p)
            while k:
                if k & 1:
                    out = out * base
                base = base * base
                k >>= 1
            return out
        a0 = self.value
        if a0 <= 0.0:
            raise DomainError(f"fractional power of non-positive jet value {a0}")
        derivs = [a0**p]
        for k in range(1, self.space.max_total + 1):
            derivs.append(derivs[-1] * (p - k + 1) / (k * a0))
        return self._compose(derivs)

    # -- analytic functions -------------------------------------------

    def _compose(self, scaled_derivs):
        """Evaluate sum_k scaled_derivs[k] * (self - value)^k by Horner."""
        h = Jet(self.space, self.c.copy())
        h.c[0] = 0.0
        r = self.space.constant(scaled_derivs[-1])
        for k in range(len(scaled_derivs) - 2, -1, -1):
            r = r * h + scaled_derivs[k]
        return r

    def reciprocal(self):
        a0 = self.value
        if a0 == 0.0:
            raise ZeroDivisionError("division by jet with zero value part")
        derivs = [1.0 / a0]
        for _ in range(self.space.max_total):
            derivs.append(-derivs[-1] / a0)
        return self._compose(derivs)

    def sqrt(self):
        a0 = self.value
        if a0 <= 0.0:
            raise DomainError(f"sqrt of non-positive jet value {a0}")
        derivs = [math.sqrt(a0)]
        for k in range(1, self.space.max_total + 1):
            derivs.append(derivs[-1] * (0.5 - (k - 1)) / (k * a0))
        return self._compose(derivs)

    def exp(self):
        e0 = math.exp(self.value)
        derivs = [e0 / _FACT[k] for k in range(self.space.max_total + 1)]
        return self._compose(derivs)

    def log(self):
        a0 = self.value
        if a0 <= 0.0:
            raise DomainError(f"log of non-positive jet value {a0}")
        derivs = [math.log(a0)]
        for k in range(1, self.space.max_total + 1):
            derivs.append((-1.0) ** (k + 1) / (k * a0**k))
        return self._compose(derivs)

    # -- coefficient access -------------------------------------------

    def deriv(self, orders):
        """Partial derivative value at the base point.

        ``orders`` maps variable index to derivative order; requesting an
        order outside the space raises (it would be silently truncated).
        """
        e = [0] * self.space.nvars
        for v, k in orders.items():
            e[v] = k
        idx = self.space.index.get(tuple(e))
        if idx is None:
            raise ValueError(f"derivative {orders} outside jet space {self.space}")
        scale = 1.0
        for k in e:
            scale *= _FACT[k]
        return self.c[idx] * scale

    def partial(self, v, times=1):
        """Jet of the partial derivative with respect to variable v (loses ``times`` orders)."""
        out = self.c
        shift = self.space.shift_map(v)
        valid = shift >= 0
        mult = np.zeros(self.space.nmon)
        for _ in range(times):
            nxt = np.zeros(self.space.nmon)
            mult[valid] = np.array([self.space.exps[s][v] for s in shift[valid]], dtype=float)
            nxt[valid] = out[shift[valid]] * mult[valid]
            out = nxt
        return Jet(self.space, out)

    def without(self, vars_):
        """Copy with every monomial involving any of ``vars_`` zeroed."""
        c = self.c.copy()
        for i, e in enumerate(self.space.exps):
            if any(e[v] for v in vars_):
                c[i] = 0.0
        return Jet(self.space, c)

    def restricted(self, sub):
        """Project onto a subspace over the leading variables."""
        return Jet(sub, self.c[self.space.restrict_map(sub)].copy())

    def lifted(self, big):
        """Embed into a space extending this one with trailing variables."""
        out = np.zeros(big.nmon)
        out[big.restrict_map(self.space)] = self.c
        return Jet(big, out)

    def __repr__(self):
        terms = [f"{c:+.6g}*x^{e}" for e, c in zip(self.space.exps, self.c) if c != 0.0]
        return "Jet(" + (" ".join(terms) or "0") + ")"


# -- scalar-generic helpers (work on floats and jets alike) ------------


def sqrt(x):
    return x.sqrt() if isinstance(x, Jet) else math.sqrt(x)


def exp(x):
    return x.exp() if isinstance(x, Jet) else math.exp(x)


def log(x):
    return x.log() if isinstance(x, Jet) else math.log(x)


def value_of(x):
    return x.value if isinstance(x, Jet) else float(x)


def generic_solve(A, b):
    """Solve a small dense linear system whose entries may be jets.

    Gaussian elimination with partial pivoting on the value parts.  ``A`` is a
    list of row lists, ``b`` a list; both are left untouched.
    """
    n = len(b)
    M = [list(row) for row in A]
    r = list(b)
    for col in range(n):
        piv = max(range(col, n), key=lambda i: abs(value_of(M[i][col])))
        if abs(value_of(M[piv][col])) == 0.0:
            raise ZeroDivisionError("singular system in generic_solve")
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            r[col], r[piv] = r[piv], r[col]
        inv = (
            M[col][col].reciprocal()
            if isinstance(M[col][col], Jet)
            else 1.0 / M[col][col]
        )
        for i in range(col + 1, n):
            f = M[i][col] * inv
            for j in range(col, n):
                M[i][j] = M[i][j] - f * M[col][j]
            r[i] = r[i] - f * r[col]
    out = [None] * n
    for i in range(n - 1, -1, -1):
        acc = r[i]
        for j in range(i + 1, n):
            acc = acc - M[i][j] * out[j]
        out[i] = acc / M[i][i]
    return out
