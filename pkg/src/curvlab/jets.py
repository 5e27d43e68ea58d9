"""Truncated multivariate Taylor arithmetic ("jets") up to order 3.

A :class:`Jet3` stores the raw partial derivatives ``d^alpha f(x0)`` for every
multi-index ``|alpha| <= order`` (not Taylor coefficients: no ``1/alpha!``).
Coefficients live on the last axis of ``Jet3.coeffs``; any leading axes are
tensor axes, so one ``Jet3`` can hold a whole tensor of jets and all
arithmetic broadcasts over them.

Multi-indices are stored in graded order (total degree first, then
lexicographic), which makes truncation to a lower order a prefix slice.
"""

from __future__ import annotations

import functools
import itertools
import math
import string

import numpy as np

from .errors import InputError, SingularEvaluationError

MAX_ORDER = 3

UNARY_FUNCTIONS = ("neg", "sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "tanh", "pow")


def _multi_indices(dim, order):
    out = []
    for degree in range(order + 1):
        level = []
        for combo in itertools.combinations_with_replacement(range(dim), degree):
            alpha = [0] * dim
            for i in combo:
                alpha[i] += 1
            level.append(tuple(alpha))
        out.extend(sorted(level, reverse=True))
    return tuple(out)


class JetSpace:
    """Index bookkeeping and the Leibniz product table for one (dim, order)."""

    def __init__(self, dim, order):
        if dim < 1:
            raise InputError(f"jet dimension must be positive, got {dim}")
        if not 0 <= order <= MAX_ORDER:
            raise InputError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
        self.dim = dim
        self.order = order
        self.multi_indices = _multi_indices(dim, order)
        self.size = len(self.multi_indices)
        self.index = {alpha: k for k, alpha in enumerate(self.multi_indices)}
        self.degree = np.array([sum(a) for a in self.multi_indices])

        table = np.zeros((self.size, self.size, self.size))
        for c, gamma in enumerate(self.multi_indices):
            for alpha in itertools.product(*(range(g + 1) for g in gamma)):
                beta = tuple(g - a for g, a in zip(gamma, alpha))
                weight = 1
                for g, a in zip(gamma, alpha):
                    weight *= math.comb(g, a)
                table[self.index[alpha], self.index[beta], c] = weight
        self.product_table = table

        # shift[m][c] = position (in this space) of multi-index(c) + e_m, for c of
        # the order-1 space; used to read off first partial derivatives as jets.
        if order > 0:
            lower = _multi_indices(dim, order - 1)
            self.shift = np.array(
                [[self.index[tuple(a + (i == m) for i, a in enumerate(alpha))] for alpha in lower]
                 for m in range(dim)]
            )
        else:
            self.shift = None

    def __repr__(self):
        return f"JetSpace(dim={self.dim}, order={self.order}, size={self.size})"


@functools.lru_cache(maxsize=None)
def jet_space(dim, order):
    return JetSpace(dim, order)


def n_coefficients(dim, order):
    """Number of multi-indices with ``|alpha| <= order`` in ``dim`` variables."""
    return math.comb(dim + order, order)


class Jet3:
    """Jet (or tensor of jets) of raw partial derivatives through ``order``."""

    __slots__ = ("dim", "order", "coeffs")
    __array_priority__ = 1000

    def __init__(self, coeffs, dim, order):
        coeffs = np.asarray(coeffs, dtype=float)
        space = jet_space(dim, order)
        if coeffs.ndim == 0 or coeffs.shape[-1] != space.size:
            raise InputError(
                f"jet of dim {dim}, order {order} needs {space.size} coefficients on the last axis, "
                f"got shape {coeffs.shape}"
            )
        self.dim = dim
        self.order = order
        self.coeffs = coeffs

    # -- constructors ------------------------------------------------------

    @classmethod
    def constant(cls, value, dim, order):
        value = np.asarray(value, dtype=float)
        coeffs = np.zeros(value.shape + (n_coefficients(dim, order),))
        coeffs[..., 0] = value
        return cls(coeffs, dim, order)

    @classmethod
    def zeros(cls, shape, dim, order):
        return cls(np.zeros(tuple(shape) + (n_coefficients(dim, order),)), dim, order)

    @classmethod
    def stack(cls, jets, axis=0):
        jets = list(jets)
        order = min(j.order for j in jets)
        dim = _common_dim(jets)
        if axis < 0:
            axis -= 1
        return cls(np.stack([j.truncate(order).coeffs for j in jets], axis=axis), dim, order)

    # -- introspection -----------------------------------------------------

    @property
    def space(self):
        return jet_space(self.dim, self.order)

    @property
    def shape(self):
        return self.coeffs.shape[:-1]

    @property
    def value(self):
        """Order-0 coefficients, i.e. the plain values (ndarray or float)."""
        v = self.coeffs[..., 0]
        return float(v) if v.ndim == 0 else v

    def partial(self, alpha):
        alpha = tuple(int(a) for a in alpha)
        if len(alpha) != self.dim or any(a < 0 for a in alpha):
            raise InputError(f"multi-index {alpha} does not fit a jet of dimension {self.dim}")
        if sum(alpha) > self.order:
            raise InputError(f"|alpha| = {sum(alpha)} exceeds jet order {self.order}")
        v = self.coeffs[..., self.space.index[alpha]]
        return float(v) if v.ndim == 0 else v

    def __repr__(self):
        if self.shape == ():
            return f"Jet3(dim={self.dim}, order={self.order}, coeffs={self.coeffs.tolist()})"
        return f"Jet3(dim={self.dim}, order={self.order}, shape={self.shape})"

    # -- structural --------------------------------------------------------

    def truncate(self, order):
        if order > self.order:
            raise InputError(f"cannot raise jet order from {self.order} to {order}")
        if order == self.order:
            return self
        return Jet3(self.coeffs[..., : n_coefficients(self.dim, order)], self.dim, order)

    def grad(self):
        """First partials as jets one order lower; derivative index is the new axis 0."""
        if self.order == 0:
            raise InputError("jet order exhausted: cannot differentiate an order-0 jet")
        shift = self.space.shift
        coeffs = np.stack([self.coeffs[..., shift[m]] for m in range(self.dim)])
        return Jet3(coeffs, self.dim, self.order - 1)

    def __getitem__(self, key):
        if key is Ellipsis or (isinstance(key, tuple) and Ellipsis in key):
            raise InputError("Ellipsis indexing is not supported on jets")
        return Jet3(self.coeffs[key], self.dim, self.order)

    def transpose(self, *axes):
        axes = tuple(axes[0]) if len(axes) == 1 and not isinstance(axes[0], int) else axes
        return Jet3(self.coeffs.transpose(axes + (len(axes),)), self.dim, self.order)

    def sum(self, axis=None):
        if axis is None:
            axis = tuple(range(len(self.shape)))
        return Jet3(self.coeffs.sum(axis=axis), self.dim, self.order)

    def copy(self):
        return Jet3(self.coeffs.copy(), self.dim, self.order)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, Jet3):
            if other.dim != self.dim:
                raise InputError(f"jet dimension mismatch: {self.dim} vs {other.dim}")
            order = min(self.order, other.order)
            return self.truncate(order), other.truncate(order)
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            return Jet3(a.coeffs + b.coeffs, a.dim, a.order)
        coeffs = self.coeffs.copy()
        coeffs[..., 0] = coeffs[..., 0] + np.asarray(other, dtype=float)
        return Jet3(coeffs, self.dim, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.coeffs, self.dim, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is not None:
            a, b = pair
            coeffs = np.einsum("...a,...b,abc->...c", a.coeffs, b.coeffs, a.space.product_table)
            return Jet3(coeffs, a.dim, a.order)
        return Jet3(self.coeffs * np.asarray(other, dtype=float)[..., None], self.dim, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet3):
            return self * other.reciprocal()
        other = np.asarray(other, dtype=float)
        if np.any(other == 0):
            raise SingularEvaluationError("division by zero", function="div")
        return Jet3(self.coeffs / other[..., None], self.dim, self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        if isinstance(exponent, Jet3):
            return (exponent * self.log()).exp()
        if float(exponent).is_integer():
            return self.ipow(int(exponent))
        return self.rpow(float(exponent))

    def ipow(self, k):
        """Integer power by repeated multiplication (any base; negative k divides)."""
        if k < 0:
            return self.ipow(-k).reciprocal()
        result = Jet3.constant(np.ones(self.shape), self.dim, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- elementary functions ---------------------------------------------

    def _compose(self, derivs):
        """f(self) given [f(a0), f'(a0), ..., f^(order)(a0)] at the values a0."""
        h = self.coeffs.copy()
        h[..., 0] = 0.0
        h = Jet3(h, self.dim, self.order)
        result = Jet3.constant(derivs[0], self.dim, self.order)
        power = None
        for k in range(1, self.order + 1):
            power = h if power is None else power * h
            result = result + power * (np.asarray(derivs[k]) / math.factorial(k))
        return result

    def _check(self, ok, name):
        if not np.all(ok):
            raise SingularEvaluationError(f"{name} evaluated outside its domain (value {self.value})", function=name)

    def reciprocal(self):
        x = np.asarray(self.coeffs[..., 0])
        self._check(x != 0, "div")
        r = 1.0 / x
        return self._compose([r, -r**2, 2 * r**3, -6 * r**4])

    def sin(self):
        x = self.coeffs[..., 0]
        s, c = np.sin(x), np.cos(x)
        return self._compose([s, c, -s, -c])

    def cos(self):
        x = self.coeffs[..., 0]
        s, c = np.sin(x), np.cos(x)
        return self._compose([c, -s, -c, s])

    def tan(self):
        x = self.coeffs[..., 0]
        self._check(np.abs(np.cos(x)) > 1e-300, "tan")
        t = np.tan(x)
        d1 = 1 + t * t
        return self._compose([t, d1, 2 * t * d1, 2 * d1 * (1 + 3 * t * t)])

    def exp(self):
        e = np.exp(self.coeffs[..., 0])
        return self._compose([e, e, e, e])

    def log(self):
        x = self.coeffs[..., 0]
        self._check(x > 0, "log")
        return self._compose([np.log(x), 1 / x, -1 / x**2, 2 / x**3])

    def sqrt(self):
        x = self.coeffs[..., 0]
        self._check(x > 0, "sqrt")
        s = np.sqrt(x)
        return self._compose([s, 0.5 / s, -0.25 / s**3, 0.375 / s**5])

    def sinh(self):
        x = self.coeffs[..., 0]
        s, c = np.sinh(x), np.cosh(x)
        return self._compose([s, c, s, c])

    def cosh(self):
        x = self.coeffs[..., 0]
        s, c = np.sinh(x), np.cosh(x)
        return self._compose([c, s, c, s])

    def tanh(self):
        t = np.tanh(self.coeffs[..., 0])
        d1 = 1 - t * t
        return self._compose([t, d1, -2 * t * d1, d1 * (6 * t * t - 2)])

    def rpow(self, c):
        """Real constant power; the base must be positive."""
        x = self.coeffs[..., 0]
        self._check(x > 0, "pow")
        return self._compose([x**c, c * x ** (c - 1), c * (c - 1) * x ** (c - 2),
                              c * (c - 1) * (c - 2) * x ** (c - 3)])


def _common_dim(jets):
    dims = {j.dim for j in jets}
    if len(dims) != 1:
        raise InputError(f"jet dimension mismatch: {sorted(dims)}")
    return dims.pop()


def jeinsum(subscripts, *operands):
    """``numpy.einsum`` over tensor axes with jet products on the coefficient axis.

    Operands may mix :class:`Jet3` and plain arrays; plain arrays act as
    constants. Explicit ``->`` output is required.
    """
    if "->" not in subscripts:
        raise InputError("jeinsum needs an explicit output ('->')")
    lhs, out = subscripts.replace(" ", "").split("->")
    terms = lhs.split(",")
    if len(terms) != len(operands):
        raise InputError(f"jeinsum: {len(terms)} subscripts for {len(operands)} operands")
    jets = [op for op in operands if isinstance(op, Jet3)]
    if not jets:
        return np.einsum(subscripts, *operands)
    dim = _common_dim(jets)
    order = min(j.order for j in jets)
    space = jet_space(dim, order)
    spare = [ch for ch in string.ascii_letters if ch not in subscripts]

    # fold jets left-to-right so that every einsum call contains at most two jets
    items = [(t, op.truncate(order) if isinstance(op, Jet3) else np.asarray(op, dtype=float))
             for t, op in zip(terms, operands)]
    while sum(isinstance(op, Jet3) for _, op in items) > 2:
        idx = [k for k, (_, op) in enumerate(items) if isinstance(op, Jet3)][:2]
        (ta, a), (tb, b) = items[idx[0]], items[idx[1]]
        rest = "".join(t for k, (t, _) in enumerate(items) if k not in idx) + out
        keep = "".join(dict.fromkeys(ch for ch in ta + tb if ch in rest))
        merged = jeinsum(f"{ta},{tb}->{keep}", a, b)
        items = [it for k, it in enumerate(items) if k not in idx] + [(keep, merged)]

    parts, arrays = [], []
    jet_letters = iter(spare[:2])
    out_letter = spare[2]
    jet_count = sum(isinstance(op, Jet3) for _, op in items)
    for t, op in items:
        if isinstance(op, Jet3):
            letter = next(jet_letters) if jet_count == 2 else out_letter
            parts.append(t + letter)
            arrays.append(op.coeffs)
        else:
            parts.append(t)
            arrays.append(op)
    if jet_count == 2:
        parts.append(spare[0] + spare[1] + out_letter)
        arrays.append(space.product_table)
    coeffs = np.einsum(",".join(parts) + "->" + out + out_letter, *arrays, optimize=True)
    return Jet3(coeffs, dim, order)


# -- module-level operations ----------------------------------------------


def jet_seed(point, var_index, order):
    """Jet of the coordinate function ``x^var_index`` at ``point``."""
    point = np.atleast_1d(np.asarray(point, dtype=float))
    dim = point.size
    if not 0 <= var_index < dim:
        raise InputError(f"var_index {var_index} out of range for dimension {dim}")
    if not 0 <= order <= MAX_ORDER:
        raise InputError(f"jet order must be in 0..{MAX_ORDER}, got {order}")
    coeffs = np.zeros(n_coefficients(dim, order))
    coeffs[0] = point[var_index]
    if order >= 1:
        coeffs[1 + var_index] = 1.0
    return Jet3(coeffs, dim, order)


def jet_add(a, b):
    _check_pair(a, b)
    return a + b


def jet_mul(a, b):
    _check_pair(a, b)
    return a * b


def jet_div(a, b):
    _check_pair(a, b)
    return a / b


def _check_pair(a, b):
    if a.dim != b.dim or a.order != b.order:
        raise InputError(f"jets differ: (dim {a.dim}, order {a.order}) vs (dim {b.dim}, order {b.order})")


def jet_apply_unary(fn, a, exponent=None):
    """Apply an elementary function by name; ``pow`` takes a constant or jet exponent."""
    if fn not in UNARY_FUNCTIONS:
        raise InputError(f"unknown function {fn!r}")
    if fn == "neg":
        return -a
    if fn == "pow":
        if exponent is None:
            raise InputError("pow needs an exponent")
        return a**exponent
    return getattr(a, fn)()


def jet_partial(a, alpha):
    return a.partial(alpha)
