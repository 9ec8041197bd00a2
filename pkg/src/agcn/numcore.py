"""Dense float64 matrices with define-by-run reverse-mode gradients.

Operations executed while a :class:`Tape` is active are recorded in order;
``Tape.backward`` replays the recorded backward rules in reverse.  Outside a
tape every op is a plain numpy computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np


class DimensionError(ValueError):
    pass


class GradCheckError(RuntimeError):
    """Objective was not finite at a probe point."""


class Matrix:
    __slots__ = ("data", "grad", "requires_grad", "name")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        arr = np.array(data, dtype=np.float64)
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr.reshape(1, -1)
        elif arr.ndim != 2:
            raise DimensionError(f"Matrix needs 2 dimensions, got shape {arr.shape}")
        self.data = arr
        self.grad = None
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def item(self) -> float:
        if self.data.size != 1:
            raise DimensionError(f"item() needs a 1x1 matrix, got {self.shape}")
        return float(self.data[0, 0])

    def numpy(self) -> np.ndarray:
        return self.data

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"{type(self).__name__}{tag}{self.shape}"

    # operator sugar
    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __mul__(self, other):
        if isinstance(other, Matrix):
            return mul(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __matmul__(self, other):
        return matmul(self, other)

    @property
    def T(self):
        return transpose(self)


class Parameter(Matrix):
    """A learnable leaf whose gradient accumulates across backward passes."""

    __slots__ = ()

    def __init__(self, data, name: str | None = None, requires_grad: bool = True):
        super().__init__(data, requires_grad=requires_grad, name=name)
        self.grad = np.zeros_like(self.data)

    def zero_grad(self):
        self.grad = np.zeros_like(self.data)


def as_matrix(x) -> Matrix:
    return x if isinstance(x, Matrix) else Matrix(x)


@dataclass
class _Entry:
    out: Matrix
    inputs: tuple[Matrix, ...]
    backward: Callable[[np.ndarray], Sequence[np.ndarray | None]]


_ACTIVE: list["Tape"] = []


class Tape:
    """Ordered record of differentiable operations.

    Use as a context manager; ops run inside the block are recorded when at
    least one input requires a gradient.
    """

    def __init__(self):
        self.entries: list[_Entry] = []

    def __enter__(self):
        _ACTIVE.append(self)
        return self

    def __exit__(self, *exc):
        _ACTIVE.remove(self)
        return False

    def __len__(self):
        return len(self.entries)

    def backward(self, root: Matrix, seed: float | np.ndarray = 1.0):
        if not root.requires_grad:
            return
        root.grad = np.broadcast_to(np.asarray(seed, dtype=np.float64), root.shape).copy()
        for entry in reversed(self.entries):
            g = entry.out.grad
            if g is None:
                continue
            for inp, gi in zip(entry.inputs, entry.backward(g)):
                if gi is None or not inp.requires_grad:
                    continue
                if inp.grad is None:
                    inp.grad = np.array(gi, dtype=np.float64)
                else:
                    inp.grad = inp.grad + gi


def active_tape() -> Tape | None:
    return _ACTIVE[-1] if _ACTIVE else None


def record_op(value: np.ndarray, inputs: Sequence[Matrix], backward) -> Matrix:
    """Wrap ``value`` as the output of an op over ``inputs``.

    ``backward(g)`` receives dL/d(out) and returns one gradient (or None) per
    input.  Custom ops built on this are taped like the builtin ones.
    """
    out = Matrix(value)
    needs = any(m.requires_grad for m in inputs)
    tape = active_tape()
    if needs and tape is not None:
        out.requires_grad = True
        tape.entries.append(_Entry(out, tuple(inputs), backward))
    return out


def _same_shape(a: Matrix, b: Matrix, op: str):
    if a.shape != b.shape:
        raise DimensionError(f"{op}: shapes {a.shape} and {b.shape} differ")


def matmul(a, b) -> Matrix:
    a, b = as_matrix(a), as_matrix(b)
    if a.cols != b.rows:
        raise DimensionError(f"matmul: shapes {a.shape} and {b.shape} are not aligned")
    ad, bd = a.data, b.data
    return record_op(ad @ bd, (a, b), lambda g: (g @ bd.T, ad.T @ g))


def add(a, b) -> Matrix:
    a, b = as_matrix(a), as_matrix(b)
    _same_shape(a, b, "add")
    return record_op(a.data + b.data, (a, b), lambda g: (g, g))


def sub(a, b) -> Matrix:
    a, b = as_matrix(a), as_matrix(b)
    _same_shape(a, b, "sub")
    return record_op(a.data - b.data, (a, b), lambda g: (g, -g))


def mul(a, b) -> Matrix:
    a, b = as_matrix(a), as_matrix(b)
    _same_shape(a, b, "mul")
    ad, bd = a.data, b.data
    return record_op(ad * bd, (a, b), lambda g: (g * bd, g * ad))


def elementwise(a, b, kind: str) -> Matrix:
    ops = {"add": add, "sub": sub, "mul": mul}
    if kind not in ops:
        raise ValueError(f"unknown elementwise kind {kind!r}")
    return ops[kind](a, b)


def scale(m, c: float) -> Matrix:
    m = as_matrix(m)
    c = float(c)
    return record_op(m.data * c, (m,), lambda g: (g * c,))


def transpose(m) -> Matrix:
    m = as_matrix(m)
    return record_op(m.data.T.copy(), (m,), lambda g: (g.T,))


def reduce_sum(m) -> Matrix:
    m = as_matrix(m)
    shape = m.shape
    return record_op(np.array([[m.data.sum()]]), (m,), lambda g: (np.full(shape, g[0, 0]),))


def sum_rows(m) -> Matrix:
    """Row sums as an ``rows x 1`` column."""
    m = as_matrix(m)
    shape = m.shape
    return record_op(m.data.sum(axis=1, keepdims=True), (m,),
                     lambda g: (np.broadcast_to(g, shape).copy(),))


def leaky_relu(m, slope: float = 0.2) -> Matrix:
    if not 0.0 < slope < 1.0:
        raise ValueError(f"leaky_relu slope must lie in (0, 1), got {slope}")
    m = as_matrix(m)
    factor = np.where(m.data > 0, 1.0, slope)
    return record_op(m.data * factor, (m,), lambda g: (g * factor,))


def relu(m) -> Matrix:
    m = as_matrix(m)
    mask = (m.data > 0).astype(np.float64)
    return record_op(np.where(m.data > 0, m.data, 0.0), (m,), lambda g: (g * mask,))


def _stable_sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def sigmoid(m) -> Matrix:
    m = as_matrix(m)
    s = _stable_sigmoid(m.data)
    return record_op(s, (m,), lambda g: (g * s * (1.0 - s),))


def softplus(m) -> Matrix:
    """log(1 + e^x) without overflow; derivative is the sigmoid."""
    m = as_matrix(m)
    x = m.data
    val = np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    return record_op(val, (m,), lambda g: (g * _stable_sigmoid(x),))


def absolute(m) -> Matrix:
    m = as_matrix(m)
    sign = np.sign(m.data)  # sign(0) == 0
    return record_op(np.abs(m.data), (m,), lambda g: (g * sign,))


def clamp_min(m, floor: float) -> Matrix:
    m = as_matrix(m)
    mask = (m.data > floor).astype(np.float64)
    return record_op(np.maximum(m.data, floor), (m,), lambda g: (g * mask,))


def power(m, p: float) -> Matrix:
    m = as_matrix(m)
    x = m.data
    return record_op(x ** p, (m,), lambda g: (g * p * x ** (p - 1.0),))


# ---------------------------------------------------------------------------
# gradient checking


@dataclass
class GradCheckReport:
    tol: float
    h: float
    errors: dict[str, float] = field(default_factory=dict)

    @property
    def failures(self) -> list[str]:
        return [k for k, e in self.errors.items() if not e <= self.tol]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def max_error(self) -> float:
        return max(self.errors.values(), default=0.0)

    def __str__(self):
        lines = [f"{name:>16s}  max rel err {err:.3e}  {'ok' if err <= self.tol else 'FAIL'}"
                 for name, err in self.errors.items()]
        return "\n".join(lines)


def _eval_scalar(f) -> float:
    out = f()
    val = out.item() if isinstance(out, Matrix) else float(out)
    if not np.isfinite(val):
        raise GradCheckError(f"objective is not finite at probe point ({val})")
    return val


def grad_check(f: Callable[[], Matrix], params, h: float = 1e-5, tol: float = 1e-4,
               floor: float = 1e-6) -> GradCheckReport:
    """Compare taped gradients of scalar ``f()`` against central differences.

    ``params`` is a mapping name -> Parameter or a sequence of Parameters.
    The relative error of one entry is ``|a - n| / max(|a|, |n|, floor)``;
    the floor keeps entries whose true gradient is ~0 from reporting noise.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    if isinstance(params, Mapping):
        named = list(params.items())
    else:
        named = [(p.name or f"param{i}", p) for i, p in enumerate(params)]

    for _, p in named:
        p.zero_grad()
    with Tape() as tape:
        out = f()
        if not np.isfinite(out.item()):
            raise GradCheckError(f"objective is not finite at probe point ({out.item()})")
        tape.backward(out)
    analytic = {name: p.grad.copy() for name, p in named}

    report = GradCheckReport(tol=tol, h=h)
    for name, p in named:
        numeric = np.zeros_like(p.data)
        flat = p.data.reshape(-1)
        for k in range(flat.size):
            orig = flat[k]
            flat[k] = orig + h
            fp = _eval_scalar(f)
            flat[k] = orig - h
            fm = _eval_scalar(f)
            flat[k] = orig
            numeric.reshape(-1)[k] = (fp - fm) / (2.0 * h)
        a = analytic[name]
        denom = np.maximum(np.maximum(np.abs(a), np.abs(numeric)), floor)
        report.errors[name] = float(np.max(np.abs(a - numeric) / denom)) if a.size else 0.0
    for _, p in named:
        p.zero_grad()
    return report

