"""Dense float64 tensors with reverse-mode automatic differentiation.

Every operation that sees a gradient-requiring input records a backward
closure on the produced tensor; ``backward`` replays the closures in
reverse topological order. Gradients accumulate until an optimizer step
or an explicit reset, so calling ``backward`` twice without resetting
adds the two gradients (documented behavior, used nowhere internally).
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Tensor",
    "Param",
    "Adam",
    "ShapeError",
    "add",
    "mul",
    "sub",
    "neg",
    "matmul",
    "tanh",
    "sigmoid",
    "relu",
    "log",
    "tensor_sum",
    "softmax",
    "stack_rows",
    "take_rows",
    "backward",
    "clip_global_norm",
]


class ShapeError(ValueError):
    """Raised when operand shapes violate an operation's contract."""


def _as_array(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64)


class Tensor:
    """A dense float64 array plus an accumulated gradient of the same shape."""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward")

    def __init__(self, data, requires_grad: bool = False):
        self.data = _as_array(data)
        self.requires_grad = requires_grad
        self.grad: np.ndarray | None = None
        self._parents: tuple[Tensor, ...] = ()
        self._backward = None

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def accumulate_grad(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad += g

    def reset_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad})"

    # Operator sugar; the module-level functions do the work.
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(self, other)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(self, other)

    def __sub__(self, other):
        return sub(self, other)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)


def _coerce(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)

def _make(data: np.ndarray, parents: tuple[Tensor, ...], backward_fn) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
        out._backward = backward_fn
    return out


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum ``g`` down to ``shape``, undoing numpy broadcasting."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, n in enumerate(shape):
        if n == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g


def _check_elementwise(a: Tensor, b: Tensor, op: str) -> None:
    # Equal shapes or a scalar/broadcastable operand; anything else is a contract error.
    try:
        np.broadcast_shapes(a.shape, b.shape)
    except ValueError:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} do not broadcast") from None


def add(a, b) -> Tensor:
    a, b = _coerce(a), _coerce(b)
    _check_elementwise(a, b, "add")
    out_data = a.data + b.data

    def backward_fn(g):
        a.accumulate_grad(_unbroadcast(g, a.shape))
        b.accumulate_grad(_unbroadcast(g, b.shape))

    return _make(out_data, (a, b), backward_fn)


def mul(a, b) -> Tensor:
    a, b = _coerce(a), _coerce(b)
    _check_elementwise(a, b, "mul")
    out_data = a.data * b.data

    def backward_fn(g):
        a.accumulate_grad(_unbroadcast(g * b.data, a.shape))
        b.accumulate_grad(_unbroadcast(g * a.data, b.shape))

    return _make(out_data, (a, b), backward_fn)


def neg(a) -> Tensor:
    a = _coerce(a)

    def backward_fn(g):
        a.accumulate_grad(-g)

    return _make(-a.data, (a,), backward_fn)


def sub(a, b) -> Tensor:
    return add(a, neg(_coerce(b)))


def matmul(a, b) -> Tensor:
    a, b = _coerce(a), _coerce(b)
    if a.data.ndim != 2 or b.data.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: incompatible shapes {a.shape} and {b.shape}")
    out_data = a.data @ b.data

    def backward_fn(g):
        a.accumulate_grad(g @ b.data.T)
        b.accumulate_grad(a.data.T @ g)

    return _make(out_data, (a, b), backward_fn)


def tanh(a) -> Tensor:
    a = _coerce(a)
    t = np.tanh(a.data)

    def backward_fn(g):
        a.accumulate_grad(g * (1.0 - t * t))

    return _make(t, (a,), backward_fn)


def sigmoid(a) -> Tensor:
    a = _coerce(a)
    # Split by sign so exp never overflows.
    x = a.data
    s = np.where(x >= 0, 1.0 / (1.0 + np.exp(-np.abs(x))),
                 np.exp(-np.abs(x)) / (1.0 + np.exp(-np.abs(x))))

    def backward_fn(g):
        a.accumulate_grad(g * s * (1.0 - s))

    return _make(s, (a,), backward_fn)


def relu(a) -> Tensor:
    a = _coerce(a)
    out_data = np.maximum(a.data, 0.0)

    def backward_fn(g):
        a.accumulate_grad(g * (a.data > 0))

    return _make(out_data, (a,), backward_fn)


def log(a) -> Tensor:
    a = _coerce(a)

    def backward_fn(g):
        a.accumulate_grad(g / a.data)

    return _make(np.log(a.data), (a,), backward_fn)


def tensor_sum(a) -> Tensor:
    """Sum all entries into a 0-d scalar tensor."""
    a = _coerce(a)

    def backward_fn(g):
        a.accumulate_grad(np.broadcast_to(g, a.shape).copy())

    return _make(np.asarray(a.data.sum()), (a,), backward_fn)


def softmax(a) -> Tensor:
    """Softmax over all entries of a vector-shaped tensor.

    Accepts shapes (n,), (n, 1) and (1, n); the output keeps the input
    shape. Stabilized by max subtraction, so constant shifts are exact
    no-ops.
    """
    a = _coerce(a)
    if a.data.size == 0:
        raise ShapeError("softmax: empty input")
    if a.data.size != max(a.data.shape, default=0) and a.data.ndim > 1:
        raise ShapeError(f"softmax: expected a vector shape, got {a.shape}")
    flat = a.data.reshape(-1)
    e = np.exp(flat - flat.max())
    s = (e / e.sum()).reshape(a.shape)

    def backward_fn(g):
        sf = s.reshape(-1)
        gf = g.reshape(-1)
        a.accumulate_grad((sf * (gf - np.dot(gf, sf))).reshape(a.shape))

    return _make(s, (a,), backward_fn)


def stack_rows(rows: list[Tensor]) -> Tensor:
    """Stack (1, d) row tensors into an (n, d) matrix."""
    if not rows:
        raise ShapeError("stack_rows: no rows")
    rows = [_coerce(r) for r in rows]
    width = rows[0].data.shape[-1]
    for r in rows:
        if r.data.ndim != 2 or r.shape[0] != 1 or r.shape[1] != width:
            raise ShapeError(f"stack_rows: expected (1, {width}) rows, got {r.shape}")
    out_data = np.vstack([r.data for r in rows])

    def backward_fn(g):
        for i, r in enumerate(rows):
            r.accumulate_grad(g[i : i + 1])

    return _make(out_data, tuple(rows), backward_fn)


def take_rows(a, indices: list[int]) -> Tensor:
    """Gather rows of a matrix; gradients scatter-add back into it."""
    a = _coerce(a)
    if a.data.ndim != 2:
        raise ShapeError(f"take_rows: expected a matrix, got {a.shape}")
    idx = np.asarray(indices, dtype=np.intp)
    out_data = a.data[idx]

    def backward_fn(g):
        buf = np.zeros_like(a.data)
        np.add.at(buf, idx, g)
        a.accumulate_grad(buf)

    return _make(out_data, (a,), backward_fn)


def backward(loss: Tensor) -> None:
    """Accumulate d(loss)/d(t) into every gradient-requiring tensor t."""
    if loss.data.size != 1:
        raise ShapeError(f"backward: loss must be a scalar, got shape {loss.shape}")
    order: list[Tensor] = []
    seen: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    loss.accumulate_grad(np.ones_like(loss.data))
    for node in reversed(order):
        if node._backward is not None and node.grad is not None:
            node._backward(node.grad)
            # Drop intermediate grads so only leaves accumulate across calls.
            node.grad = None


class Param:
    """A named learnable tensor."""

    __slots__ = ("name", "tensor")

    def __init__(self, name: str, value):
        self.name = name
        self.tensor = Tensor(value, requires_grad=True)

    @property
    def value(self) -> np.ndarray:
        return self.tensor.data

    @value.setter
    def value(self, new: np.ndarray) -> None:
        if np.shape(new) != self.tensor.data.shape:
            raise ShapeError(
                f"param {self.name}: cannot assign shape {np.shape(new)} "
                f"over {self.tensor.data.shape}"
            )
        self.tensor.data = _as_array(new).copy()

    @property
    def grad(self) -> np.ndarray:
        if self.tensor.grad is None:
            self.tensor.grad = np.zeros_like(self.tensor.data)
        return self.tensor.grad

    def reset_grad(self) -> None:
        self.tensor.grad = np.zeros_like(self.tensor.data)

    def __repr__(self) -> str:
        return f"Param({self.name!r}, shape={self.tensor.shape})"


def clip_global_norm(params: list[Param], max_norm: float) -> float:
    """Scale all gradients so their joint L2 norm is at most ``max_norm``.

    Returns the pre-clip norm. A no-op when the norm is already within
    bounds, which makes clipping idempotent.
    """
    if max_norm <= 0:
        raise ValueError("max_norm must be positive")
    total = 0.0
    for p in params:
        g = p.grad
        total += float(np.dot(g.reshape(-1), g.reshape(-1)))
    norm = float(np.sqrt(total))
    if norm > max_norm:
        scale = max_norm / norm
        for p in params:
            g = p.grad
            g *= scale
    return norm


class Adam:
    """Adam with bias correction; resets gradients after each step."""

    def __init__(
        self,
        params: list[Param],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.params = list(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = [np.zeros_like(p.value) for p in self.params]
        self._v = [np.zeros_like(p.value) for p in self.params]

    def step(self) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        for i, p in enumerate(self.params):
            g = p.grad
            self._m[i] = b1 * self._m[i] + (1.0 - b1) * g
            self._v[i] = b2 * self._v[i] + (1.0 - b2) * g * g
            m_hat = self._m[i] / (1.0 - b1**self.t)
            v_hat = self._v[i] / (1.0 - b2**self.t)
            p.tensor.data = p.value - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)
            p.reset_grad()


def adam_step(state: Adam, params: list[Param] | None = None) -> None:
    """Functional form of :meth:`Adam.step` over the state's parameters."""
    if params is not None and list(params) != state.params:
        raise ValueError("adam_step: params differ from the state's parameters")
    state.step()
