"""Layered-network form of a kernel SVM.

Every supported kernel turns the decision function into a chain of affine maps
and elementwise activations

    z_l = W_l^T x_l + b_l,        x_{l+1} = h_l(z_l),        f = z_L  (scalar),

so one bound-propagation / dual machinery covers all kernels:

    linear    widths n -> m -> 1,         activation identity
    poly      widths n -> m -> 1,         activation z**degree
    sigmoid   widths n -> m -> 1,         activation tanh
    rbf       widths n -> m*n -> m -> 1,  activations z**2 then exp(-gamma*z)

The rbf chain subtracts each support vector coordinatewise, squares, sums each
n-block, and exponentiates, recovering exp(-gamma*||x - sv_i||**2).  Its two
inner maps are huge but {0,1}-structured, so they are kept as structured maps
(tile / block-sum) instead of dense matrices: O(n + m) storage instead of
O(m*n**2), which is what makes image-scale models tractable.

Maps follow the convention that ``forward`` applies W^T and ``adjoint`` applies
W, with W stored as (in_width, out_width).  Networks are immutable after
``compile`` and safe for concurrent evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import SvmModel


# ---------------------------------------------------------------------------
# structured linear maps


class LinearMap:
    """Base affine-map interface: forward = W^T x, adjoint = W v."""

    in_width: int
    out_width: int

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self, v: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def interval_forward(self, x_lo: np.ndarray, x_hi: np.ndarray):
        """Tight elementwise box image of W^T over [x_lo, x_hi] (bias excluded)."""
        raise NotImplementedError

    def materialize(self) -> np.ndarray:
        """Dense (in_width, out_width) matrix; for tests and debug only."""
        raise NotImplementedError

    def describe(self) -> dict:
        return {"variant": type(self).__name__, "in": self.in_width, "out": self.out_width}

    def _check_in(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.in_width,):
            raise ValueError(f"{type(self).__name__}: expected input width {self.in_width}, got {x.shape}")
        return x

    def _check_out(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.out_width,):
            raise ValueError(f"{type(self).__name__}: expected output width {self.out_width}, got {v.shape}")
        return v


class DenseMap(LinearMap):
    """General dense map; matrix has shape (in_width, out_width)."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.array(matrix, dtype=float)
        if matrix.ndim != 2 or min(matrix.shape) < 1:
            raise ValueError(f"DenseMap: need a 2-D matrix, got shape {matrix.shape}")
        matrix.flags.writeable = False
        self.matrix = matrix
        self.in_width, self.out_width = matrix.shape
        self._pos = np.maximum(matrix, 0.0)
        self._neg = np.minimum(matrix, 0.0)
        self._pos.flags.writeable = False
        self._neg.flags.writeable = False

    def forward(self, x):
        return self.matrix.T @ self._check_in(x)

    def adjoint(self, v):
        return self.matrix @ self._check_out(v)

    def interval_forward(self, x_lo, x_hi):
        x_lo = self._check_in(x_lo)
        x_hi = self._check_in(x_hi)
        lo = self._pos.T @ x_lo + self._neg.T @ x_hi
        hi = self._pos.T @ x_hi + self._neg.T @ x_lo
        return lo, hi

    def materialize(self):
        return self.matrix.copy()


class StackedIdentityMap(LinearMap):
    """W^T tiles the input: maps width n to m*n by stacking m copies."""

    def __init__(self, copies: int, dim: int):
        if copies < 1 or dim < 1:
            raise ValueError(f"StackedIdentityMap: copies and dim must be >= 1, got {copies}, {dim}")
        self.copies = copies
        self.dim = dim
        self.in_width = dim
        self.out_width = copies * dim

    def forward(self, x):
        return np.tile(self._check_in(x), self.copies)

    def adjoint(self, v):
        return self._check_out(v).reshape(self.copies, self.dim).sum(axis=0)

    def interval_forward(self, x_lo, x_hi):
        # all entries are 0/1: the box image is the tiled box
        return self.forward(x_lo), self.forward(x_hi)

    def materialize(self):
        return np.hstack([np.eye(self.dim)] * self.copies)

    def describe(self):
        return {**super().describe(), "copies": self.copies, "dim": self.dim}


class BlockSumMap(LinearMap):
    """W^T sums each contiguous block of size dim: maps width m*dim to m."""

    def __init__(self, blocks: int, dim: int):
        if blocks < 1 or dim < 1:
            raise ValueError(f"BlockSumMap: blocks and dim must be >= 1, got {blocks}, {dim}")
        self.blocks = blocks
        self.dim = dim
        self.in_width = blocks * dim
        self.out_width = blocks

    def forward(self, x):
        return self._check_in(x).reshape(self.blocks, self.dim).sum(axis=1)

    def adjoint(self, v):
        return np.repeat(self._check_out(v), self.dim)

    def interval_forward(self, x_lo, x_hi):
        return self.forward(x_lo), self.forward(x_hi)

    def materialize(self):
        out = np.zeros((self.in_width, self.blocks))
        for i in range(self.blocks):
            out[i * self.dim : (i + 1) * self.dim, i] = 1.0
        return out

    def describe(self):
        return {**super().describe(), "blocks": self.blocks, "dim": self.dim}


class ReadoutMap(LinearMap):
    """Final width-1 map: forward is a dot product with the readout weights."""

    def __init__(self, weights: np.ndarray):
        weights = np.array(weights, dtype=float)
        if weights.ndim != 1 or weights.size < 1:
            raise ValueError(f"ReadoutMap: need a 1-D weight vector, got shape {weights.shape}")
        weights.flags.writeable = False
        self.weights = weights
        self.in_width = weights.size
        self.out_width = 1

    def forward(self, x):
        return np.array([self.weights @ self._check_in(x)])

    def adjoint(self, v):
        return self.weights * self._check_out(v)[0]

    def interval_forward(self, x_lo, x_hi):
        x_lo = self._check_in(x_lo)
        x_hi = self._check_in(x_hi)
        pos = np.maximum(self.weights, 0.0)
        neg = np.minimum(self.weights, 0.0)
        return np.array([pos @ x_lo + neg @ x_hi]), np.array([pos @ x_hi + neg @ x_lo])

    def materialize(self):
        return self.weights[:, None].copy()


def map_forward(lin: LinearMap, x: np.ndarray) -> np.ndarray:
    """W^T x without materializing structured maps."""
    return lin.forward(x)


def map_adjoint(lin: LinearMap, v: np.ndarray) -> np.ndarray:
    """W v; the adjoint of ``map_forward`` under the standard inner product."""
    return lin.adjoint(v)


# ---------------------------------------------------------------------------
# elementwise activations


@dataclass(frozen=True)
class Activation:
    """Elementwise activation tag; ``kind`` selects behavior.

    kind 'identity'          h(z) = z                 increasing
    kind 'power' (degree d)  h(z) = z**d              increasing for odd d,
                                                      nonmonotone for even d
    kind 'tanh'              h(z) = tanh(z)           increasing
    kind 'expneg' (gamma)    h(z) = exp(-gamma * z)   decreasing
    """

    kind: str
    degree: int = 0
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("identity", "power", "tanh", "expneg"):
            raise ValueError(f"Activation: unknown kind {self.kind!r}")
        if self.kind == "power" and (int(self.degree) != self.degree or self.degree < 1):
            raise ValueError(f"Activation: power degree must be an integer >= 1, got {self.degree}")
        if self.kind == "expneg" and not (np.isfinite(self.gamma) and self.gamma > 0):
            raise ValueError(f"Activation: expneg gamma must be finite and > 0, got {self.gamma}")

    def apply(self, z: np.ndarray) -> np.ndarray:
        if self.kind == "identity":
            return np.asarray(z, dtype=float).copy()
        if self.kind == "power":
            return np.asarray(z, dtype=float) ** self.degree
        if self.kind == "tanh":
            return np.tanh(z)
        return np.exp(-self.gamma * np.asarray(z, dtype=float))

    @property
    def monotone(self) -> str:
        """'increasing', 'decreasing', or 'none' over the whole real line."""
        if self.kind == "expneg":
            return "decreasing"
        if self.kind == "power" and self.degree % 2 == 0:
            return "none"
        return "increasing"

    def describe(self) -> dict:
        out = {"kind": self.kind}
        if self.kind == "power":
            out["degree"] = self.degree
        if self.kind == "expneg":
            out["gamma"] = self.gamma
        return out


IDENTITY = Activation("identity")
TANH = Activation("tanh")


def power(degree: int) -> Activation:
    return Activation("power", degree=degree)


def expneg(gamma: float) -> Activation:
    return Activation("expneg", gamma=gamma)


# ---------------------------------------------------------------------------
# the network


@dataclass(frozen=True)
class LayeredNetwork:
    """Affine layers (map, bias) for l = 0..depth and activations for l = 0..depth-1."""

    layers: tuple  # of (LinearMap, np.ndarray bias)
    activations: tuple  # of Activation
    widths: tuple = field(init=False)  # input widths x_0 .. x_L plus final output 1
    depth: int = field(init=False)

    def __post_init__(self):
        if len(self.layers) != len(self.activations) + 1:
            raise ValueError(
                f"LayeredNetwork: {len(self.layers)} layers need {len(self.layers) - 1} activations,"
                f" got {len(self.activations)}"
            )
        widths = [self.layers[0][0].in_width]
        for lin, bias in self.layers:
            if lin.in_width != widths[-1]:
                raise ValueError(
                    f"LayeredNetwork: layer input width {lin.in_width} does not chain from {widths[-1]}"
                )
            bias = np.asarray(bias, dtype=float)
            if bias.shape != (lin.out_width,):
                raise ValueError(f"LayeredNetwork: bias shape {bias.shape} != output width {lin.out_width}")
            widths.append(lin.out_width)
        if widths[-1] != 1:
            raise ValueError(f"LayeredNetwork: final output width must be 1, got {widths[-1]}")
        object.__setattr__(self, "widths", tuple(widths))
        object.__setattr__(self, "depth", len(self.layers) - 1)

    @property
    def readout(self) -> tuple:
        return self.layers[-1]

    def describe(self) -> dict:
        """JSON-friendly shape dump: widths, map variants, activation tags."""
        return {
            "depth": self.depth,
            "widths": list(self.widths),
            "layers": [
                {"map": lin.describe(), "bias_width": int(bias.size)} for lin, bias in self.layers
            ],
            "activations": [act.describe() for act in self.activations],
        }


@dataclass(frozen=True)
class NetworkStates:
    """All intermediate states of one forward pass; value = scalar output."""

    x: tuple  # x_0 .. x_L
    z: tuple  # z_0 .. z_L (z_L has width 1)
    value: float


def compile_network(model: SvmModel) -> LayeredNetwork:
    """Compile an SVM into its layered form; forward( . ) equals decision_value( . )."""
    sv = model.support_vectors
    m, n = sv.shape
    k = model.kernel
    readout = (ReadoutMap(model.coef), np.array([model.bias]))
    if k.kind == "linear":
        layers = ((DenseMap(sv.T), np.zeros(m)), readout)
        acts = (IDENTITY,)
    elif k.kind == "poly":
        layers = ((DenseMap(k.gamma * sv.T), np.full(m, k.coef0)), readout)
        acts = (power(k.degree),)
    elif k.kind == "sigmoid":
        layers = ((DenseMap(k.gamma * sv.T), np.full(m, k.coef0)), readout)
        acts = (TANH,)
    else:  # rbf: subtract each sv, square, block-sum, exponentiate
        layers = (
            (StackedIdentityMap(m, n), -sv.reshape(m * n)),
            (BlockSumMap(m, n), np.zeros(m)),
            readout,
        )
        acts = (power(2), expneg(k.gamma))
    return LayeredNetwork(layers=layers, activations=acts)


def forward(net: LayeredNetwork, x0: np.ndarray) -> NetworkStates:
    """Run the chain, keeping every pre-activation z_l and input x_l."""
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (net.widths[0],):
        raise ValueError(f"forward: expected input width {net.widths[0]}, got {x0.shape}")
    xs = [x0]
    zs = []
    for l, (lin, bias) in enumerate(net.layers):
        z = lin.forward(xs[-1]) + bias
        zs.append(z)
        if l < net.depth:
            xs.append(net.activations[l].apply(z))
    return NetworkStates(x=tuple(xs), z=tuple(zs), value=float(zs[-1][0]))
