"""ReLU network value type with exact size/width/depth accounting.

A net is an ordered list of affine maps; evaluation applies ReLU between
consecutive maps (never after the last one).  ``size`` counts stored
nonzero weights and biases, matching the "number of nonzero parameters"
convention of the constructive-network size bounds, so identity padding
contributes its explicit +-1 entries.

Layers are stored as ``scipy.sparse`` CSR matrices: the assembled
estimator networks are block-structured with huge mostly-zero widths,
and size counting is exact on the stored entries either way.
"""

from __future__ import annotations

import json
from typing import Iterable, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

Layer = Tuple[sp.csr_matrix, np.ndarray]


def _as_csr(w) -> sp.csr_matrix:
    m = sp.csr_matrix(w, dtype=float, copy=True) if not sp.issparse(w) else w.tocsr().astype(float)
    m.eliminate_zeros()
    return m


class ReluNet:
    def __init__(self, layers: Iterable[Tuple[object, object]]):
        self.layers: List[Layer] = []
        prev = None
        for w, b in layers:
            wm = _as_csr(w)
            bv = np.asarray(b, dtype=float).reshape(-1).copy()
            if bv.shape[0] != wm.shape[0]:
                raise ValueError(f"bias length {bv.shape[0]} != rows {wm.shape[0]}")
            if prev is not None and wm.shape[1] != prev:
                raise ValueError(f"layer input {wm.shape[1]} != previous output {prev}")
            prev = wm.shape[0]
            self.layers.append((wm, bv))
        if not self.layers:
            raise ValueError("a net needs at least one affine map")

    # -- accounting -------------------------------------------------------

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1][0].shape[0]

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def dims(self) -> List[int]:
        return [self.input_dim] + [w.shape[0] for w, _ in self.layers]

    @property
    def width(self) -> int:
        return max(self.dims)

    @property
    def size(self) -> int:
        return int(sum(w.nnz + np.count_nonzero(b) for w, b in self.layers))

    # -- evaluation --------------------------------------------------------

    def __call__(self, x) -> np.ndarray:
        """Forward pass; accepts one point (d,) or a batch (n, d)."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        z = (x[None, :] if single else x).T  # (d, n)
        if z.shape[0] != self.input_dim:
            raise ValueError(f"expected input dimension {self.input_dim}, got {z.shape[0]}")
        last = len(self.layers) - 1
        for i, (w, b) in enumerate(self.layers):
            z = w @ z + b[:, None]
            if i != last:
                np.maximum(z, 0.0, out=z)
        out = z.T
        return out[0] if single else out

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        doc = {
            "dims": self.dims,
            "layers": [
                {"w": w.toarray().tolist(), "b": b.tolist()} for w, b in self.layers
            ],
        }
        return json.dumps(doc)

    @staticmethod
    def from_json(text: str) -> "ReluNet":
        doc = json.loads(text)
        net = ReluNet([(lay["w"], lay["b"]) for lay in doc["layers"]])
        if net.dims != list(doc["dims"]):
            raise ValueError("dims field does not match layer shapes")
        return net

    def __repr__(self) -> str:
        return (
            f"ReluNet(in={self.input_dim}, out={self.output_dim}, "
            f"depth={self.depth}, width={self.width}, size={self.size})"
        )


# ---------------------------------------------------------------------------
# elementary builders
# ---------------------------------------------------------------------------

def affine_net(w, b=None) -> ReluNet:
    """Depth-1 net computing w @ x + b."""
    wm = _as_csr(w)
    if b is None:
        b = np.zeros(wm.shape[0])
    return ReluNet([(wm, b)])


def identity_net(dim: int, depth: int = 1) -> ReluNet:
    """Pointwise-identity net of exactly the requested depth.

    Depth 1 is the plain affine identity; deeper versions route through
    the sigma(x) - sigma(-x) split (2*dim wide).
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if depth == 1:
        return affine_net(sp.identity(dim, format="csr"))
    eye = sp.identity(dim, format="csr")
    split = sp.vstack([eye, -eye], format="csr")     # (2d, d)
    merge = sp.hstack([eye, -eye], format="csr")     # (d, 2d)
    mid = sp.identity(2 * dim, format="csr")
    layers = [(split, np.zeros(2 * dim))]
    for _ in range(depth - 2):
        layers.append((mid, np.zeros(2 * dim)))
    layers.append((merge, np.zeros(dim)))
    return ReluNet(layers)


def scale_output(net: ReluNet, factor: float, shift: float = 0.0) -> ReluNet:
    """factor * net(x) + shift, folded into the last affine map (no growth)."""
    w, b = net.layers[-1]
    layers = list(net.layers[:-1]) + [(w * factor, b * factor + shift)]
    return ReluNet(layers)


def select_rows(net: ReluNet, rows: Sequence[int]) -> ReluNet:
    """Keep only the given output coordinates (folds into the last map)."""
    w, b = net.layers[-1]
    idx = np.asarray(rows, dtype=int)
    return ReluNet(list(net.layers[:-1]) + [(w[idx], b[idx])])
