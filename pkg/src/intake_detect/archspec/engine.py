"""Declarative layer specs, shape propagation and parameter counting.

Shapes are ``T x H x W x C`` with ``T = 1`` for purely spatial inputs.
Convolutions and pools use same padding, so each output dimension is
``ceil(in / stride)``.

Two-pathway models (Two-Stream, SlowFast) run each pathway separately.
Optional lateral connections carry features from the second pathway into
the first, where they are concatenated along channels before the next
layer. Both pathways are then reduced by their ``merge`` ops, concatenated
along channels, and fed through the shared head.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class Kind(str, Enum):
    CONV2D = "conv2d"
    CONV3D = "conv3d"
    MAXPOOL = "maxpool"
    BOTTLENECK = "bottleneck_block"
    DENSE = "dense"
    LSTM = "lstm"
    FLATTEN = "flatten"
    SPATIAL_POOL = "spatial_pool"
    TEMPORAL_POOL = "temporal_pool"
    TEMPORAL_FOLD = "temporal_fold"
    FUSION = "fusion_concat_conv"
    LATERAL = "lateral_timestride_conv"
    CONCAT = "concat"


_CONV_KINDS = {Kind.CONV2D, Kind.CONV3D, Kind.LATERAL}


@dataclass(frozen=True)
class ShapeState:
    t: int
    h: int
    w: int
    c: int

    def __post_init__(self) -> None:
        for name in ("t", "h", "w", "c"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"shape dimension {name} must be a positive integer, got {v}")

    def __str__(self) -> str:
        s = f"{self.h}^2" if self.h == self.w else f"{self.h}x{self.w}"
        return f"{self.t}x{s}x{self.c}"


@dataclass(frozen=True)
class LayerSpec:
    """One layer (or a stack of ``repeat`` identical bottleneck blocks).

    ``kernel`` and ``stride`` are ``(temporal, spatial)``. For bottleneck
    blocks ``kernel[0]`` is the temporal size of the first 1x1 conv,
    ``kernel[1]`` the spatial size of the middle conv, ``width`` the inner
    channel count and ``out_channels`` the block output; the stride applies
    to the first block only. A ``channelwise`` fusion combines channel ``k``
    of the first input with channel ``k`` of the second (two weights per
    output channel) instead of mixing all concatenated channels.
    """

    name: str
    kind: Kind
    kernel: tuple[int, int] = (1, 1)
    out_channels: int | None = None
    stride: tuple[int, int] = (1, 1)
    repeat: int = 1
    has_bias: bool = False
    has_batchnorm: bool = False
    width: int | None = None
    channelwise: bool = False
    global_pool: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", Kind(self.kind))
        if min(self.kernel) < 1 or min(self.stride) < 1:
            raise ValueError(f"layer {self.name}: kernel and stride must be positive")
        if self.repeat < 1:
            raise ValueError(f"layer {self.name}: repeat must be >= 1")
        needs_out = _CONV_KINDS | {Kind.BOTTLENECK, Kind.DENSE, Kind.LSTM, Kind.FUSION}
        if self.kind in needs_out and not (self.out_channels and self.out_channels > 0):
            raise ValueError(f"layer {self.name}: {self.kind.value} needs out_channels > 0")
        if self.kind is Kind.CONV2D and self.kernel[0] != 1:
            raise ValueError(f"layer {self.name}: conv2d must have temporal kernel 1")
        if self.kind is Kind.BOTTLENECK and not self.width:
            raise ValueError(f"layer {self.name}: bottleneck needs an inner width")


@dataclass(frozen=True)
class Pathway:
    name: str
    input: ShapeState
    layers: tuple[LayerSpec, ...] = ()
    merge: tuple[LayerSpec, ...] = ()


@dataclass(frozen=True)
class Lateral:
    """Connection from the second pathway into the first after layer ``after``."""

    after: str
    layer: LayerSpec


@dataclass(frozen=True)
class ArchSpec:
    name: str
    pathways: tuple[Pathway, ...]
    head: tuple[LayerSpec, ...] = ()
    laterals: tuple[Lateral, ...] = ()
    merge_name: str = "concat"
    alpha: int | None = None
    beta: float | None = None
    reference_params: float | None = None
    tolerance: float = 0.01
    description: str = ""

    def __post_init__(self) -> None:
        if len(self.pathways) not in (1, 2):
            raise ValueError(f"{self.name}: expected 1 or 2 pathways, got {len(self.pathways)}")
        if self.laterals and len(self.pathways) != 2:
            raise ValueError(f"{self.name}: lateral connections need two pathways")


@dataclass(frozen=True)
class LayerTrace:
    pathway: str
    name: str
    kind: str
    kernel: str
    shape: ShapeState
    in_channels: int
    params: int


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _conv_params(k_elems: int, cin: int, cout: int, bias: bool, bn: bool) -> int:
    return k_elems * cin * cout + (cout if bias else 0) + (2 * cout if bn else 0)


def layer_params(layer: LayerSpec, cin: int) -> int:
    """Trainable parameters of ``layer`` given ``cin`` input channels."""
    kt, ks = layer.kernel
    bias, bn = layer.has_bias, layer.has_batchnorm
    kind = layer.kind
    if kind in _CONV_KINDS:
        return _conv_params(kt * ks * ks, cin, layer.out_channels, bias, bn)
    if kind is Kind.FUSION:
        cout = layer.out_channels
        if layer.channelwise:
            if cin != 2 * cout:
                raise ValueError(
                    f"layer {layer.name}: channelwise fusion needs {2 * cout} input channels, got {cin}"
                )
            return _conv_params(kt * ks * ks, 2, cout, bias, bn)
        return _conv_params(kt * ks * ks, cin, cout, bias, bn)
    if kind is Kind.BOTTLENECK:
        width, cout = layer.width, layer.out_channels
        total = 0
        for i in range(layer.repeat):
            c = cin if i == 0 else cout
            total += _conv_params(kt, c, width, bias, bn)
            total += _conv_params(ks * ks, width, width, bias, bn)
            total += _conv_params(1, width, cout, bias, bn)
            if i == 0 and (c != cout or layer.stride != (1, 1)):
                total += _conv_params(1, c, cout, bias, bn)
        return total
    if kind is Kind.DENSE:
        return cin * layer.out_channels + layer.out_channels
    if kind is Kind.LSTM:
        h = layer.out_channels
        return 4 * ((cin + h) * h + h)
    return 0


def layer_output(layer: LayerSpec, s: ShapeState) -> ShapeState:
    kind = layer.kind
    st, ss = layer.stride
    if kind in _CONV_KINDS or kind is Kind.BOTTLENECK:
        return ShapeState(_ceil_div(s.t, st), _ceil_div(s.h, ss), _ceil_div(s.w, ss), layer.out_channels)
    if kind is Kind.MAXPOOL:
        return ShapeState(_ceil_div(s.t, st), _ceil_div(s.h, ss), _ceil_div(s.w, ss), s.c)
    if kind is Kind.FUSION:
        return ShapeState(s.t, s.h, s.w, layer.out_channels)
    if kind is Kind.SPATIAL_POOL:
        return ShapeState(s.t, 1, 1, s.c)
    if kind is Kind.TEMPORAL_POOL:
        t = 1 if layer.global_pool else _ceil_div(s.t, st)
        return ShapeState(t, s.h, s.w, s.c)
    if kind is Kind.TEMPORAL_FOLD:
        return ShapeState(1, s.h, s.w, s.t * s.c)
    if kind is Kind.FLATTEN:
        return ShapeState(s.t, 1, 1, s.h * s.w * s.c)
    if kind in (Kind.DENSE, Kind.LSTM):
        if s.h != 1 or s.w != 1:
            raise ValueError(f"layer {layer.name}: {kind.value} needs a flattened input, got {s}")
        return ShapeState(s.t, 1, 1, layer.out_channels)
    if kind is Kind.CONCAT:
        return s
    raise ValueError(f"layer {layer.name}: unsupported kind {kind}")


def _kernel_text(layer: LayerSpec) -> str:
    kt, ks = layer.kernel
    st, ss = layer.stride
    if layer.kind in (Kind.DENSE, Kind.LSTM):
        return f"{layer.out_channels}"
    if layer.kind in (Kind.FLATTEN, Kind.SPATIAL_POOL, Kind.TEMPORAL_FOLD, Kind.CONCAT):
        return ""
    if layer.kind is Kind.TEMPORAL_POOL:
        return "global" if layer.global_pool else f"{st}x1^2 str"
    text = f"{kt}x{ks}^2"
    if layer.kind is Kind.BOTTLENECK:
        text += f" [{layer.width},{layer.width},{layer.out_channels}] x{layer.repeat}"
    elif layer.out_channels:
        text += f",{layer.out_channels}"
    if layer.channelwise:
        text += " chw"
    if (st, ss) != (1, 1):
        text += f" str {st}x{ss}^2"
    return text


def _apply(layer: LayerSpec, shape: ShapeState, pathway: str) -> tuple[ShapeState, int]:
    try:
        out = layer_output(layer, shape)
    except ValueError as exc:
        raise ValueError(f"{pathway}/{layer.name}: {exc}") from None
    return out, layer_params(layer, shape.c)


def propagate_shapes(spec: ArchSpec) -> list[LayerTrace]:
    """Trace every layer: its output shape, input channels and parameters.

    Rows for pathway layers report the layer's own output, before any lateral
    features are concatenated onto it.
    """
    rows: list[LayerTrace] = []

    def record(pathway: str, layer: LayerSpec, cin: int, out: ShapeState, params: int) -> None:
        rows.append(LayerTrace(pathway, layer.name, layer.kind.value, _kernel_text(layer), out, cin, params))

    def data_row(p: Pathway) -> LayerTrace:
        return LayerTrace(p.name, "data", "data", "", p.input, p.input.c, 0)

    # the second pathway runs first so its features are ready for laterals
    order = list(reversed(spec.pathways)) if spec.laterals else list(spec.pathways)
    lateral_by_layer = {lat.after: lat for lat in spec.laterals}
    lateral_out: dict[str, ShapeState] = {}
    ends: dict[str, ShapeState] = {}
    per_path: dict[str, list[LayerTrace]] = {}

    for p in order:
        start = len(rows)
        rows.append(data_row(p))
        shape = p.input
        is_source = spec.laterals and p is spec.pathways[1]
        is_target = spec.laterals and p is spec.pathways[0]
        for layer in p.layers:
            out, params = _apply(layer, shape, p.name)
            record(p.name, layer, shape.c, out, params)
            if is_source and layer.name in lateral_by_layer:
                lat = lateral_by_layer[layer.name].layer
                lat_shape, lat_params = _apply(lat, out, p.name)
                record(p.name, lat, out.c, lat_shape, lat_params)
                lateral_out[layer.name] = lat_shape
            if is_target and layer.name in lateral_out:
                lat_shape = lateral_out[layer.name]
                if (lat_shape.t, lat_shape.h, lat_shape.w) != (out.t, out.h, out.w):
                    raise ValueError(
                        f"{spec.name}: lateral after {layer.name} has shape {lat_shape}, "
                        f"which does not align with {p.name} output {out}"
                    )
                out = replace(out, c=out.c + lat_shape.c)
            shape = out
        for layer in p.merge:
            out, params = _apply(layer, shape, p.name)
            record(p.name, layer, shape.c, out, params)
            shape = out
        ends[p.name] = shape
        per_path[p.name] = rows[start:]

    # restore pathway order for reporting
    rows = [r for p in spec.pathways for r in per_path[p.name]]

    outs = [ends[p.name] for p in spec.pathways]
    if len({(s.t, s.h, s.w) for s in outs}) != 1:
        raise ValueError(f"{spec.name}: pathway outputs {', '.join(map(str, outs))} cannot be concatenated")
    shape = replace(outs[0], c=sum(s.c for s in outs))
    if len(outs) > 1:
        rows.append(LayerTrace("head", spec.merge_name, Kind.CONCAT.value, "", shape, shape.c, 0))
    for layer in spec.head:
        out, params = _apply(layer, shape, "head")
        record("head", layer, shape.c, out, params)
        shape = out
    return rows


def output_shape(spec: ArchSpec) -> ShapeState:
    return propagate_shapes(spec)[-1].shape


def count_params(spec: ArchSpec) -> int:
    return sum(r.params for r in propagate_shapes(spec))


def relative_error(spec: ArchSpec) -> float | None:
    if spec.reference_params is None:
        return None
    return count_params(spec) / spec.reference_params - 1.0


def format_millions(n: float) -> str:
    return f"{n / 1e6:.2f}M"


def is_close_to_reference(spec: ArchSpec) -> bool:
    err = relative_error(spec)
    return err is not None and math.fabs(err) <= spec.tolerance
