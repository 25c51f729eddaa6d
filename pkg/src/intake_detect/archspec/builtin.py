"""The twelve built-in model instantiations (ten models, two with frame/flow variants).

Small models keep conv biases and have no batch norm. ResNet-50 models use
bias-free convs with batch norm (two parameters per channel); dense layers
always carry a bias.
"""

from __future__ import annotations

from .engine import ArchSpec, Kind, Lateral, LayerSpec, Pathway, ShapeState

ALPHA = 4
BETA = 0.25
N_CLASSES = 2
LSTM_UNITS = 128

# Stage I #Params column of the results table
REFERENCE_PARAMS = {
    "small_2d_cnn_frame": 4.26e6,
    "small_2d_cnn_flow": 4.26e6,
    "small_3d_cnn": 4.39e6,
    "small_cnn_lstm": 4.85e6,
    "small_two_stream": 4.34e6,
    "small_slowfast": 4.49e6,
    "resnet50_2d_cnn_frame": 23.5e6,
    "resnet50_2d_cnn_flow": 23.5e6,
    "resnet50_3d_cnn": 32.2e6,
    "resnet50_cnn_lstm": 24.6e6,
    "resnet50_two_stream": 47.0e6,
    "resnet50_slowfast": 36.7e6,
}

TOLERANCE = {name: 0.03 if name.startswith("resnet50") else 0.01 for name in REFERENCE_PARAMS}
TOLERANCE["small_slowfast"] = 0.03


def _shape(t: int, s: int, c: int) -> ShapeState:
    return ShapeState(t, s, s, c)


# -- small family ---------------------------------------------------------

def _small_conv(name: str, c: int, kt: int = 1) -> LayerSpec:
    kind = Kind.CONV2D if kt == 1 else Kind.CONV3D
    return LayerSpec(name, kind, (kt, 3), c, has_bias=True)


def _small_pool(name: str, st: int = 1) -> LayerSpec:
    return LayerSpec(name, Kind.MAXPOOL, (st, 2), stride=(st, 2))


def _small_trunk(widths=(32, 32, 64, 64), kt: int = 1, pool_t: int = 1) -> tuple[LayerSpec, ...]:
    layers = []
    for i, c in enumerate(widths, start=1):
        layers += [_small_conv(f"conv{i}", c, kt), _small_pool(f"pool{i}", pool_t)]
    return tuple(layers)


def _small_head(lstm: bool = False) -> tuple[LayerSpec, ...]:
    head = [LayerSpec("flatten", Kind.FLATTEN), LayerSpec("dense1", Kind.DENSE, out_channels=1024)]
    if lstm:
        head.append(LayerSpec("lstm", Kind.LSTM, out_channels=LSTM_UNITS))
    head.append(LayerSpec("dense2", Kind.DENSE, out_channels=N_CLASSES))
    return tuple(head)


def _flow_adapter(bias: bool) -> LayerSpec:
    # only flow inputs: maps stacked flow channels to 3 channels
    return LayerSpec("conv0", Kind.CONV2D, (1, 3), 3, has_bias=bias, has_batchnorm=not bias)


def small_2d_cnn(flow: bool = False) -> ArchSpec:
    name = "small_2d_cnn_flow" if flow else "small_2d_cnn_frame"
    return ArchSpec(
        name,
        (Pathway("flow" if flow else "frame", _shape(1, 128, 2 if flow else 3), _small_trunk()),),
        head=_small_head(),
        reference_params=REFERENCE_PARAMS[name],
        tolerance=TOLERANCE[name],
        description="Small 2D CNN on a single " + ("optical flow field" if flow else "frame"),
    )


def small_3d_cnn() -> ArchSpec:
    return ArchSpec(
        "small_3d_cnn",
        (Pathway("main", _shape(16, 128, 3), _small_trunk(kt=3, pool_t=2)),),
        head=_small_head(),
        reference_params=REFERENCE_PARAMS["small_3d_cnn"],
        tolerance=TOLERANCE["small_3d_cnn"],
        description="Small 3D CNN over 16 frames",
    )


def small_cnn_lstm() -> ArchSpec:
    return ArchSpec(
        "small_cnn_lstm",
        (Pathway("main", _shape(16, 128, 3), _small_trunk()),),
        head=_small_head(lstm=True),
        reference_params=REFERENCE_PARAMS["small_cnn_lstm"],
        tolerance=TOLERANCE["small_cnn_lstm"],
        description="Small 2D CNN applied per frame, features fed to an LSTM",
    )


def small_two_stream() -> ArchSpec:
    return ArchSpec(
        "small_two_stream",
        (
            Pathway("frame", _shape(1, 128, 3), _small_trunk()),
            Pathway("flow", _shape(1, 128, 32), (_flow_adapter(bias=True),) + _small_trunk()),
        ),
        head=(LayerSpec("fusion", Kind.FUSION, (1, 1), 64, has_bias=True, channelwise=True),)
        + _small_head(),
        reference_params=REFERENCE_PARAMS["small_two_stream"],
        tolerance=TOLERANCE["small_two_stream"],
        description="Appearance and motion streams joined by channelwise conv fusion",
    )


def small_slowfast() -> ArchSpec:
    slow = _small_trunk()
    fast = _small_trunk(widths=(8, 8, 16, 16), kt=3)
    laterals = tuple(
        Lateral(f"pool{i}", LayerSpec(f"lateral{i}", Kind.LATERAL, (3, 1), c, (ALPHA, 1), has_bias=True))
        for i, c in enumerate((32, 32, 64, 64), start=1)
    )
    tpool = (LayerSpec("temporal_pool", Kind.TEMPORAL_POOL),)
    return ArchSpec(
        "small_slowfast",
        (
            Pathway("slow", _shape(4, 128, 3), slow, merge=tpool),
            Pathway("fast", _shape(16, 128, 3), fast, merge=tpool),
        ),
        head=(LayerSpec("fusion", Kind.FUSION, (1, 3), 64, has_bias=True),) + _small_head(),
        laterals=laterals,
        alpha=ALPHA,
        beta=BETA,
        reference_params=REFERENCE_PARAMS["small_slowfast"],
        tolerance=TOLERANCE["small_slowfast"],
        description="Slow (4 frames) and fast (16 frames) pathways with time-strided laterals",
    )


# -- ResNet-50 family ------------------------------------------------------

_STAGES = (("res2", 64, 3), ("res3", 128, 4), ("res4", 256, 6), ("res5", 512, 3))


def _bn_conv(name: str, kernel: tuple[int, int], c: int, stride=(1, 1)) -> LayerSpec:
    kind = Kind.CONV2D if kernel[0] == 1 else Kind.CONV3D
    return LayerSpec(name, kind, kernel, c, stride, has_batchnorm=True)


def _resnet_trunk(
    conv1=((1, 7), (1, 2)),
    pool1=((1, 3), (1, 2)),
    stem: int = 64,
    width_div: int = 1,
    stage_kt=(1, 1, 1, 1),
    stage_st=(1, 1, 1, 1),
) -> tuple[LayerSpec, ...]:
    layers = [
        _bn_conv("conv1", conv1[0], stem // width_div, conv1[1]),
        LayerSpec("pool1", Kind.MAXPOOL, pool1[0], stride=pool1[1]),
    ]
    for i, (name, width, n) in enumerate(_STAGES):
        w = width // width_div
        layers.append(
            LayerSpec(
                name,
                Kind.BOTTLENECK,
                (stage_kt[i], 3),
                4 * w,
                (stage_st[i], 1 if i == 0 else 2),
                repeat=n,
                has_batchnorm=True,
                width=w,
            )
        )
    return tuple(layers)


def _resnet_head(lstm: bool = False, pool: bool = True) -> tuple[LayerSpec, ...]:
    head = [LayerSpec("spatial_pool", Kind.SPATIAL_POOL)] if pool else []
    head.append(LayerSpec("flatten", Kind.FLATTEN))
    if lstm:
        head.append(LayerSpec("lstm", Kind.LSTM, out_channels=LSTM_UNITS))
    head.append(LayerSpec("dense", Kind.DENSE, out_channels=N_CLASSES))
    return tuple(head)


def resnet50_2d_cnn(flow: bool = False) -> ArchSpec:
    name = "resnet50_2d_cnn_flow" if flow else "resnet50_2d_cnn_frame"
    layers = ((_flow_adapter(bias=False),) if flow else ()) + _resnet_trunk()
    return ArchSpec(
        name,
        (Pathway("flow" if flow else "frame", _shape(1, 224, 2 if flow else 3), layers),),
        head=_resnet_head(),
        reference_params=REFERENCE_PARAMS[name],
        tolerance=TOLERANCE[name],
        description="ResNet-50 on a single " + ("optical flow field" if flow else "frame"),
    )


def resnet50_3d_cnn() -> ArchSpec:
    trunk = _resnet_trunk(
        conv1=((3, 5), (1, 1)),
        pool1=((3, 3), (2, 2)),
        stage_kt=(3, 3, 3, 3),
        stage_st=(1, 2, 2, 2),
    )
    return ArchSpec(
        "resnet50_3d_cnn",
        (Pathway("main", _shape(16, 128, 3), trunk),),
        head=_resnet_head(),
        reference_params=REFERENCE_PARAMS["resnet50_3d_cnn"],
        tolerance=TOLERANCE["resnet50_3d_cnn"],
        description="ResNet-50 inflated to 3D over 16 frames",
    )


def resnet50_cnn_lstm() -> ArchSpec:
    return ArchSpec(
        "resnet50_cnn_lstm",
        (Pathway("main", _shape(16, 224, 3), _resnet_trunk()),),
        head=_resnet_head(lstm=True),
        reference_params=REFERENCE_PARAMS["resnet50_cnn_lstm"],
        tolerance=TOLERANCE["resnet50_cnn_lstm"],
        description="ResNet-50 per frame, pooled features fed to an LSTM",
    )


def resnet50_two_stream() -> ArchSpec:
    return ArchSpec(
        "resnet50_two_stream",
        (
            Pathway("frame", _shape(1, 224, 3), _resnet_trunk()),
            Pathway("flow", _shape(1, 224, 32), (_flow_adapter(bias=False),) + _resnet_trunk()),
        ),
        head=(LayerSpec("fusion", Kind.FUSION, (1, 1), 2048, has_batchnorm=True, channelwise=True),)
        + _resnet_head(),
        reference_params=REFERENCE_PARAMS["resnet50_two_stream"],
        tolerance=TOLERANCE["resnet50_two_stream"],
        description="Two ResNet-50 streams joined by channelwise conv fusion",
    )


def resnet50_slowfast() -> ArchSpec:
    slow = _resnet_trunk(conv1=((1, 5), (1, 1)), stage_kt=(1, 1, 3, 3))
    fast = _resnet_trunk(conv1=((3, 5), (1, 1)), width_div=8, stage_kt=(3, 3, 3, 3))
    # fast runs at 16 frames, slow at 2: laterals stride 8 in time
    t_ratio = 16 // 2
    laterals = tuple(
        Lateral(after, LayerSpec(f"lateral_{after}", Kind.LATERAL, (3, 1), c, (t_ratio, 1), has_batchnorm=True))
        for after, c in (("pool1", 64), ("res2", 256), ("res3", 512), ("res4", 1024))
    )
    return ArchSpec(
        "resnet50_slowfast",
        (
            Pathway(
                "slow",
                _shape(2, 128, 3),
                slow,
                merge=(LayerSpec("spatial_pool", Kind.SPATIAL_POOL), LayerSpec("temporal_pool", Kind.TEMPORAL_POOL)),
            ),
            Pathway(
                "fast",
                _shape(16, 128, 3),
                fast,
                merge=(
                    LayerSpec("spatial_pool", Kind.SPATIAL_POOL),
                    LayerSpec("temporal_pool", Kind.TEMPORAL_POOL, (t_ratio, 1), stride=(t_ratio, 1), global_pool=False),
                    LayerSpec("temporal_fold", Kind.TEMPORAL_FOLD),
                ),
            ),
        ),
        head=_resnet_head(pool=False),
        laterals=laterals,
        merge_name="fusion",
        alpha=ALPHA,
        beta=BETA,
        reference_params=REFERENCE_PARAMS["resnet50_slowfast"],
        tolerance=TOLERANCE["resnet50_slowfast"],
        description="ResNet-50 slow (2 frames) and fast (16 frames) pathways with laterals",
    )


_BUILDERS = {
    "small_2d_cnn_frame": lambda: small_2d_cnn(flow=False),
    "small_2d_cnn_flow": lambda: small_2d_cnn(flow=True),
    "small_3d_cnn": small_3d_cnn,
    "small_cnn_lstm": small_cnn_lstm,
    "small_two_stream": small_two_stream,
    "small_slowfast": small_slowfast,
    "resnet50_2d_cnn_frame": lambda: resnet50_2d_cnn(flow=False),
    "resnet50_2d_cnn_flow": lambda: resnet50_2d_cnn(flow=True),
    "resnet50_3d_cnn": resnet50_3d_cnn,
    "resnet50_cnn_lstm": resnet50_cnn_lstm,
    "resnet50_two_stream": resnet50_two_stream,
    "resnet50_slowfast": resnet50_slowfast,
}

ARCH_NAMES = tuple(_BUILDERS)


def builtin_arch(name: str) -> ArchSpec:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown architecture {name!r}; valid names: {', '.join(ARCH_NAMES)}") from None
