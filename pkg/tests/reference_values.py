"""Published reference values: per-model results and the layer output-size tables."""

# model, #params, threshold, TP, FP1, FP2, FN, F1
RESULTS = [
    ("small_2d_cnn_frame", 4.26e6, 0.957, 670, 39, 287, 321, 0.674),
    ("small_2d_cnn_flow", 4.26e6, 0.793, 662, 45, 1023, 329, 0.487),
    ("resnet50_2d_cnn_frame", 23.5e6, 0.964, 829, 54, 211, 162, 0.795),
    ("resnet50_2d_cnn_flow", 23.5e6, 0.865, 661, 53, 1163, 330, 0.461),
    ("small_3d_cnn", 4.39e6, 0.997, 795, 37, 169, 196, 0.798),
    ("small_cnn_lstm", 4.85e6, 0.983, 674, 17, 104, 317, 0.755),
    ("small_two_stream", 4.34e6, 0.973, 653, 36, 185, 338, 0.700),
    ("small_slowfast", 4.49e6, 0.996, 754, 31, 103, 237, 0.803),
    ("resnet50_3d_cnn", 32.2e6, 0.992, 775, 25, 54, 216, 0.840),
    ("resnet50_cnn_lstm", 24.6e6, 0.996, 791, 29, 38, 200, 0.856),
    ("resnet50_two_stream", 47.0e6, 0.997, 806, 49, 82, 185, 0.836),
    ("resnet50_slowfast", 36.7e6, 0.987, 824, 23, 83, 167, 0.858),
]

PARAM_TOLERANCE = {
    "small_2d_cnn_frame": 0.01,
    "small_2d_cnn_flow": 0.01,
    "small_3d_cnn": 0.01,
    "small_cnn_lstm": 0.01,
    "small_two_stream": 0.01,
    "small_slowfast": 0.03,
    "resnet50_2d_cnn_frame": 0.03,
    "resnet50_2d_cnn_flow": 0.03,
    "resnet50_3d_cnn": 0.03,
    "resnet50_cnn_lstm": 0.03,
    "resnet50_two_stream": 0.03,
    "resnet50_slowfast": 0.03,
}

_SMALL_2D = [
    ("conv1", "128^2x32"), ("pool1", "64^2x32"), ("conv2", "64^2x32"), ("pool2", "32^2x32"),
    ("conv3", "32^2x64"), ("pool3", "16^2x64"), ("conv4", "16^2x64"), ("pool4", "8^2x64"),
]
_RESNET_2D = [
    ("conv1", "112^2x64"), ("pool1", "56^2x64"), ("res2", "56^2x256"),
    ("res3", "28^2x512"), ("res4", "14^2x1024"), ("res5", "7^2x2048"),
]


def _cells():
    """Every printed output-size cell as (table, column, row, cell, targets).

    ``targets`` lists the (model, pathway, layer) rows the cell describes; a
    single printed cell can describe several models (frame and flow variants)
    or several pathways (both Two-Stream streams).
    """
    cells = []

    def add(table, column, row, cell, *targets):
        cells.append((table, column, row, cell, list(targets)))

    # small models
    f2, l2 = "small_2d_cnn_frame", "small_2d_cnn_flow"
    add("small", "0a", "data", "128^2x3", (f2, "frame", "data"))
    add("small", "0a", "data", "128^2x2", (l2, "flow", "data"))
    for row, cell in _SMALL_2D:
        add("small", "0a", row, cell, (f2, "frame", row), (l2, "flow", row))
    for row, cell in (("flatten", "4096"), ("dense1", "1024"), ("dense2", "2")):
        add("small", "0a", row, cell, (f2, "head", row), (l2, "head", row))

    m = "small_3d_cnn"
    add("small", "1a", "data", "16x128^2x3", (m, "main", "data"))
    for row, cell in [
        ("conv1", "16x128^2x32"), ("pool1", "8x64^2x32"), ("conv2", "8x64^2x32"), ("pool2", "4x32^2x32"),
        ("conv3", "4x32^2x64"), ("pool3", "2x16^2x64"), ("conv4", "2x16^2x64"), ("pool4", "1x8^2x64"),
    ]:
        add("small", "1a", row, cell, (m, "main", row))
    for row, cell in (("flatten", "4096"), ("dense1", "1024"), ("dense2", "2")):
        add("small", "1a", row, cell, (m, "head", row))

    m = "small_cnn_lstm"
    add("small", "2a", "data", "16x128^2x3", (m, "main", "data"))
    for row, cell in _SMALL_2D:
        add("small", "2a", row, "16x" + cell, (m, "main", row))
    for row, cell in (("flatten", "16x4096"), ("dense1", "16x1024"), ("lstm", "16x128"), ("dense2", "16x2")):
        add("small", "2a", row, cell, (m, "head", row))

    m = "small_two_stream"
    add("small", "3a", "data", "128^2x3", (m, "frame", "data"))
    add("small", "3a", "data", "128^2x32", (m, "flow", "data"))
    add("small", "3a", "conv0", "128^2x3", (m, "frame", "conv0"))
    add("small", "3a", "conv0", "128^2x3", (m, "flow", "conv0"))
    for row, cell in _SMALL_2D:
        add("small", "3a", row, cell, (m, "frame", row))
        add("small", "3a", row, cell, (m, "flow", row))
    for row, cell in (("fusion", "8^2x64"), ("flatten", "4096"), ("dense1", "1024"), ("dense2", "2")):
        add("small", "3a", row, cell, (m, "head", row))

    m = "small_slowfast"
    add("small", "4a", "data", "4x128^2x3", (m, "slow", "data"))
    add("small", "4a", "data", "16x128^2x3", (m, "fast", "data"))
    for row, slow, fast in [
        ("conv1", "4x128^2x32", "16x128^2x8"), ("pool1", "4x64^2x32", "16x64^2x8"),
        ("conv2", "4x64^2x32", "16x64^2x8"), ("pool2", "4x32^2x32", "16x32^2x8"),
        ("conv3", "4x32^2x64", "16x32^2x16"), ("pool3", "4x16^2x64", "16x16^2x16"),
        ("conv4", "4x16^2x64", "16x16^2x16"), ("pool4", "4x8^2x64", "16x8^2x16"),
    ]:
        add("small", "4a", row, slow, (m, "slow", row))
        add("small", "4a", row, fast, (m, "fast", row))
    for row, cell in (("fusion", "8^2x64"), ("flatten", "4096"), ("dense1", "1024"), ("dense2", "2")):
        add("small", "4a", row, cell, (m, "head", row))

    # ResNet-50 models
    f2, l2 = "resnet50_2d_cnn_frame", "resnet50_2d_cnn_flow"
    add("resnet", "0b", "data", "224^2x3", (f2, "frame", "data"))
    add("resnet", "0b", "data", "224^2x2", (l2, "flow", "data"))
    add("resnet", "0b", "conv0", "112^2x3", (l2, "flow", "conv0"))
    for row, cell in _RESNET_2D:
        add("resnet", "0b", row, cell, (f2, "frame", row), (l2, "flow", row))
    for row, cell in (("spatial_pool", "1^2x2048"), ("flatten", "2048"), ("dense", "2")):
        add("resnet", "0b", row, cell, (f2, "head", row), (l2, "head", row))

    m = "resnet50_3d_cnn"
    add("resnet", "1b", "data", "16x128^2x3", (m, "main", "data"))
    for row, cell in [
        ("conv1", "16x128^2x64"), ("pool1", "8x64^2x64"), ("res2", "8x64^2x256"),
        ("res3", "4x32^2x512"), ("res4", "2x16^2x1024"), ("res5", "1x8^2x2048"),
    ]:
        add("resnet", "1b", row, cell, (m, "main", row))
    for row, cell in (("spatial_pool", "1x1^2x2048"), ("flatten", "2048"), ("dense", "2")):
        add("resnet", "1b", row, cell, (m, "head", row))

    m = "resnet50_cnn_lstm"
    add("resnet", "2b", "data", "16x224^2x3", (m, "main", "data"))
    for row, cell in _RESNET_2D:
        add("resnet", "2b", row, "16x" + cell, (m, "main", row))
    for row, cell in (("spatial_pool", "16x1^2x2048"), ("flatten", "16x2048"), ("lstm", "16x128"), ("dense", "16x2")):
        add("resnet", "2b", row, cell, (m, "head", row))

    m = "resnet50_two_stream"
    add("resnet", "3b", "data", "224^2x3", (m, "frame", "data"))
    add("resnet", "3b", "data", "224^2x32", (m, "flow", "data"))
    add("resnet", "3b", "conv0", "224^2x3", (m, "frame", "conv0"))
    add("resnet", "3b", "conv0", "224^2x3", (m, "flow", "conv0"))
    for row, cell in _RESNET_2D:
        add("resnet", "3b", row, cell, (m, "frame", row))
        add("resnet", "3b", row, cell, (m, "flow", row))
    for row, cell in (("fusion", "7^2x2048"), ("spatial_pool", "1^2x2048"), ("flatten", "2048"), ("dense", "2")):
        add("resnet", "3b", row, cell, (m, "head", row))

    m = "resnet50_slowfast"
    add("resnet", "4b", "data", "2x128^2x3", (m, "slow", "data"))
    add("resnet", "4b", "data", "16x128^2x3", (m, "fast", "data"))
    for row, slow, fast in [
        ("conv1", "2x128^2x64", "16x128^2x8"), ("pool1", "2x64^2x64", "16x64^2x8"),
        ("res2", "2x64^2x256", "16x64^2x32"), ("res3", "2x32^2x512", "16x32^2x64"),
        ("res4", "2x16^2x1024", "16x16^2x128"), ("res5", "2x8^2x2048", "16x8^2x256"),
    ]:
        add("resnet", "4b", row, slow, (m, "slow", row))
        add("resnet", "4b", row, fast, (m, "fast", row))
    for row, cell in (("fusion", "1x1^2x2560"), ("flatten", "2560"), ("dense", "2")):
        add("resnet", "4b", row, cell, (m, "head", row))
    return cells


PRINTED_CELLS = _cells()


def parse_cell(cell: str) -> tuple[int, int, int]:
    """``[T x] [S^2 x] C`` to (t, s, c); absent T or S means 1."""
    t = s = 1
    parts = cell.split("x")
    c = int(parts[-1])
    for part in parts[:-1]:
        if part.endswith("^2"):
            s = int(part[:-2])
        else:
            t = int(part)
    return t, s, c


def traced_shape(traces, pathway: str, layer: str):
    """Output shape of ``layer`` in ``pathway``.

    A row that the printed table shows but the model does not have (the frame
    stream's ``conv0`` in Two-Stream models) passes its input through, so it
    takes the shape of the pathway's preceding row.
    """
    rows = [r for r in traces if r.pathway == pathway]
    for r in rows:
        if r.name == layer:
            return r.shape
    if layer == "conv0" and rows:
        return rows[0].shape
    raise KeyError(f"no row {pathway}/{layer}")


def cell_mismatches():
    """(column, row, cell, model, pathway, got) for every cell the engine does not reproduce."""
    from intake_detect.archspec import builtin_arch, propagate_shapes

    traces = {}
    bad = []
    for _, column, row, cell, targets in PRINTED_CELLS:
        want = parse_cell(cell)
        for model, pathway, layer in targets:
            if model not in traces:
                traces[model] = propagate_shapes(builtin_arch(model))
            s = traced_shape(traces[model], pathway, layer)
            if s.h != s.w or (s.t, s.h, s.c) != want:
                bad.append((column, row, cell, model, pathway, str(s)))
    return bad
