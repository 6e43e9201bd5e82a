"""Columnar text format for sampled grid functions, and grid helpers.

    dims 1
    spacings 0.1 0.1
    extents 64 64
    origin -3.2 -3.2
    support full
    data
    0.0013 0.0
    ...

``dims`` counts spatial axes; spacings, extents and origin list the spatial
axes followed by time. Samples follow in row-major order, one ``re [im]`` per line.
"""

from pathlib import Path

import numpy as np

from src.core.exceptions import SpecSyntaxError
from src.hormander.schemas import AnisoGridFunction

_HEADER_KEYS = ("dims", "spacings", "extents", "origin", "support")


def angular_frequencies(w: AnisoGridFunction) -> list[np.ndarray]:
    """Continuum angular frequency of every DFT bin, per axis."""
    return [2 * np.pi * np.fft.fftfreq(n, d=h) for n, h in zip(w.extents, w.spacings)]


def edge_magnitude(w: AnisoGridFunction) -> tuple[float, tuple[int, ...]]:
    """Largest |w| on the outer faces of the grid and its index.

    With support "plus" the lower time face is the cut t = 0 and is not an edge.
    """
    magnitude = np.abs(w.samples)
    mask = np.zeros(magnitude.shape, dtype=bool)
    for axis in range(magnitude.ndim):
        upper = [slice(None)] * magnitude.ndim
        upper[axis] = -1
        mask[tuple(upper)] = True
        if not (w.support == "plus" and axis == magnitude.ndim - 1):
            lower = [slice(None)] * magnitude.ndim
            lower[axis] = 0
            mask[tuple(lower)] = True
    edges = np.where(mask, magnitude, 0.0)
    index = np.unravel_index(int(np.argmax(edges)), edges.shape)
    return float(edges[index]), tuple(int(i) for i in index)


def _numbers(line_no: int, key: str, values: list[str], kind=float) -> tuple:
    try:
        return tuple(kind(v) for v in values)
    except ValueError as exc:
        raise SpecSyntaxError(f"bad value in {key!r} header", line=line_no, column=1) from exc


def read_grid_file(path: str | Path) -> AnisoGridFunction:
    header: dict[str, tuple] = {}
    samples: list[complex] = []
    in_data = False
    for line_no, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if in_data:
            parts = line.split()
            if len(parts) > 2:
                raise SpecSyntaxError("expected 're [im]'", line=line_no, column=1)
            re, im = _numbers(line_no, "data", parts + ["0"] * (2 - len(parts)))
            samples.append(complex(re, im))
            continue
        key, *values = line.split()
        if key == "data":
            in_data = True
        elif key not in _HEADER_KEYS:
            raise SpecSyntaxError(f"unknown header {key!r}", line=line_no, column=1)
        elif key == "support":
            if len(values) != 1:
                raise SpecSyntaxError("support takes one value", line=line_no, column=1)
            header[key] = tuple(values)
        else:
            header[key] = _numbers(line_no, key, values, int if key in ("dims", "extents") else float)

    for key in ("dims", "spacings", "extents"):
        if key not in header:
            raise SpecSyntaxError(f"missing {key!r} header", line=None, column=None)
    if not in_data:
        raise SpecSyntaxError("missing 'data' section", line=None, column=None)
    if len(header["extents"]) != header["dims"][0] + 1:
        raise SpecSyntaxError("extents must list dims + 1 axes", line=None, column=None)

    return AnisoGridFunction(
        spacings=header["spacings"],
        extents=header["extents"],
        samples=np.asarray(samples, dtype=complex),
        origin=header.get("origin"),
        support=header.get("support", ("full",))[0],
    )


def write_grid_file(path: str | Path, w: AnisoGridFunction) -> None:
    lines = [
        f"dims {w.spatial_dim}",
        "spacings " + " ".join(repr(float(h)) for h in w.spacings),
        "extents " + " ".join(str(n) for n in w.extents),
    ]
    if w.origin is not None:
        lines.append("origin " + " ".join(repr(float(v)) for v in w.origin))
    lines.append(f"support {w.support}")
    lines.append("data")
    lines.extend(f"{float(z.real)!r} {float(z.imag)!r}" for z in w.samples.ravel())
    Path(path).write_text("\n".join(lines) + "\n")
