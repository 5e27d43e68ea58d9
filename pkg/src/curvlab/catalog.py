"""Built-in metrics chosen to witness each case of the coincidence theorem."""

from __future__ import annotations

from .errors import InputError
from .specfile import MetricSpec, diagonal_grid


def _stereographic(n, sign):
    coords = tuple(f"x{k}" for k in range(1, n + 1))
    r2 = "+".join(f"{c}^2" for c in coords)
    conf = f"4/(1+{r2})^2" if sign > 0 else f"4/(1-({r2}))^2"
    return coords, diagonal_grid([conf] * n)


def _build():
    entries = []

    coords = ("x1", "x2", "x3", "x4")
    entries.append(MetricSpec(
        id="euclidean4", label="Euclidean space R^4", classification="flat", dimension=4,
        coordinates=coords, metric=diagonal_grid(["1"] * 4), sample_box=((-1.0, 1.0),) * 4,
    ))
    for n in (2, 3, 4):
        coords, grid = _stereographic(n, +1)
        entries.append(MetricSpec(
            id=f"sphere{n}", label=f"unit {n}-sphere, stereographic coordinates", classification="einstein",
            dimension=n, coordinates=coords, metric=grid, sample_box=((-1.0, 1.0),) * n,
        ))
    coords, grid = _stereographic(4, -1)
    entries.append(MetricSpec(
        id="hyperbolic4", label="hyperbolic 4-space, Poincare ball", classification="einstein", dimension=4,
        coordinates=coords, metric=grid, sample_box=((-0.25, 0.25),) * 4,
        validity_hint="|x| < 1; box keeps |x| <= 0.5",
    ))
    entries.append(MetricSpec(
        id="schwarzschild", label="Schwarzschild exterior, (t, r, theta, phi)", classification="einstein",
        dimension=4, coordinates=("t", "r", "th", "ph"),
        metric=diagonal_grid(["-(1-2*M/r)", "1/(1-2*M/r)", "r^2", "r^2*sin(th)^2"]),
        params={"M": 1.0}, sample_box=((0.0, 10.0), (3.0, 10.0), (0.5, 2.6), (0.0, 6.283185307179586)),
        validity_hint="r > 2M, 0 < theta < pi",
    ))
    entries.append(MetricSpec(
        id="desitter_like5", label="de Sitter 5-space, flat slicing (Ric = 4 g)", classification="einstein",
        dimension=5, coordinates=("t", "x", "y", "z", "w"),
        metric=diagonal_grid(["-1"] + ["exp(2*t)"] * 4),
        sample_box=((-0.5, 0.5),) + ((-1.0, 1.0),) * 4,
    ))
    entries.append(MetricSpec(
        id="aniso4", label="anisotropic diagonal metric (non-Einstein)", classification="non_einstein",
        dimension=4, coordinates=("x1", "x2", "x3", "x4"),
        metric=diagonal_grid(["1+x2^2", "1+2*x3^2", "1+3*x1^2", "1"]), sample_box=((-1.0, 1.0),) * 4,
    ))
    entries.append(MetricSpec(
        id="flrw4", label="matter-dominated FLRW, a(t) = t^(2/3)", classification="non_einstein",
        dimension=4, coordinates=("t", "x", "y", "z"),
        metric=diagonal_grid(["-1", "t^(4/3)", "t^(4/3)", "t^(4/3)"]),
        sample_box=((1.0, 2.0),) + ((-1.0, 1.0),) * 3, validity_hint="t > 0",
    ))
    entries.append(MetricSpec(
        id="weyl_nonclosed4", label="Euclidean metric with Weyl 1-form f = x1 dx2 (df != 0)",
        classification="weyl_nonclosed", dimension=4, coordinates=("x1", "x2", "x3", "x4"),
        metric=diagonal_grid(["1"] * 4), weyl_one_form=("0", "x1", "0", "0"), sample_box=((-1.0, 1.0),) * 4,
    ))
    entries.append(MetricSpec(
        id="aniso3", label="generic diagonal 3-metric (not projectively flat)", classification="non_einstein",
        dimension=3, coordinates=("x1", "x2", "x3"),
        metric=diagonal_grid(["1+x2^2", "1+2*x3^2", "1+3*x1^2"]), sample_box=((-1.0, 1.0),) * 3,
    ))
    return {e.id: e for e in sorted(entries, key=lambda e: e.id)}


CATALOG = _build()


def catalog_ids():
    return sorted(CATALOG)


def get_entry(entry_id) -> MetricSpec:
    try:
        return CATALOG[entry_id]
    except KeyError:
        raise InputError(f"unknown catalog entry {entry_id!r}; known: {', '.join(catalog_ids())}") from None
