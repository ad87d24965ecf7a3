"""Registry of the built-in weighted actions.

Each preset records the weight matrix, the space it acts on and a short note
on the geometric locus it reproduces; `evaluation_only` marks actions whose
invariant-subvariety kernels are out of scope (only the moment map is
evaluated there).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .weights import WeightedAction, validate_action


@dataclass(frozen=True)
class Preset:
    preset_id: str
    W: tuple[tuple[int, ...], ...]
    note: str
    evaluation_only: bool = False

    def action(self) -> WeightedAction:
        return validate_action(np.array(self.W, dtype=np.int64))


_PRESETS = [
    Preset(
        "p1-standard",
        ((1, 1),),
        "unweighted circle action on the projective line; every diagonal is the classical one",
    ),
    Preset(
        "p1-weighted-s2",
        ((1, 2),),
        "weights (1,2) on the projective line; moment image [1,2], order-2 stabilizer at [0:1]",
    ),
    Preset(
        "p1-weighted-s3",
        ((1, 3),),
        "weights (1,3) on the projective line; also the conic-restricted model of the (1,2,3) action",
    ),
    Preset(
        "p2-circle-123",
        ((1, 2, 3),),
        "weights (1,2,3) on the projective plane; moment image [1,3], quadratic isotype growth",
    ),
    Preset(
        "p3-circle-1234",
        ((1, 2, 3, 4),),
        "weights (1,2,3,4) on P^3; preserves the Segre quadric x1 x2 = x0 x3",
    ),
    Preset(
        "p4-circle-12345",
        ((1, 2, 3, 4, 5),),
        "weights (1,2,3,4,5) on P^4; preserves the quadric x0 x4 + x1 x3 + x2^2 = 0",
    ),
    Preset(
        "grassmann-plucker",
        ((1, 2, 3, 3, 4, 5),),
        "Pluecker-coordinate weights on P^5 restricting to the Klein quadric / G(2,4); "
        "moment-map evaluation only",
        evaluation_only=True,
    ),
    Preset(
        "p1-t2",
        ((1, 0), (0, 1)),
        "coordinate 2-torus on the projective line; single-monomial isotypes, "
        "on-ray locus p = varpi/|varpi|",
    ),
    Preset(
        "p2-t2",
        ((1, 0, 1), (0, 1, 1)),
        "2-torus (t, s, ts) on the projective plane; isotype dimension 1 + k*min(varpi)",
    ),
]

REGISTRY: dict[str, Preset] = {p.preset_id: p for p in _PRESETS}


def get_action(preset_id: str) -> WeightedAction:
    if preset_id not in REGISTRY:
        raise KeyError(f"unknown preset {preset_id!r}")
    return REGISTRY[preset_id].action()


def list_presets() -> list[Preset]:
    return list(_PRESETS)
