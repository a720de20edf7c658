"""Fixed density corpus shared by tests, scripts, and examples.

Each entry records the ground truth the verdict machinery is expected to
reproduce: whether the density is a volume cone at its stated dimension and
whether it satisfies the sampled measure-contraction check.  The
exponential-tilt entry fails the latter (the tilt kills the contraction
property far from the vertex), so the verdict must refuse it rather than
classify it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import space
from .functionals import CknParams

__all__ = ["CorpusEntry", "standard_corpus"]


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    density: space.Density
    dimension: float
    ckn: Optional[CknParams]
    is_cone: bool
    mcp_passes: bool


def _tabulated_exponential() -> space.Tabulated:
    # Node values of exp(x); segment interpolation is exponential when both
    # endpoint values are positive, so this tabulation is exact between nodes.
    nodes = tuple(i / 4.0 for i in range(5))
    return space.Tabulated(nodes=nodes, values=tuple(math.exp(x) for x in nodes))


def standard_corpus() -> tuple[CorpusEntry, ...]:
    """Ten densities: four cones, three truncated cones, one exponential
    tilt, two tabulated profiles."""
    return (
        CorpusEntry(
            name="cone-n2.5",
            density=space.PowerLaw(c=1.0, N=2.5),
            dimension=2.5,
            ckn=CknParams(p=4.0, q=1.0, N=2.5),
            is_cone=True,
            mcp_passes=True,
        ),
        CorpusEntry(
            name="cone-n3-c2",
            density=space.PowerLaw(c=2.0, N=3.0),
            dimension=3.0,
            ckn=None,
            is_cone=True,
            mcp_passes=True,
        ),
        CorpusEntry(
            name="cone-n4",
            density=space.PowerLaw(c=1.0, N=4.0),
            dimension=4.0,
            ckn=None,
            is_cone=True,
            mcp_passes=True,
        ),
        CorpusEntry(
            name="cone-n3.5-c0.5",
            density=space.PowerLaw(c=0.5, N=3.5),
            dimension=3.5,
            ckn=CknParams(p=3.0, q=0.5, N=3.5),
            is_cone=True,
            mcp_passes=True,
        ),
        CorpusEntry(
            name="truncated-n3",
            density=space.TruncatedPowerLaw(c=1.0, N=3.0, R=1.0),
            dimension=3.0,
            ckn=None,
            is_cone=False,
            mcp_passes=True,
        ),
        CorpusEntry(
            name="truncated-n2.5",
            density=space.TruncatedPowerLaw(c=1.0, N=2.5, R=1.0),
            dimension=2.5,
            ckn=CknParams(p=4.0, q=1.0, N=2.5),
            is_cone=False,
            mcp_passes=True,
        ),
        CorpusEntry(
            name="truncated-n4-r2",
            density=space.TruncatedPowerLaw(c=2.0, N=4.0, R=2.0),
            dimension=4.0,
            ckn=None,
            is_cone=False,
            mcp_passes=True,
        ),
        CorpusEntry(
            name="exponential-tilt",
            density=space.PowerLawExp(c=1.0, N=3.0, a=1.0),
            dimension=3.0,
            ckn=None,
            is_cone=False,
            mcp_passes=False,
        ),
        CorpusEntry(
            name="tabulated-flat",
            density=space.Tabulated(nodes=(0.0, 10.0), values=(1.0, 1.0)),
            dimension=3.0,
            ckn=None,
            is_cone=False,
            mcp_passes=True,
        ),
        CorpusEntry(
            name="tabulated-exp",
            density=_tabulated_exponential(),
            dimension=3.0,
            ckn=None,
            is_cone=False,
            mcp_passes=True,
        ),
    )
