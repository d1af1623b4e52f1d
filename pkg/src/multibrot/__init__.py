"""Rational parameter-ray combinatorics of the Multibrot sets ``M_d``.

The package is organised bottom-up: :mod:`.circle` (exact angles and the
map ``theta -> d*theta``), :mod:`.symbolic` (kneading sequences and internal
addresses), :mod:`.lamination` (landing groups and the wake forest),
:mod:`.queries` (wakes, branch points, separation, fibers), :mod:`.numerics`
(ray tracing) and :mod:`.render` (figures).
"""

from .circle import (
    ONE,
    ZERO,
    Angle,
    AngleClass,
    angle,
    classify,
    format_angle,
    map_d,
    orientation,
    parse_angle,
    periodic_angles,
    preperiodic_angles,
)
from .errors import BoundExceeded, LaminationError, TraceStalled
from .lamination import (
    ComponentNode,
    Lamination,
    Leaf,
    MisiurewiczNode,
    add_preperiodic,
    bifurcation_angles,
    build,
    build_periodic,
)
from .queries import (
    BranchResult,
    FiberPartition,
    SameClass,
    SeparationWitness,
    Undecided,
    approximating_pairs,
    branch_point,
    characteristic_ray_pairs,
    fiber_partition,
    in_wake,
    misiurewicz_subwakes,
    same_comb_class,
    separate,
)
from .symbolic import (
    STAR,
    AngledInternalAddress,
    InternalAddress,
    KneadingSequence,
    angled_internal_address,
    internal_address,
    kneading_sequence,
    rho_address,
)

__version__ = "0.1.0"


def is_primitive(node: ComponentNode, lam: Lamination) -> bool:
    return lam.is_primitive(node)
