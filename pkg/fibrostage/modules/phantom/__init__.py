from fibrostage.modules.phantom.schemas import (
    ChannelMap,
    CohortEntry,
    CohortSpec,
    Ellipsoid,
    PhantomResult,
    PhantomSpec,
)
from fibrostage.modules.phantom.service import (
    generate,
    generate_cohort,
    grow_lesion,
    organ_mask,
    synthetic_scores,
    write_cohort,
)

__all__ = [
    "ChannelMap",
    "CohortEntry",
    "CohortSpec",
    "Ellipsoid",
    "PhantomResult",
    "PhantomSpec",
    "generate",
    "generate_cohort",
    "grow_lesion",
    "organ_mask",
    "synthetic_scores",
    "write_cohort",
]
