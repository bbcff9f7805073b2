"""Learning default-implication systems from observation streams, and
reasoning over the induced median-graph model spaces."""

from .alphabet import FALSE, TRUE, Sigma
from .relations import DegenerateRecordError, Pcr, PocQuotient
from .geometry import DualSpace, enumerate_dual
from .propagation import belief_update, coherent_projection, propagate
from .snapshot_qual import QualSnapshot, Ranking, completion
from .snapshot_real import RealSnapshot, chernoff_bound

__all__ = [
    "FALSE",
    "TRUE",
    "Sigma",
    "Pcr",
    "PocQuotient",
    "DegenerateRecordError",
    "DualSpace",
    "enumerate_dual",
    "propagate",
    "coherent_projection",
    "belief_update",
    "QualSnapshot",
    "Ranking",
    "completion",
    "RealSnapshot",
    "chernoff_bound",
]

__version__ = "0.1.0"
