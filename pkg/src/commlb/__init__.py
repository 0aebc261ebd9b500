"""Communication lower bounds via exact LPs and information costs.

Computes partition-bound linear programs over exact rationals, order-infinity
and Shannon information costs of pseudotranscripts, and the explicit
constructions converting between weighted tilings and pseudotranscripts,
with instance-level verification of every claimed inequality.
"""

from .core import (
    DEFAULT_TILE_CAP,
    ErrorFn,
    InputDistribution,
    ParseError,
    Relation,
    SizeLimitError,
    Tile,
    TileWeighting,
    ValidationError,
    average_tiling_error,
    enumerate_tiles,
    format_rational,
    parse_rational,
    tiling_error,
)
from .measures import (
    Channel,
    InfoValue,
    internal_cost,
    log2_exact,
    renyi_inf_cost,
    renyi_inf_mi,
    shannon_cost_of_pseudotranscript,
    shannon_mi,
)
from .pseudotranscript import (
    Factorization,
    FactorizationError,
    MinorWitness,
    Pseudotranscript,
    SupportWitness,
    average_pseudotranscript_error,
    channel_of,
    check_and_factorize,
    pseudotranscript_error,
)
from .bounds import (
    BoundResult,
    CertificateReport,
    prt,
    relaxed_prt,
    relaxed_prt_mu,
    verify_certificate,
)
from .constructions import (
    PruneResult,
    SliceResult,
    hyperbola_area_bound,
    lift,
    prune,
    slice_pseudotranscript,
)
from .protocols import (
    ProtocolTree,
    ZeroErrorResult,
    enumerate_trees,
    enumerate_zero_error,
    transcript_pseudotranscript,
)

__version__ = "0.1.0"

__all__ = [
    "BoundResult",
    "CertificateReport",
    "Channel",
    "DEFAULT_TILE_CAP",
    "ErrorFn",
    "Factorization",
    "FactorizationError",
    "InfoValue",
    "InputDistribution",
    "MinorWitness",
    "ParseError",
    "ProtocolTree",
    "PruneResult",
    "Pseudotranscript",
    "Relation",
    "SizeLimitError",
    "SliceResult",
    "SupportWitness",
    "Tile",
    "TileWeighting",
    "ValidationError",
    "ZeroErrorResult",
    "average_pseudotranscript_error",
    "average_tiling_error",
    "channel_of",
    "check_and_factorize",
    "enumerate_tiles",
    "enumerate_trees",
    "enumerate_zero_error",
    "format_rational",
    "hyperbola_area_bound",
    "internal_cost",
    "lift",
    "log2_exact",
    "parse_rational",
    "prt",
    "prune",
    "pseudotranscript_error",
    "relaxed_prt",
    "relaxed_prt_mu",
    "renyi_inf_cost",
    "renyi_inf_mi",
    "shannon_cost_of_pseudotranscript",
    "shannon_mi",
    "slice_pseudotranscript",
    "tiling_error",
    "transcript_pseudotranscript",
    "verify_certificate",
]
