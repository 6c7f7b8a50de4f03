"""ordlab: chain decomposition and homogeneous-chain extraction on poset truncations."""

from .errors import OrdlabError
from .order_core import (
    FamilySpec,
    FinitePoset,
    Kind,
    Ordering,
    Poset,
    StreamedPoset,
    classify_set,
    codec_roundtrip,
    compare,
    generate,
    truncate,
    width_exact,
    width_exhaustive,
)
from .stages import InjectionSpec, StageTruth

__version__ = "0.1.0"

__all__ = [
    "FamilySpec",
    "FinitePoset",
    "InjectionSpec",
    "Kind",
    "Ordering",
    "OrdlabError",
    "Poset",
    "StageTruth",
    "StreamedPoset",
    "classify_set",
    "codec_roundtrip",
    "compare",
    "generate",
    "truncate",
    "width_exact",
    "width_exhaustive",
]
