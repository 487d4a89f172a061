"""Domain models package.

Data types shared by every layer of the codec.

Models:
    FieldTables: GF(2^p) lookup tables.
    OpCounter: Transform operation counter.
    DegreeProfile: Edge-perspective degree distributions.
    SparseCode: GF(q) factor graph with edge labels.
    PeelStep / PeelOrder: Leaf-removal elimination structure.
    Prior / MessageState / NumericCounters: One message-passing run.
    RbpParams / BpParams: Engine parameters.
    SourceBlock / StreamHeader / CompressedBlock / ReconstructedBlock: Codec blocks.
    EncodeResult / EncodeReport / BpResult / EntropyEstimate: Service outcomes.
    RdPoint / SampleRecord / WefPoint: Analysis records.

Usage:
    >>> from gfqc.domain.models import SparseCode, RbpParams
"""

from .field import FieldTables, OpCounter
from .code import DegreeProfile, SparseCode, PeelStep, PeelOrder, check_degree_targets
from .messages import (
    BpParams,
    ConstantGamma,
    GammaSchedule,
    GeometricGamma,
    MessageState,
    NumericCounters,
    Prior,
    ProductStrategy,
    RbpParams,
    Schedule,
)
from .block import CompressedBlock, ReconstructedBlock, SourceBlock, StreamHeader
from .results import (
    BpResult,
    EncodeReport,
    EncodeResult,
    EntropyEstimate,
    RdPoint,
    SampleRecord,
    WefPoint,
)

__all__ = [
    # Field
    "FieldTables",
    "OpCounter",
    # Code structure
    "DegreeProfile",
    "SparseCode",
    "PeelStep",
    "PeelOrder",
    "check_degree_targets",
    # Message passing
    "BpParams",
    "ConstantGamma",
    "GammaSchedule",
    "GeometricGamma",
    "MessageState",
    "NumericCounters",
    "Prior",
    "ProductStrategy",
    "RbpParams",
    "Schedule",
    # Blocks
    "CompressedBlock",
    "ReconstructedBlock",
    "SourceBlock",
    "StreamHeader",
    # Results
    "BpResult",
    "EncodeReport",
    "EncodeResult",
    "EntropyEstimate",
    "RdPoint",
    "SampleRecord",
    "WefPoint",
]
