"""Result records produced by the encoder and the analysis services."""

from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from gfqc.domain.models.block import CompressedBlock
from gfqc.domain.models.messages import MessageState


@dataclass(frozen=True, eq=False)
class EncodeResult:
    """Successful reinforced-BP run.

    Attributes:
        codeword: Symbols of the codeword reached.
        iterations: Sweeps over all trials.
        trials: Trials used, the successful one included.
    """

    codeword: np.ndarray
    iterations: int
    trials: int


@dataclass(frozen=True, eq=False)
class BpResult:
    """Outcome of a plain BP fixed-point run."""

    state: MessageState
    converged: bool
    iterations: int
    max_delta: float


@dataclass(frozen=True, eq=False)
class EncodeReport:
    """Everything ``encode`` learns about one block.

    Attributes:
        block: The compressed block.
        distortion: Normalized Hamming distance between source and reconstruction.
        iterations: Sweeps spent by the encoder.
        trials: Encoder trials used.
        fallback: Whether the raw fallback block was emitted.
        codeword: Codeword reached, or None for fallback blocks.
    """

    block: CompressedBlock
    distortion: float
    iterations: int
    trials: int
    fallback: bool
    codeword: Optional[np.ndarray] = None


@dataclass(frozen=True)
class EntropyEstimate:
    """Bethe entropy in nats and whether the state was only near a fixed point."""

    nats: float
    approximate: bool = False


@dataclass(frozen=True)
class RdPoint:
    """Aggregate of one experiment grid point.

    Attributes:
        parameter: Name of the swept parameter.
        value: Grid value of the swept parameter.
        rate: Code rate in bits per source bit.
        distortion: Mean distortion over samples that reached a codeword;
            ``nan`` when every sample failed.
        samples: Number of samples.
        mean_iters: Mean sweeps per sample.
        mean_trials: Mean encoder trials per sample.
        failure_rate: Fraction of samples where the encoder gave up.
        iters_per_trial: Mean sweeps per trial.
        std_distortion: Sample standard deviation of those distortions.
        shannon_distortion: D*(rate) from the rate-distortion bound.
        db_gap: ``10 log10(distortion / shannon_distortion)``.
        core_size: Leaf-removal core of the code; nonzero means no stream
            was built and only the codeword search was measured.
    """

    parameter: str
    value: float
    rate: float
    distortion: float
    samples: int
    mean_iters: float
    mean_trials: float
    failure_rate: float
    iters_per_trial: float
    std_distortion: float
    shannon_distortion: float
    db_gap: float
    core_size: int = 0

    def as_row(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SampleRecord:
    """Raw per-sample experiment result; ``distortion`` is ``nan`` for failed samples."""

    grid_index: int
    value: float
    sample: int
    rate: float
    distortion: float
    iterations: int
    trials: int
    fallback: bool
    core_size: int = 0

    def as_row(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class WefPoint:
    """One weight-enumerator estimate.

    Attributes:
        strength: Prior strength L.
        avg_distance: P-average distance per binary digit.
        entropy_density: Bethe entropy in bits per binary digit.
        converged: BP reached a fixed point and the entropy is not approximate.
        iterations: BP sweeps used.
        bound_rate: ``1 - H(avg_distance)`` for plotting against the curve.
    """

    strength: float
    avg_distance: float
    entropy_density: float
    converged: bool
    iterations: int
    bound_rate: float
    extra: Dict[str, Any] = field(default_factory=dict)

    def as_row(self) -> Dict[str, Any]:
        row = asdict(self)
        row.update(row.pop("extra"))
        return row
