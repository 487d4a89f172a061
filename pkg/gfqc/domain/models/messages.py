"""Message-passing models.

Defines the prior, the full message state of one BP/RBP run, the
reinforcement schedules and the validated parameter objects of the
message-passing engine.
"""

import enum
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np
from pydantic import BaseModel, Field

from gfqc.domain.models.code import SparseCode


class Schedule(str, enum.Enum):
    """Order in which check nodes fire within a sweep.

    Attributes:
        SEQUENTIAL: Random permutation of checks, each check using the freshest
            variable messages. Re-drawn every sweep from the trial's RNG.
        FLOODING: All variable messages, then all check messages, in parallel.
            Changes trajectories with respect to the sequential schedule.
    """

    SEQUENTIAL = "sequential"
    FLOODING = "flooding"


class ProductStrategy(str, enum.Enum):
    """How exclusive transform-domain products are formed at a check."""

    PREFIX_SUFFIX = "prefix_suffix"
    DIVISION = "division"


class GammaSchedule(Protocol):
    """Reinforcement exponent as a function of the sweep index."""

    def __call__(self, ell: int) -> float: ...


@dataclass(frozen=True)
class GeometricGamma:
    """``gamma(ell) = 1 - gamma0 * gamma1**ell``.

    Example:
        >>> GeometricGamma(1.0, 0.5)(0)
        0.0
    """

    gamma0: float
    gamma1: float

    def __call__(self, ell: int) -> float:
        return 1.0 - self.gamma0 * self.gamma1**ell


@dataclass(frozen=True)
class ConstantGamma:
    value: float

    def __call__(self, ell: int) -> float:
        return self.value


@dataclass(frozen=True, eq=False)
class Prior:
    """Per-variable external field centred on a source word.

    Attributes:
        vectors: ``(n_sym, q)`` normalized vectors
            ``mu1_v(a) ∝ exp(-L * popcount(a XOR y_v))``.
        strength: Field intensity L.
        source: Source symbols y the prior is centred on.
    """

    vectors: np.ndarray
    strength: float
    source: np.ndarray

    @property
    def n_sym(self) -> int:
        return self.vectors.shape[0]

    @property
    def q(self) -> int:
        return self.vectors.shape[1]


@dataclass
class NumericCounters:
    """Numerical events seen during a run.

    Attributes:
        annihilations: Check messages whose product vanished and were reset
            to uniform.
        floors: Variable messages or marginals floored at 1e-300 after a
            zero-probability collapse.
    """

    annihilations: int = 0
    floors: int = 0


@dataclass
class MessageState:
    """All messages and marginals of one BP/RBP run.

    Check-to-variable messages carry one extra all-ones row at index
    ``n_edges`` so padded edge lists can be multiplied without masking.

    Attributes:
        var_to_check: ``(n_edges, q)`` variable-to-check messages.
        c2v_padded: ``(n_edges + 1, q)`` check-to-variable messages plus sentinel.
        marginals: ``(n_sym, q)`` marginals g_v.
        iteration: Sweeps run since the last reset.
        counters: Numerical event counters.
    """

    var_to_check: np.ndarray
    c2v_padded: np.ndarray
    marginals: np.ndarray
    iteration: int = 0
    counters: NumericCounters = field(default_factory=NumericCounters)

    @classmethod
    def initial(cls, code: SparseCode, prior: Prior) -> "MessageState":
        """Uniform check messages, prior-valued variable messages and marginals."""
        q = code.q
        c2v = np.full((code.n_edges + 1, q), 1.0 / q)
        c2v[-1] = 1.0
        return cls(
            var_to_check=prior.vectors[code.edge_var].copy(),
            c2v_padded=c2v,
            marginals=prior.vectors.copy(),
        )

    @property
    def check_to_var(self) -> np.ndarray:
        return self.c2v_padded[:-1]

    def copy(self) -> "MessageState":
        return MessageState(
            var_to_check=self.var_to_check.copy(),
            c2v_padded=self.c2v_padded.copy(),
            marginals=self.marginals.copy(),
            iteration=self.iteration,
            counters=NumericCounters(self.counters.annihilations, self.counters.floors),
        )


class RbpParams(BaseModel):
    """Reinforced BP encoder parameters.

    Attributes:
        gamma0: Schedule constant gamma0 in [0, 1].
        gamma1: Schedule constant gamma1 in [0, 1].
        ell_max: Sweep cap per trial.
        t_max: Trial cap.
        epsilon: Message-stability precision.
        schedule_seed: Seed of the per-trial schedules and tie-breaking dither.
        stable_sweeps: Consecutive satisfied sweeps that declare polarization.
        schedule: Check firing order.
        strategy: Exclusive-product strategy at checks.
        dither: Amplitude of the random tie-breaking dither added before argmax.
    """

    gamma0: float = Field(default=0.92, ge=0.0, le=1.0)
    gamma1: float = Field(default=1.0, ge=0.0, le=1.0)
    ell_max: int = Field(default=300, ge=1)
    t_max: int = Field(default=5, ge=1)
    epsilon: float = Field(default=1e-6, gt=0.0)
    schedule_seed: int = Field(default=0, ge=0)
    stable_sweeps: int = Field(default=2, ge=1)
    schedule: Schedule = Schedule.SEQUENTIAL
    strategy: ProductStrategy = ProductStrategy.PREFIX_SUFFIX
    dither: float = Field(default=1e-12, ge=0.0)

    def gamma_schedule(self) -> GammaSchedule:
        return GeometricGamma(self.gamma0, self.gamma1)


class BpParams(BaseModel):
    """Plain BP fixed-point parameters (weight-enumerator runs).

    Attributes:
        damping: Weight of the previous check message, ``out = (1-d) new + d old``.
        ell_max: Sweep cap.
        epsilon: Message-stability precision.
        schedule_seed: Seed of the sequential schedule.
        schedule: Check firing order.
        strategy: Exclusive-product strategy at checks.
    """

    damping: float = Field(default=0.5, ge=0.0, lt=1.0)
    ell_max: int = Field(default=1000, ge=1)
    epsilon: float = Field(default=1e-6, gt=0.0)
    schedule_seed: int = Field(default=0, ge=0)
    schedule: Schedule = Schedule.SEQUENTIAL
    strategy: ProductStrategy = ProductStrategy.PREFIX_SUFFIX
