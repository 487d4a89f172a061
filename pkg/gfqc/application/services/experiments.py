"""Rate-distortion experiments over many encoded samples.

Three sweeps share one harness: the reinforcement constant gamma0 on a fixed
code, the code rate, and the number of removed checks b. Every sample draws
its source and its schedule seed from ``(master_seed, grid_index, sample)``,
so results do not depend on the worker count or on completion order.

A code whose leaf-removal core is not empty cannot carry a payload, but the
codeword reinforced BP finds still has a distortion. Such grid points (b = 0,
or an unlucky construction seed) are measured without building a stream and
are marked by their ``core_size``. Samples where the encoder gave up carry a
``nan`` distortion and only count towards ``failure_rate``.

Example:
    >>> service = ExperimentService(ExperimentConfig(experiment="gamma", grid=[0.88, 0.92, 0.96]))
    >>> [round(pt.distortion, 3) for pt in service.run()]
    [0.19, 0.186, 0.183]
    >>> service.write_tables("gamma_sweep", "results")
"""

import logging
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field, ValidationError, model_validator

from gfqc.application.services.codec import (
    CodecParams,
    bits_to_symbols,
    build_prior,
    distortion,
    encode,
    symbols_to_bits,
)
from gfqc.application.services.construction import code_for_bits
from gfqc.application.services.message_passing import run_rbp
from gfqc.application.services.peeling import leaf_removal
from gfqc.application.services.rate_distortion import (
    bound_curve,
    db_gap,
    rd_bound,
    tuned_parameters,
)
from gfqc.domain.errors import ConfigurationError, EncodeFailure
from gfqc.domain.models.block import MAX_B, MAX_SEED, SourceBlock
from gfqc.domain.models.code import PeelOrder, SparseCode
from gfqc.domain.models.messages import RbpParams
from gfqc.domain.models.results import RdPoint, SampleRecord
from gfqc.infrastructure.repositories.results import ResultWriter

logger = logging.getLogger(__name__)

PARAMETER_NAMES = {"gamma": "gamma0", "rate": "rate", "b": "b"}


class ExperimentConfig(BaseModel):
    """One experiment: a code tuple, a swept grid and encoder settings.

    Attributes:
        experiment: Which parameter is swept (``gamma``, ``rate`` or ``b``).
        grid: Values of the swept parameter.
        p: Field extension degree.
        n_bits: Block length in binary digits.
        rate: Design rate when it is not swept.
        b: Removed checks when b is not swept.
        seed: Code construction seed.
        construction: ``peg`` or ``random``.
        strength: Prior strength L.
        gamma0: Reinforcement constant when it is not swept.
        gamma1: Reinforcement decay.
        ell_max: Sweeps per trial.
        t_max: Encoder trials.
        epsilon: Message-stability precision.
        use_table: In rate sweeps, take (L, gamma0) from the tuned table.
        samples: Sources encoded per grid point.
        master_seed: Seed of every source and schedule.
        jobs: Worker processes.
        output: Directory for the result tables.
    """

    experiment: Literal["gamma", "rate", "b"]
    grid: List[float] = Field(min_length=1)
    p: int = Field(default=6, ge=1, le=8)
    n_bits: int = Field(default=1600, ge=2)
    rate: float = Field(default=0.33, gt=0.0, lt=1.0)
    b: int = Field(default=5, ge=0, le=MAX_B)
    seed: int = Field(default=7, ge=0, le=MAX_SEED)
    construction: Literal["peg", "random"] = "peg"
    strength: float = Field(default=1.5, ge=0.0)
    gamma0: float = Field(default=0.92, ge=0.0, le=1.0)
    gamma1: float = Field(default=1.0, ge=0.0, le=1.0)
    ell_max: int = Field(default=300, ge=1)
    t_max: int = Field(default=5, ge=1)
    epsilon: float = Field(default=1e-6, gt=0.0)
    use_table: bool = False
    samples: int = Field(default=50, ge=1)
    master_seed: int = Field(default=0, ge=0)
    jobs: int = Field(default=1, ge=1)
    output: Optional[str] = None

    @model_validator(mode="after")
    def check_grid(self) -> "ExperimentConfig":
        if self.experiment == "gamma" and not all(0.0 <= g <= 1.0 for g in self.grid):
            raise ValueError("gamma0 grid values must lie in [0, 1]")
        if self.experiment == "rate" and not all(0.0 < r < 1.0 for r in self.grid):
            raise ValueError("rate grid values must lie in (0, 1)")
        if self.experiment == "b" and not all(
            float(v).is_integer() and 0 <= v <= MAX_B for v in self.grid
        ):
            raise ValueError(f"b grid values must be integers in [0, {MAX_B}]")
        return self

    @property
    def parameter(self) -> str:
        return PARAMETER_NAMES[self.experiment]

    def point_settings(self, value: float) -> Dict[str, Union[int, float]]:
        """Code and encoder settings at one grid value."""
        settings: Dict[str, Union[int, float]] = {
            "rate": self.rate,
            "b": self.b,
            "strength": self.strength,
            "gamma0": self.gamma0,
        }
        if self.experiment == "gamma":
            settings["gamma0"] = value
        elif self.experiment == "rate":
            settings["rate"] = value
            if self.use_table:
                settings["strength"], settings["gamma0"] = tuned_parameters(value)
        else:
            settings["b"] = int(value)
        return settings


def parse_config_text(text: str) -> Dict[str, object]:
    """Parse ``key=value`` lines; ``#`` starts a comment, commas make lists.

    Raises:
        ConfigurationError: On a line without ``=``.
    """
    values: Dict[str, object] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigurationError(f"Line {number}: expected key=value, got {raw!r}")
        key = key.strip().replace("-", "_")
        value = value.strip()
        if "," in value or key == "grid":
            values[key] = [v.strip() for v in value.split(",") if v.strip()]
        else:
            values[key] = value
    return values


def load_config(path: Union[str, Path], **overrides: object) -> ExperimentConfig:
    """Read an experiment config file; keyword overrides win over the file."""
    values = parse_config_text(Path(path).read_text(encoding="utf-8"))
    values.update({k: v for k, v in overrides.items() if v is not None})
    return build_config(values)


def build_config(values: Dict[str, object]) -> ExperimentConfig:
    """Validate raw values into an ExperimentConfig.

    Raises:
        ConfigurationError: With every validation problem listed.
    """
    try:
        return ExperimentConfig.model_validate(values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigurationError(f"Invalid experiment config: {problems}") from e


@lru_cache(maxsize=16)
def _code_and_order(
    n_bits: int, rate: float, p: int, seed: int, b: int, construction: str
) -> Tuple[SparseCode, PeelOrder]:
    code = code_for_bits(n_bits, rate, p, seed, b, construction)
    order = leaf_removal(code)
    if not order.is_empty_core:
        logger.info(
            "Code (rate %.3f, b %d, seed %d) keeps a core of %d checks; "
            "measuring distortion without a payload",
            rate, b, seed, order.core_size,
        )
    return code, order


def _point_code(config: ExperimentConfig, value: float) -> Tuple[SparseCode, PeelOrder]:
    s = config.point_settings(value)
    return _code_and_order(
        config.n_bits, float(s["rate"]), config.p, config.seed, int(s["b"]),
        config.construction,
    )


def sample_seeds(master_seed: int, grid_index: int, sample: int) -> Tuple[int, int]:
    """``(source_seed, schedule_seed)`` of one sample."""
    state = np.random.SeedSequence([master_seed, grid_index, sample]).generate_state(2)
    return int(state[0]), int(state[1])


def _search(
    bits: np.ndarray, code: SparseCode, params: CodecParams
) -> Tuple[float, int, int, bool]:
    """Distortion of the codeword reinforced BP reaches; no payload is built."""
    symbols, _ = bits_to_symbols(bits, code.p)
    prior = build_prior(symbols, params.strength, code.p)
    try:
        result = run_rbp(code, prior, params.rbp)
    except EncodeFailure as failure:
        return math.nan, failure.iterations, failure.trials, True
    reconstructed = symbols_to_bits(result.codeword, code.p)[: len(bits)]
    return distortion(bits, reconstructed), result.iterations, result.trials, False


def run_sample(
    config: ExperimentConfig, grid_index: int, sample: int
) -> SampleRecord:
    """Encode one random source at one grid point.

    Codes with an empty core go through the full encoder; the others only
    run the codeword search. A failed sample has a ``nan`` distortion.
    """
    value = config.grid[grid_index]
    s = config.point_settings(value)
    code, order = _point_code(config, value)
    source_seed, schedule_seed = sample_seeds(config.master_seed, grid_index, sample)
    bits = np.random.default_rng(source_seed).integers(0, 2, size=config.n_bits)
    params = CodecParams(
        strength=float(s["strength"]),
        rbp=RbpParams(
            gamma0=float(s["gamma0"]),
            gamma1=config.gamma1,
            ell_max=config.ell_max,
            t_max=config.t_max,
            epsilon=config.epsilon,
            schedule_seed=schedule_seed,
        ),
    )
    if order.is_empty_core:
        report = encode(SourceBlock(bits), code, params, order=order)
        d = math.nan if report.fallback else report.distortion
        iterations, trials, failed = report.iterations, report.trials, report.fallback
    else:
        d, iterations, trials, failed = _search(bits, code, params)
    return SampleRecord(
        grid_index=grid_index,
        value=float(value),
        sample=sample,
        rate=code.rate,
        distortion=d,
        iterations=iterations,
        trials=trials,
        fallback=failed,
        core_size=order.core_size,
    )


def _run_task(task: Tuple[ExperimentConfig, int, int]) -> SampleRecord:
    return run_sample(*task)


def aggregate(
    config: ExperimentConfig, records: List[SampleRecord]
) -> List[RdPoint]:
    """Per-grid-point means; order of ``records`` does not matter.

    Distortion statistics cover the samples that reached a codeword and are
    ``nan`` when none did; iteration counts cover every sample.
    """
    by_point: Dict[int, List[SampleRecord]] = {}
    for rec in records:
        by_point.setdefault(rec.grid_index, []).append(rec)

    points = []
    for index in sorted(by_point):
        group = by_point[index]
        value = config.grid[index]
        code, order = _point_code(config, value)
        dists = [r.distortion for r in group if not r.fallback]
        mean_d = statistics.fmean(dists) if dists else math.nan
        if len(dists) > 1:
            std_d = statistics.stdev(dists)
        else:
            std_d = 0.0 if dists else math.nan
        mean_iters = statistics.fmean(r.iterations for r in group)
        mean_trials = statistics.fmean(r.trials for r in group)
        failures = sum(r.fallback for r in group)
        if failures:
            logger.info(
                "%s=%s: %d of %d samples failed", config.parameter, value, failures, len(group)
            )
        points.append(
            RdPoint(
                parameter=config.parameter,
                value=float(value),
                rate=code.rate,
                distortion=mean_d,
                samples=len(group),
                mean_iters=mean_iters,
                mean_trials=mean_trials,
                failure_rate=failures / len(group),
                iters_per_trial=mean_iters / mean_trials,
                std_distortion=std_d,
                shannon_distortion=rd_bound(code.rate),
                db_gap=db_gap(mean_d, code.rate) if dists else math.nan,
                core_size=order.core_size,
            )
        )
    return points


def run_experiment(
    config: ExperimentConfig,
) -> Tuple[List[RdPoint], List[SampleRecord]]:
    """Run every sample of every grid point.

    Returns:
        ``(points, records)`` with records sorted by grid point, then sample.
    """
    tasks = [
        (config, index, sample)
        for index in range(len(config.grid))
        for sample in range(config.samples)
    ]
    logger.info(
        "Running %s sweep: %d grid points x %d samples on %d worker(s)",
        config.parameter, len(config.grid), config.samples, config.jobs,
    )
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=max(1, config.samples // 4)))
    else:
        records = []
        for task in tasks:
            records.append(_run_task(task))
            if task[2] == config.samples - 1:
                logger.info("Finished %s=%s", config.parameter, config.grid[task[1]])

    records.sort(key=lambda r: (r.grid_index, r.sample))
    return aggregate(config, records), records


def gamma_sweep(config: ExperimentConfig) -> Tuple[List[RdPoint], List[SampleRecord]]:
    return run_experiment(config.model_copy(update={"experiment": "gamma"}))


def rate_sweep(config: ExperimentConfig) -> Tuple[List[RdPoint], List[SampleRecord]]:
    return run_experiment(config.model_copy(update={"experiment": "rate"}))


def b_sweep(config: ExperimentConfig) -> Tuple[List[RdPoint], List[SampleRecord]]:
    return run_experiment(config.model_copy(update={"experiment": "b"}))


class ExperimentService:
    """Runs one experiment and writes its result tables.

    Attributes:
        config: The experiment.
        points: Aggregated grid points, filled by ``run``.
        records: Per-sample records, filled by ``run``.

    Example:
        >>> service = ExperimentService(load_config("sweep.cfg"))
        >>> points = service.run()
        >>> service.write_tables("b_sweep")
    """

    def __init__(self, config: ExperimentConfig):
        """Initialize the experiment service.

        Args:
            config: Validated experiment.
        """
        self.config = config
        self.points: List[RdPoint] = []
        self.records: List[SampleRecord] = []

    def run(self) -> List[RdPoint]:
        """Run every sample and keep the points and records."""
        self.points, self.records = run_experiment(self.config)
        return self.points

    def write_tables(
        self, name: str, directory: Optional[Union[str, Path]] = None
    ) -> List[Path]:
        """Write ``<name>``, ``<name>_samples`` and the ``rd_bound`` reference.

        Args:
            name: Stem of the point table.
            directory: Output directory; defaults to ``config.output`` or ``.``.

        Returns:
            The CSV paths written.

        Raises:
            ConfigurationError: If ``run`` has not been called.
        """
        if not self.records:
            raise ConfigurationError("Run the experiment before writing its tables")
        writer = ResultWriter(directory or self.config.output or ".")
        tables = (
            (name, [pt.as_row() for pt in self.points]),
            (f"{name}_samples", [rec.as_row() for rec in self.records]),
            ("rd_bound", [{"distortion": d, "rate": r} for d, r in bound_curve()]),
        )
        return [writer.write(stem, rows)[0] for stem, rows in tables]
