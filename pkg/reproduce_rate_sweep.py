"""Full rate sweep at q = 256 with the tuned (L, gamma0) table.

Long-running: nine rates, 12000-bit blocks, 50 samples each. Results go to
``results/rate_sweep/`` as CSV and JSON next to the theoretical bound.

    GFQC_LOG=INFO python reproduce_rate_sweep.py --jobs 8
"""

import argparse
import sys

from gfqc.application.services.experiments import ExperimentService, build_config
from gfqc.application.services.rate_distortion import RATE_TABLE
from gfqc.config import get_settings
from gfqc.infrastructure.diagnostics import configure_logging


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p", type=int, default=8)
    parser.add_argument("--nbits", type=int, default=12000)
    parser.add_argument("--b", type=int, default=5)
    parser.add_argument("--samples", type=int, default=50)
    parser.add_argument("--master-seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=get_settings().jobs)
    parser.add_argument("--out", default="results/rate_sweep")
    args = parser.parse_args()

    configure_logging(get_settings().log)
    config = build_config(
        {
            "experiment": "rate",
            "grid": sorted(RATE_TABLE),
            "p": args.p,
            "n_bits": args.nbits,
            "b": args.b,
            "construction": "random",
            "use_table": True,
            "samples": args.samples,
            "master_seed": args.master_seed,
            "jobs": args.jobs,
        }
    )
    service = ExperimentService(config)
    points = service.run()
    service.write_tables("rd_sweep", args.out)
    for pt in points:
        print(
            f"R={pt.rate:.3f} D={pt.distortion:.4f} D*={pt.shannon_distortion:.4f} "
            f"gap={pt.db_gap:.2f} dB fail={pt.failure_rate:.2f} core={pt.core_size}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
