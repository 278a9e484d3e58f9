import argparse
import logging

import numpy as np

from clocknet.cli.common import add_common_arguments, emit, output_dir, resolve, write_resolved
from clocknet.schemas.protocol import NoiseConfig
from clocknet.schemas.trace import SamplerKind
from clocknet.services.sampling_service import SamplingService
from clocknet.services.storage_service import StorageService

logger = logging.getLogger(__name__)

INSET_SECONDS = 2.0


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("simulate", help="generate a sampled signal trace")
    add_common_arguments(parser)
    parser.add_argument("--exact", action="store_true", help="noiseless expectation trace (no shot noise)")
    parser.add_argument("--plot-data", action="store_true", help="also write the trace inset as an x/y series")
    parser.set_defaults(handler=run, action="generate trace")


def run(args: argparse.Namespace) -> int:
    config = resolve(args)
    if args.exact:
        config = config.model_copy(
            update={
                "trace": config.trace.model_copy(
                    update={"sampler": SamplerKind.EXACT_EXPECTATION, "noise": NoiseConfig()}
                )
            }
        )

    trace = SamplingService.generate_trace(config.to_trace_config(), threads=config.threads)

    directory = output_dir(config)
    write_resolved(config, directory)
    path = StorageService.write_trace(trace, directory / "trace.csv")
    outputs = {"trace": str(path)}

    if args.plot_data:
        x = config.spectra.outcome
        inset = trace.times <= INSET_SECONDS
        outputs["inset"] = str(
            StorageService.write_plot_series(
                directory / "trace_inset.csv", trace.times[inset], trace.estimate(x)[inset], ["t_s", f"p{x}"]
            )
        )

    emit(
        {
            "points": trace.n_points,
            "shots": trace.shots,
            "sampler": config.trace.sampler.value,
            "seed": trace.seed,
            "mean_null_rate": float(np.mean(trace.null_rate)),
            "outputs": outputs,
        }
    )
    return 0
