# commands/sweep.py
from darkcool import ui
from darkcool.core.config_utils import load_config, load_sweep_spec, run_metadata
from darkcool.core.csv_utils import OutputBundle, write_bundle
from darkcool.core.engine import sweep_order, sweep_width


def run(args):
    """
    Width sweep (fixed 2n) or joint (2n, alpha) sweep; P_g0 at each checkpoint.
    """
    config = load_config(args.config, seed=args.seed)
    spec = load_sweep_spec(args.sweep)
    progress = ui.show_progress() and args.jobs == 1

    if spec.parameter == "width":
        result = sweep_width(config, spec.values, spec.checkpoints, jobs=args.jobs, progress=progress)
    else:
        result = sweep_order(config, spec.pairs, spec.checkpoints, jobs=args.jobs, progress=progress)

    metadata = run_metadata(
        "sweep",
        config,
        sweep={
            "parameter": spec.parameter,
            "values": list(spec.values),
            "pairs": [list(pair) for pair in spec.pairs],
            "checkpoints": list(spec.checkpoints),
        },
        point_seeds=[point.seed for point in result.points],
    )
    bundle = OutputBundle(metadata)
    bundle.add("sweep.csv", ["param_name", "param_value", "checkpoint", "Pg0"], result.rows())
    paths = write_bundle(args.out, bundle)

    if result.points:
        ui.print_sweep_summary(result)
    ui.print_written(paths)
    return 0
