# commands/run.py
from darkcool import ui
from darkcool.core.basis import build_basis
from darkcool.core.config_utils import load_config, run_metadata
from darkcool.core.csv_utils import OutputBundle, write_bundle
from darkcool.core.engine import run_sequence
from darkcool.core.pulsemap import beam_profile


def run(args):
    """
    Full cooling sequence: per-pulse trajectory, final level populations and
    the final spatial density next to cos(theta(x)).
    """
    config = load_config(args.config, seed=args.seed)
    basis = build_basis(config)
    trajectory = run_sequence(config, basis=basis, keep_final_state=True, progress=ui.show_progress())
    profile = beam_profile(config, basis.grid)

    bundle = OutputBundle(run_metadata("run", config))
    bundle.add(
        "trajectory.csv",
        ["pulse", "Pg0", "zeta", "purity"],
        [(r.pulse, r.ground_population, r.zeta, r.purity) for r in trajectory.records],
    )
    bundle.add("occupation.csv", ["pulse", "mean_n"], [(r.pulse, r.mean_quanta) for r in trajectory.records])
    bundle.add(
        "populations.csv",
        ["n", "Pn"],
        enumerate(trajectory.records[-1].populations),
    )
    bundle.add(
        "spatial.csv",
        ["x", "density", "cos_profile"],
        zip(basis.grid.points, trajectory.final_density, profile.cosine()),
    )
    paths = write_bundle(args.out, bundle)

    ui.print_trajectory_summary(trajectory)
    ui.print_written(paths)
    return 0
