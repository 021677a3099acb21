# commands/eigen.py
from darkcool import ui
from darkcool.core.basis import (
    build_basis,
    effective_lamb_dicke,
    eigenstate_widths,
    harmonic_eigenbasis,
    potential_curve,
)
from darkcool.core.config_utils import load_config, run_metadata
from darkcool.core.csv_utils import OutputBundle, write_bundle


def run(args):
    """
    Eigenstate widths of the configured trap against the harmonic oscillator
    on the same grid, plus eigenpairs and the potential curve.
    """
    config = load_config(args.config, seed=args.seed)
    basis = build_basis(config)
    harmonic = basis if basis.kind == "harmonic" else harmonic_eigenbasis(basis.grid, basis.size)

    widths = eigenstate_widths(basis, args.count)
    reference = eigenstate_widths(harmonic, args.count)
    eta_eff = effective_lamb_dicke(basis, config.lamb_dicke, args.count)

    trap = config.internal_trap()
    bundle = OutputBundle(run_metadata("eigen", config, count=args.count))
    bundle.add("widths.csv", ["n", "width_trap", "width_harmonic"], zip(range(args.count), widths, reference))
    bundle.add(
        "eigenpairs.csv",
        ["n", "energy", "width"],
        zip(range(args.count), basis.energies[: args.count], widths),
    )
    bundle.add("lamb_dicke.csv", ["n", "eta_eff"], zip(range(args.count), eta_eff))
    bundle.add(
        "potential.csv",
        ["x", "potential", "harmonic"],
        zip(basis.grid.points, potential_curve(basis.grid, trap.epsilon, trap.g), potential_curve(basis.grid)),
    )
    if args.wavefunctions:
        bundle.add(
            "wavefunctions.csv",
            ["x"] + [f"psi_{n}" for n in range(basis.size)],
            ([x, *row] for x, row in zip(basis.grid.points, basis.wavefunctions)),
        )
    paths = write_bundle(args.out, bundle)

    if args.count:
        ui.print_widths(widths, reference)
    ui.print_written(paths)
    return 0
