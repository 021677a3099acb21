# commands/darkstate.py
import numpy as np

from darkcool import ui
from darkcool.core.basis import build_basis
from darkcool.core.config_utils import load_config, run_metadata
from darkcool.core.csv_utils import OutputBundle, write_bundle
from darkcool.core.errors import RangeError
from darkcool.core.pulsemap import CycleOperators, beam_profile, dark_state_residual, reexcitation_rates


def run(args):
    """
    Dark-state residual and single-cycle excitation probability of the
    eigenstates 0..state for one value of nu*T_sep.
    """
    config = load_config(args.config, seed=args.seed)
    tsep = config.tsep_policy.midpoint() if args.tsep is None else args.tsep
    if not 0 <= args.state < config.basis_size:
        raise RangeError(f"state index must lie in [0, {config.basis_size}), got {args.state}")

    basis = build_basis(config)
    profile = beam_profile(config, basis.grid)
    count = args.state + 1
    rates = reexcitation_rates(CycleOperators.for_profile(profile, basis), count)
    residuals = []
    for n in range(count):
        state = np.zeros(basis.size, dtype=complex)
        state[n] = 1.0
        residuals.append(dark_state_residual(state, profile, basis, tsep))

    bundle = OutputBundle(run_metadata("darkstate", config, state=args.state, tsep=tsep))
    bundle.add("darkstate.csv", ["n", "residual", "zeta_n"], zip(range(count), residuals, rates))
    paths = write_bundle(args.out, bundle)
    ui.print_written(paths)
    return 0
