# core/defaults.py
import math

# Reference cooling configuration (harmonic trap)
LAMB_DICKE = 5.0
THERMAL_QUANTA = 25.0
DOUGHNUT_ORDER = 2
DOUGHNUT_WIDTH = 4.0
PEAK_PULSE_AREA = 0.6 * math.pi
TSEP_RANGE = (0.1, 1.1)
NUM_PULSES = 2500
RNG_SEED = 0

# Numerical defaults
BASIS_SIZE = 300
GRID_POINTS = 2048
GRID_MARGIN = 1.25
GRID_MIN_PADDING = 5.0
MIN_GRID_POINTS = 16
POINTS_PER_BASIS_STATE = 4
QUADRATURE_ORDER = 32

# Working grid of the perturbed trap: h <= WELL_SAMPLING / sqrt(g)
WELL_SAMPLING = 0.15

# The finite-difference eigenproblem runs on an oversampled grid with
# spacing <= min(SOLVER_WELL_RESOLUTION / sqrt(g), SOLVER_LEVEL_RESOLUTION / n_max)
SOLVER_WELL_RESOLUTION = 0.004
SOLVER_LEVEL_RESOLUTION = 0.04
SOLVER_BATCH = 16

# Localizing potential
PERTURBED_EPSILON = 19e5
PERTURBED_G = 2000.0

CHECKPOINTS = (1500, 2500)

# Tolerances
BOUNDARY_DECAY = 1e-6
ORTHONORMALITY = 1e-6
TRUNCATION = 1e-4
EXCITATION_RANGE = 1e-6
NORMALIZATION = 1e-8
HERMITICITY = 1e-12
UNIT_TRACE = 1e-10
POSITIVITY = 1e-8

ANGULAR_DISTRIBUTIONS = ("flat", "dipole")
TSEP_KINDS = ("random-uniform", "fixed")
TRAP_KINDS = ("harmonic", "perturbed")

# Length unit a0 in which eta, alpha and g are quoted, and its size in
# sqrt(hbar / m nu): the oscillator length, or the ground-state rms width.
LENGTH_UNITS = {"oscillator": 1.0, "ground-rms": 0.5 ** 0.5}

# Exit codes
EXIT_CODES = {
    "ok": 0,
    "config": 2,
    "numerical": 3,
    "io": 4,
}
