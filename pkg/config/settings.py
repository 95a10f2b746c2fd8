"""
Global Settings and Configuration
=================================
Central configuration for the trapped-set toolkit.
All numerical tolerances, default horizons and output locations are defined
here for easy modification. Scenario-specific parameters live in
config/scenarios.py.
"""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# =============================================================================
# PATH CONFIGURATION
# =============================================================================
# Base directory of this project
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

# Output directories (one sub-directory per run is created below OUTPUT_DIR)
OUTPUT_DIR = os.environ.get('TRAPSCAPE_OUTPUT_DIR', os.path.join(BASE_DIR, "output"))

# Example scenario files shipped with the repository
SCENARIO_FILES_DIR = os.path.join(BASE_DIR, "config_files")

# Figure directory inside a run directory
FIGURES_SUBDIR = "figures"

# Name of the manifest written last into every run directory
MANIFEST_FILENAME = "manifest.json"

# =============================================================================
# SMOOTH CUTOFFS
# =============================================================================
# Order k of the polynomial smoothing used by every bump and step (C^k)
SMOOTHNESS_ORDER = 4

# =============================================================================
# FINITE DIFFERENCES
# =============================================================================
# Central-difference steps for gradients and Hessians
FD_STEP_GRADIENT = 1e-5
FD_STEP_HESSIAN = 1e-4

# Agreement thresholds between analytic and finite-difference derivatives
TOL_GRADIENT = 1e-6
TOL_HESSIAN = 1e-4

# =============================================================================
# INTEGRATOR
# =============================================================================
# solve_ivp method (order 8 with embedded 5/3 error estimate)
INTEGRATOR_METHOD = 'DOP853'

# Default relative tolerance; absolute tolerance is INTEGRATOR_TOL * ATOL_FACTOR
INTEGRATOR_TOL = 1e-11
ATOL_FACTOR = 1e-2

# Relative energy drift accepted over |t| <= ENERGY_CHECK_TIME
ENERGY_DRIFT_TOL = 1e-8
ENERGY_CHECK_TIME = 50.0

# =============================================================================
# FIXED POINTS
# =============================================================================
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 60
NEWTON_DIVERGENCE_RADIUS = 1e3
DEDUP_RADIUS = 1e-6

# Eigenvalues closer than this to the imaginary axis are not hyperbolic
SPECTRAL_TOL = 1e-6

# =============================================================================
# TRAPPED SET
# =============================================================================
# Escape radius is the symbol's support radius plus this margin
ESCAPE_RADIUS_MARGIN = 2.0

# Classification horizon (both time directions)
DEFAULT_HORIZON = 200.0

# Distance to a hyperbolic fixed point that counts as lying on its
# stable/unstable manifold to sampling resolution
CAPTURE_TOL = 1e-4

# Trapped samples farther than this from the fixed points and heteroclinics fail the geometry check
TRAPPED_DISTANCE_TOL = 1e-2

# Energy-shell bracketing tolerance
SHELL_TOL = 1e-10

# =============================================================================
# HETEROCLINIC SHOOTING
# =============================================================================
LAUNCH_OFFSET = 1e-6
CAPTURE_RADIUS = 1e-3
SHOOTING_ANGLES = 64
SHOOTING_HORIZON = 80.0

# =============================================================================
# ESCAPE FUNCTION
# =============================================================================
QUAD_TOL = 1e-9
DENOM_FLOOR = 1e-8
FLOOR_TOL = 1e-6
NU_MIN = 1e-4
NU_BISECTIONS = 12
TUBE_RADIUS = 2e-2

# Transport identities of G_0: tolerance and flow-time difference step
IDENTITY_TOL = 1e-6
IDENTITY_FLOW_STEP = 5e-2
PSD_TOL = 1e-9
SURFACE_TOL = 1e-8

# Taper shrink retries after every nu in [NU_MIN, 1] failed
TAPER_RETRIES = 2

# Tube samples per Omega hit for the flow-confinement check
CONFINEMENT_SAMPLES = 8

# Quartic escape windows chi_zeta (radii around |xi| = zeta) and the compact radius
WINDOW_INNER = 0.1
WINDOW_OUTER = 0.3
COMPACT_RADIUS = 4.0

# delta of the matrix escape function (y eta + delta x xi (1 - g_x g_y)) Id
MATRIX_ESCAPE_DELTA = 0.005

# =============================================================================
# DEGREE DIAGNOSTIC
# =============================================================================
COLLISION_TOL = 1e-4
DENOM_TOL = 1e-12

# =============================================================================
# FRACTAL CONSTRUCTION
# =============================================================================
PHASE_NU_MIN = 0.02
PHASE_NU_MAX = 0.2
PHASE_ALPHA = 1.0

# x~2 grid step of the fiber scan is nu / FRACTAL_RES_DIVISOR
FRACTAL_RES_DIVISOR = 2048

# Box-count fit drops this many scales at each end of the ladder
BOX_DROP = 2
BOX_CONFIDENCE = 0.95

# Accepted |fitted - target| of the heteroclinic-set dimension
DIMENSION_TOL = 0.15
# ... and of the unmodified sheet (target 2)
DIMENSION_TOL_SHEET = 0.1

# Product clouds larger than this are written with a row stride
CLOUD_CSV_ROWS = 200000

# =============================================================================
# PERFORMANCE
# =============================================================================
# Worker processes for sampling sweeps (1 = serial)
WORKERS = int(os.environ.get('TRAPSCAPE_WORKERS', '1'))

# Show tqdm progress bars on long sweeps
SHOW_PROGRESS = os.environ.get('TRAPSCAPE_PROGRESS', '1').lower() in ('1', 'true', 'yes')

# =============================================================================
# OUTPUT FORMATTING
# =============================================================================
# CSV floats carry 17 significant digits; JSON floats keep their exact repr
CSV_FLOAT_FORMAT = '%.17g'

# Fixed salt so SVG ids are reproducible
SVG_HASH_SALT = 'trapscape'


def ensure_directories(run_dir=None):
    """Create the output tree (and a run directory if given)."""
    os.makedirs(OUTPUT_DIR, exist_ok=True)
    if run_dir is not None:
        os.makedirs(run_dir, exist_ok=True)
