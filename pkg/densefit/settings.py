"""Named defaults shared by the library, the CLI and the experiment configs"""

import math

# Image frame
FRAME_WIDTH = 224
FRAME_HEIGHT = 224

# Loss balance weights (3D, sparse 2D, dense) when all three terms are active
LAMBDA_3D = 10.0
LAMBDA_2D = 1.0
LAMBDA_DENSE = 10.0
# Weight given to every term when only one or two terms are active
LAMBDA_REDUCED = 10.0

# Optimizer
STEP_SIZE = 1e-2
BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1e-8
STEP_DECAY = 0.998
MAX_ITERS = 2000
TOLERANCE = 1e-6
CONVERGENCE_WINDOW = 10
STAGED_FRACTION = 0.1
LOG_EVERY = 100

# Rodrigues small-angle branch
SMALL_ANGLE = 1e-8

# Synthetic scene sampling
JOINT_ANGLE_RANGE = 0.4
ROOT_ANGLE_RANGE = math.pi / 4
SHAPE_CLIP = 2.0
FOCAL_RANGE = (0.8, 1.2)
TRANSLATION_RANGE = 0.1
DENSE_COUNT_RANGE = (100, 150)
MAX_RENDER_ATTEMPTS = 10

# Sweeps
NOISE_SIGMAS = (0.0, 5.0, 10.0, 20.0, 40.0)
KEEP_FRACTIONS = (1.0, 0.6, 0.1, 0.0)
THREE_D_FRACTION = 0.2

# Metrics
DKD_SAMPLES = 100
DKD_SEED = 0

# Mini model
MINI_MODEL_SEED = 0

# Charts
SVG_HASH_SALT = "densefit"

# Log format used by the CLI
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
