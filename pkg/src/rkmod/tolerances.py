"""Default numerical thresholds, shared by the library and the CLI."""

# Positivity / Hermitian-symmetry checks (relative: scaled by 1 + norm).
PSD_TOL = 1e-9

# Least-squares membership / interpolation residuals (relative to 1 + target norm).
RESIDUAL_TOL = 1e-8

# Invertibility: smallest singular value must exceed eps * (1 + norm).
INVERT_EPS = 1e-8

# Singular/eigen values below RANK_CUTOFF * (largest value) count as zero.
RANK_CUTOFF = 1e-10
