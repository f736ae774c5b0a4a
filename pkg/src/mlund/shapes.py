"""Geometry constants for the synthetic generators.

None of these are prescribed by the method; they are conventions chosen so that
the generated data shows the intended multiscale structure under the
recommended graph parameters. Acceptance tests pin them.
"""

# Four 3-D Gaussians: two tight blobs near the origin, two wide blobs farther out.
GAUSSIANS_N = 4000
GAUSSIANS_CENTERS = ((-2.5, 0.0, 0.0), (2.5, 0.0, 0.0), (-7.0, 0.0, 0.0), (7.0, 0.0, 0.0))
GAUSSIANS_STDS = (0.8, 0.8, 1.2, 1.2)

# Three concentric annuli of equal areal density: (inner radius, outer radius).
RINGS_N = 5380
RINGS_ANNULI = ((0.5, 1.0), (1.6, 2.1), (2.92, 3.42))

# Two dumbbells and an extra blob in the plane.
BOTTLENECK_N = 6550
# Gaussian blobs: (center x, center y, std, count fraction).
BOTTLENECK_BLOBS = (
    (-5.0, 3.0, 0.8, 0.17),
    (-5.0, -3.0, 0.8, 0.17),
    (2.0, 3.0, 0.8, 0.17),
    (2.0, -3.0, 0.8, 0.17),
    (7.5, 0.0, 0.8, 0.17),
)
# Vertical uniform strips bridging each dumbbell: (x, y_low, y_high, half width, count fraction).
BOTTLENECK_BRIDGES = (
    (-5.0, -3.0, 3.0, 0.3, 0.075),
    (2.0, -3.0, 3.0, 0.3, 0.075),
)

# Trapezoid: four square blobs at the corners, gaps delta1 < delta2 < delta3.
TRAPEZOID_N = 400
TRAPEZOID_DELTAS = (1.0, 2.0, 4.0)
TRAPEZOID_BLOB_HALF_WIDTH = 0.05
