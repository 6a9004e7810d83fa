"""Minimizing bending energy for a closed loop, then reading off multipliers.

An ellipse seed relaxes to the circle of the same length.  Fitting the
Euler-Lagrange relation to a circle recovers ``alpha = curvature**2`` and
the stationary-mKdV multiplier ``-alpha/2``.
"""
import numpy as np

from elastica_kit.curve_core import CurvatureProfile, reconstruct_curve, resample_arclength
from elastica_kit.minimizer import BoundaryConditions, estimate_multipliers, minimize_elastica

length, n = 2 * np.pi, 256
t = 2 * np.pi * np.arange(n) / n
seed = np.column_stack([1.3 * np.cos(t), 0.7 * np.sin(t)])
report = minimize_elastica(BoundaryConditions.loop(length, (0.0, 0.0)), n,
                           seed_curve=resample_arclength(seed, n, closed=True))
print(f"closed loop: energy {report.energy:.10f} vs circle {4 * np.pi**2 / length:.10f}")
kappa = np.diff(np.unwrap(report.angles)) * n / length
print(f"curvature spread along the loop: {np.ptp(kappa):.2e}")

radius = 0.8
circle = reconstruct_curve(CurvatureProfile(np.full(400, 1 / radius), 2 * np.pi * radius / 400,
                                            periodic=True))
alpha, beta, residual = estimate_multipliers(circle)
print(f"circle of radius {radius}: alpha {alpha:.10f} (1/r^2 = {1 / radius**2}), "
      f"beta {beta:+.1e}, fit residual {residual:.1e}")
print(f"stationary-mKdV multiplier -alpha/2 = {-alpha / 2:.10f}")
