"""Algebraic circle fitting in the complex plane."""
import numpy as np

from .exceptions import DegenerateGeometry

# ratio of smallest to largest principal spread below which points count as collinear
_COLLINEAR_TOL = 1e-10


def circle_fit(points):
    """Taubin algebraic circle fit.

    Parameters
    ----------
    points : array_like of complex
        At least three non-collinear points.

    Returns
    -------
    center : complex
    radius : float
    """
    z = np.asarray(points, dtype=complex).ravel()
    if z.size < 3:
        raise DegenerateGeometry("circle fit needs at least 3 points")
    centroid = z.mean()
    x = z.real - centroid.real
    y = z.imag - centroid.imag

    spread = np.linalg.svd(np.column_stack([x, y]), compute_uv=False)
    if spread[0] == 0 or spread[1] <= _COLLINEAR_TOL * spread[0]:
        raise DegenerateGeometry("points are collinear or coincident")

    zz = x * x + y * y
    zmean = zz.mean()
    z0 = (zz - zmean) / (2.0 * np.sqrt(zmean))
    _, _, vt = np.linalg.svd(np.column_stack([z0, x, y]), full_matrices=False)
    a = vt[2].copy()
    a[0] /= 2.0 * np.sqrt(zmean)
    a3 = -zmean * a[0]
    if abs(a[0]) <= _COLLINEAR_TOL * np.hypot(a[1], a[2]):
        raise DegenerateGeometry("fitted circle radius diverges (points nearly collinear)")
    cx = -a[1] / (2.0 * a[0]) + centroid.real
    cy = -a[2] / (2.0 * a[0]) + centroid.imag
    radius = np.sqrt(a[1] ** 2 + a[2] ** 2 - 4.0 * a[0] * a3) / (2.0 * abs(a[0]))
    return complex(cx, cy), float(radius)
