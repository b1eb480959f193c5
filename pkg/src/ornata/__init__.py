"""ornata: mathematical ornament design toolkit.

Curve families in polar and parametric form, conformal complex maps,
implicit surface polygonization and rendering, curve stitching (string art),
platonic solids with nets and elevations, and self-supporting reciprocal
frames, all exportable to SVG, OBJ, PNG, and a JSON design document.
"""

__version__ = "0.1.0"
