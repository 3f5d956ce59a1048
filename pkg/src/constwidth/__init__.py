"""Bodies of constant width 2 with simplex symmetries: support functions,
volumes, property checks, Monte Carlo estimates and boundary meshes."""

__version__ = "0.1.0"
