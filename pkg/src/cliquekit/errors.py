"""Exception types shared across the package."""


class GraphError(ValueError):
    """Invalid graph construction input."""


class DimacsError(ValueError):
    """Malformed DIMACS text."""


class Infeasible(Exception):
    """No solution satisfies the constraints (e.g. no clique of size >= k)."""


class GraphTooLarge(Exception):
    """Exhaustive enumeration refused because the graph exceeds the guard."""


class FilesTooMany(Exception):
    """Exhaustive file-combination scan refused because F exceeds the guard."""


class ConstraintViolation(AssertionError):
    """A decoded application answer failed its independent constraint check."""
