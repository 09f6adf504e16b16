"""Exception hierarchy shared by the library and the CLI."""


class AerocastError(Exception):
    """Base class for all library errors."""


class GeometryError(AerocastError, ValueError):
    pass


class NoIntersection(GeometryError):
    """A segment misses a sphere it was required to cross."""


class DegenerateRay(GeometryError):
    """Ray origin coincides with the sphere center."""


class Disjoint(GeometryError):
    pass


class Contained(GeometryError):
    pass


class Tangent(GeometryError):
    """Spheres touch in a single point; treated as non-overlapping."""


class Unreachable(AerocastError):
    def __init__(self, ids):
        self.ids = sorted(ids)
        super().__init__(f"drones unreachable from source: {self.ids}")


class Uncoverable(AerocastError):
    pass


class NoPath(AerocastError):
    def __init__(self, src, dst):
        self.src, self.dst = src, dst
        super().__init__(f"no overlap-graph path from {src} to {dst}")


class DegenerateGeometry(AerocastError):
    """Entry/exit points C or D do not exist for a transition."""


class PlanningFailure(AerocastError):
    pass


class InvalidScenario(AerocastError, ValueError):
    pass


class NoData(AerocastError):
    """No receiver got any packet, so an average is undefined."""


class InvalidRequest(AerocastError, ValueError):
    """A transition request violates its own invariants."""
