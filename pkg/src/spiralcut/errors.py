"""Exception hierarchy. Every library error carries the module that raised it."""


class SpiralCutError(Exception):
    module = "spiralcut"

    def __str__(self):
        return f"{self.module}: {super().__str__()}"


class MeshError(SpiralCutError):
    module = "mesh"


class DegenerateInput(MeshError):
    pass


class NotARotation(MeshError):
    pass


class EmptySlice(MeshError):
    pass


class NonSimpleSlice(MeshError):
    pass


class VertexInside(MeshError):
    pass


class HorizontalDegenerate(MeshError):
    pass


class NotManifold(MeshError):
    pass


class GeneratorError(SpiralCutError):
    module = "generators"


class BadCount(GeneratorError):
    pass


class NonConvexProfile(GeneratorError):
    pass


class SelfIntersectingProfile(GeneratorError):
    pass


class SpiralError(SpiralCutError):
    module = "spiral"


class NotOnSurface(SpiralError):
    pass


class AmbiguousBand(SpiralError):
    pass


class NoNonacuteTurn(SpiralError):
    pass


class ExitNotAdjacent(SpiralError):
    pass


class UnfoldError(SpiralCutError):
    module = "unfold"


class PathNotSimpleOnSurface(UnfoldError):
    pass


class NumericalDrift(UnfoldError):
    pass


class OverlapError(SpiralCutError):
    module = "overlap"


class DomainError(OverlapError):
    pass


class FitDegenerate(OverlapError):
    pass


class ExperimentError(SpiralCutError):
    module = "experiments"


class TrialTimeout(ExperimentError):
    pass


class MonotonicityViolation(ExperimentError):
    """A larger n_spin overlapped after a smaller one did not."""
