"""Exception and warning types.

Every error carries a short ``code`` used as the machine-readable prefix of
CLI error lines.
"""


class MlundError(Exception):
    code = "ERROR"


class InvalidInput(MlundError, ValueError):
    code = "INVALID_INPUT"


class DisconnectedGraph(MlundError):
    code = "DISCONNECTED_GRAPH"

    def __init__(self, n_components: int):
        self.n_components = n_components
        super().__init__(
            f"graph has {n_components} connected components; "
            "increase the neighbor count N or the diffusion scale sigma"
        )


class DegenerateKernel(MlundError):
    code = "DEGENERATE_KERNEL"


class Lambda2Unity(MlundError):
    code = "LAMBDA2_UNITY"


class SingularComplement(MlundError):
    code = "SINGULAR_COMPLEMENT"


class DegenerateClustering(MlundError, ValueError):
    code = "DEGENERATE_CLUSTERING"


class BoundViolation(MlundError, AssertionError):
    code = "BOUND_VIOLATION"


class MlundWarning(UserWarning):
    pass


class AllScoresEqual(MlundWarning):
    pass


class EmptyJ(MlundWarning):
    pass


class NonPrimitiveBlock(MlundWarning):
    pass


class DefectiveComplement(MlundWarning):
    pass


class NoLocalMaxima(MlundWarning):
    pass
