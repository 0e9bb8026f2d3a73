"""Exceptions shared by the solver layers."""


class SingularConfigurationError(RuntimeError):
    """A constraint configuration leaves a local or the coarse problem singular."""


class SingularLocalProblem(SingularConfigurationError):
    def __init__(self, subdomain: int, deficiency: int, what: str = "local problem"):
        self.subdomain = subdomain
        self.deficiency = deficiency
        super().__init__(f"subdomain {subdomain}: singular {what} (rank deficiency {deficiency})")


class CoarseMechanism(SingularConfigurationError):
    def __init__(self, deficiency: int):
        self.deficiency = deficiency
        super().__init__(f"coarse mechanism detected: coarse matrix rank deficiency {deficiency}")
