"""Exception hierarchy shared by all adaptscan modules."""


class AdaptscanError(Exception):
    """Base class for every error raised by this package."""


class ModelError(AdaptscanError):
    """Problem with a model file or its parsed representation."""


class DSLSyntaxError(ModelError):
    def __init__(self, line, col, expected, text=None):
        self.line = line
        self.col = col
        self.expected = expected
        msg = f"line {line}, col {col}: expected {expected}"
        if text is not None:
            msg += f" (got {text!r})"
        super().__init__(msg)


class UnknownSymbol(ModelError):
    def __init__(self, name, line=None):
        self.name = name
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"unknown symbol {name!r}{where}")


class DuplicateName(ModelError):
    def __init__(self, name, line=None):
        self.name = name
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate name {name!r}{where}")


class OverrideWithoutDynamics(ModelError):
    def __init__(self, name, line=None):
        self.name = name
        self.line = line
        super().__init__(f"equilibrium override for {name!r}, which has no dyn entry")


class EvaluationError(AdaptscanError):
    pass


class UnboundSymbol(EvaluationError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"symbol {name!r} is not bound")


class NonFiniteResult(EvaluationError):
    pass


class GraphError(AdaptscanError):
    pass


class DegenerateEquation(GraphError):
    def __init__(self, label):
        self.label = label
        super().__init__(f"equation {label!r} contains no endogenous variable")


class NoPerfectMatching(GraphError):
    """No perfect matching exists.

    ``witness`` is a Hall violator: a set of vertices on ``witness_side``
    ("equations" or "variables") whose joint neighbourhood is strictly
    smaller than the set itself.
    """

    def __init__(self, matching_size, witness, witness_side="equations", neighbours=()):
        self.matching_size = matching_size
        self.witness = tuple(witness)
        self.witness_side = witness_side
        self.neighbours = tuple(neighbours)
        super().__init__(self._message())

    def _message(self):
        return (
            f"no perfect matching (maximum matching has {self.matching_size} edges); "
            f"Hall violator on {self.witness_side}: {{{', '.join(self.witness)}}} "
            f"has only {len(self.neighbours)} neighbour(s) {{{', '.join(self.neighbours)}}}"
        )


class SizeMismatch(NoPerfectMatching):
    def __init__(self, n_vars, n_eqs, matching_size, witness, witness_side, neighbours=()):
        self.n_vars = n_vars
        self.n_eqs = n_eqs
        super().__init__(matching_size, witness, witness_side, neighbours)

    def _message(self):
        return f"{self.n_vars} variables but {self.n_eqs} equations; " + super()._message()


class InvalidMatching(GraphError):
    pass


class TooLarge(GraphError):
    pass


class UnknownVertex(GraphError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown vertex {name!r}")


class NonDisjointSets(GraphError):
    pass


class UnknownInput(GraphError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown input {name!r}")


class UnknownEquation(GraphError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown equation {name!r}")


class NoNaturalCounterpart(GraphError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"equation {name!r} has no natural-labelling variable (static equation)")


class NoNaturalExtension(GraphError):
    pass


class NotApplicable(AdaptscanError):
    pass


class SimulationError(AdaptscanError):
    pass


class NonFiniteState(SimulationError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"state became non-finite at t={t:g}")


class InconsistentStatics(SimulationError):
    pass


class NoConvergence(SimulationError):
    def __init__(self, t, residual, failed=()):
        self.t = t
        self.residual = residual
        self.failed = tuple(failed)
        msg = f"no equilibrium by t={t:g} (max |dX/dt| = {residual:.3g})"
        if self.failed:
            shown = ", ".join(str(i) for i in self.failed[:10])
            more = "..." if len(self.failed) > 10 else ""
            msg += f"; failed samples: {shown}{more}"
        super().__init__(msg)


class UnknownParameter(SimulationError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown parameter {name!r}")


class StatsError(AdaptscanError):
    pass


class LengthMismatch(StatsError):
    pass


class ConstantInput(StatsError):
    pass


class TooFewSamples(StatsError):
    pass


class SingularConditioning(StatsError):
    pass


class ColumnMismatch(StatsError):
    pass
