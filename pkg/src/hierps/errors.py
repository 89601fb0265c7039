"""Exception types raised across the package."""


class NotStronglyConnected(ValueError):
    """A cluster digraph is not strongly connected."""

    def __init__(self, cluster: int):
        self.cluster = cluster
        super().__init__(f"cluster {cluster} is not strongly connected")


class EmptyCluster(ValueError):
    """A cluster contains no agents."""


class GenerationBudgetExceeded(RuntimeError):
    """Random graph generation hit the resample cap before succeeding."""


class MassUnderflow(ArithmeticError):
    """An agent's push-sum mass dropped below the double-precision floor.

    Signals a configuration whose fusion period and link-availability window
    starve an agent for so long that its estimate z/m is no longer meaningful.
    """


class IndexMismatch(ValueError):
    """A link schedule does not index the same edge set as the network."""


class NotRowStochastic(ValueError):
    """Matrix argument is expected to be row stochastic but is not."""


class DimensionMismatch(ValueError):
    """Array arguments have inconsistent shapes."""


class ParameterOutOfRange(ValueError):
    """A bound was evaluated outside its domain of validity."""


class MissingColumn(KeyError):
    """A CSV input lacks a column the plotter needs."""
