"""Exception hierarchy shared by all subpackages."""


class WLError(Exception):
    """Base class for every error raised by :mod:`wlrefine`."""


class GraphError(WLError, ValueError):
    pass


class OutOfRangeVertex(GraphError):
    pass


class SelfLoop(GraphError):
    pass


class ConflictingEdgeLabel(GraphError):
    pass


class MemoryBudgetExceeded(WLError, MemoryError):
    """Color storage for all k-tuples would exceed the configured cap."""


class DatasetError(WLError):
    pass


class MissingFile(DatasetError, FileNotFoundError):
    pass


class MalformedLine(DatasetError, ValueError):
    def __init__(self, path, lineno, message):
        super().__init__(f"{path}:{lineno}: {message}")
        self.path = path
        self.lineno = lineno


class EdgeAcrossGraphs(DatasetError, ValueError):
    pass


class IndicatorNotContiguous(DatasetError, ValueError):
    pass


class SizeLimitExceeded(WLError, ValueError):
    pass


class NodeBudgetExceeded(WLError, ValueError):
    pass
