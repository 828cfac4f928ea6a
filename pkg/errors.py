class PolarError(Exception):
    """Base class for every error raised by the codec, decoders and campaign tooling."""


class InvalidArgumentError(PolarError, ValueError):
    pass


class TableNotBuiltError(PolarError, KeyError):
    def __init__(self, node_label: str):
        super().__init__(f"No syndrome table built for node {node_label}")
        self.node_label = node_label

    def __str__(self):
        return self.args[0]


class TableFormatError(PolarError):
    pass


class InfeasibleAdjustmentError(PolarError):
    pass


class ExhaustiveLimitError(PolarError):
    pass


class ConfigError(PolarError):
    pass
