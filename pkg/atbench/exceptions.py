class AtbenchException(Exception):
    pass


class UsageException(AtbenchException):
    """A caller broke a documented precondition. The command line reports these with exit status 64."""


class DataException(AtbenchException):
    """Input data (a cache file or a search space definition) is unusable. Exit status 2."""


class OptimizerException(AtbenchException):
    pass


class LengthMismatchException(UsageException):
    def __init__(self, len_a, len_b):
        super().__init__("Configurations have different lengths ({} and {})".format(len_a, len_b))


class OutOfRangeException(UsageException):
    def __init__(self, name, value, allowed):
        super().__init__("{} = {} is out of range, expected {}".format(name, value, allowed))


class UnknownAlgorithmException(UsageException):
    def __init__(self, name):
        super().__init__("Algorithm {} is not registered. See atbench.optimizers.ALGORITHMS".format(name))


class UnknownHyperparameterException(UsageException):
    def __init__(self, algorithm, name):
        super().__init__("Algorithm {} has no hyperparameter named {}".format(algorithm, name))


class TooLargeException(UsageException):
    def __init__(self, size, limit):
        super().__init__("Search space with {} combinations exceeds the enumeration limit of {}".format(size, limit))


class FormatException(DataException):
    def __init__(self, message):
        super().__init__("Malformed cache file: {}".format(message))


class SchemaVersionMismatchException(DataException):
    def __init__(self, found, expected):
        super().__init__("Cache schema version {} is not supported, expected {}".format(found, expected))


class DuplicateEntryException(DataException):
    def __init__(self, config):
        super().__init__("Configuration {} appears more than once in the cache".format(config))


class MissingEntryException(DataException):
    def __init__(self, config):
        super().__init__("Valid configuration {} has no measurement in the cache".format(config))


class ConstraintMismatchException(DataException):
    def __init__(self, config, marked_valid):
        state = "valid but violates" if marked_valid else "invalid but satisfies"
        super().__init__("Configuration {} is marked {} the constraints".format(config, state))


class EmptySpaceException(DataException):
    def __init__(self, cartesian_size):
        super().__init__("No configuration out of {} satisfies the constraints".format(cartesian_size))


class DegenerateSpaceException(DataException):
    def __init__(self, value):
        super().__init__("Search space median equals its optimum ({}), "
                         "the methodology is undefined for this space".format(value))


class DegenerateDenominatorException(DataException):
    def __init__(self, t):
        super().__init__("Baseline equals the optimum at t = {}, the performance curve is undefined".format(t))


class GridMismatchException(DataException):
    def __init__(self, lengths):
        super().__init__("Performance curves have different grid lengths: {}".format(sorted(lengths)))


class ConstraintException(DataException):
    pass


class ConstraintSyntaxException(ConstraintException):
    def __init__(self, source, detail):
        super().__init__("Cannot parse constraint '{}': {}".format(source, detail))


class UnknownParameterException(ConstraintException):
    def __init__(self, name, source):
        super().__init__("Constraint '{}' refers to undeclared parameter {}".format(source, name))


class ConstraintTypeException(ConstraintException):
    def __init__(self, operator, operand_type, source):
        super().__init__("Operator '{}' cannot be applied to a {} operand in constraint '{}'".format(
            operator, operand_type, source))


class InvalidConfigurationException(OptimizerException):
    def __init__(self, config):
        super().__init__("Configuration {} violates the search space constraints".format(config))


class UnknownConfigurationException(OptimizerException):
    def __init__(self, config):
        super().__init__("Configuration {} is not in the cache".format(config))
