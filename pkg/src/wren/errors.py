"""Exception hierarchy shared across the package.

Each class maps to one CLI exit-code family (see cli.py): configuration
problems exit 2, input/schema problems exit 3, runtime failures exit 4.
"""


class WrenError(Exception):
    exit_code = 4


class ConfigError(WrenError):
    """Invalid configuration: bad parameters, mismatched settings."""

    exit_code = 2


class InputError(WrenError):
    """Malformed input data: records, schemas, duplicate or missing ids."""

    exit_code = 3


class RecordParseError(InputError):
    """A corpus record is missing a required field."""

    def __init__(self, field, line=None):
        self.field = field
        self.line = line
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"record missing required field {field!r}{where}")


class SchemaError(InputError):
    """A structured input file violates its documented schema."""

    def __init__(self, message, line=None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


class ClusterError(WrenError):
    """A cluster operation failed; carries the shards involved."""

    def __init__(self, message, shard_ids=()):
        self.shard_ids = tuple(shard_ids)
        if self.shard_ids:
            message = f"{message} (shards: {', '.join(map(str, self.shard_ids))})"
        super().__init__(message)
