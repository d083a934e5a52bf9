"""Exception hierarchy shared across the engine."""


class RelmapError(Exception):
    """Base class for all engine errors."""


class ValidationError(RelmapError):
    """Input data violates a contract (non-finite values, bad ranges, ...)."""


class DimensionError(ValidationError):
    """Shapes/dims of two inputs do not agree, or a target exceeds a source."""


class BundleError(RelmapError):
    """Base class for volume-bundle loading problems."""


class BundleMetadataError(BundleError):
    """meta.json is missing, unparsable, or structurally wrong."""


class BundleMissingFileError(BundleError):
    """A file referenced by meta.json does not exist."""


class BundleSizeMismatchError(BundleError):
    """A raw file's byte size does not match the declared dims."""


class UnknownSequenceError(BundleError):
    """meta.json names a sequence outside T1w/T1wCE/T2w/FLAIR."""


class NiftiParseError(RelmapError):
    """NIfTI-1 header or body could not be parsed; message carries field/offset."""


class OracleError(RelmapError):
    """Base class for classifier-oracle failures."""


class OracleConnectionError(OracleError):
    """Could not reach the remote scoring endpoint (retryable)."""


class OracleTimeoutError(OracleError):
    """Remote scoring request timed out (retryable)."""


class OracleHttpError(OracleError):
    """Remote endpoint answered with a non-2xx status."""

    def __init__(self, message: str, status_code: int | None = None):
        super().__init__(message)
        self.status_code = status_code


class OracleResponseError(OracleError):
    """Remote endpoint answered 2xx but the body is malformed."""


class OracleContractError(OracleError):
    """Well-formed response violates the protocol (e.g. probability outside [0,1]).

    Never retried: the server is broken, not the transport.
    """


class BatchScoreError(OracleError):
    """One or more elements of a batch failed; carries per-index errors."""

    def __init__(self, failures: list[tuple[int, Exception]]):
        self.failures = failures
        detail = "; ".join(f"[{i}] {e}" for i, e in failures)
        super().__init__(f"{len(failures)} batch element(s) failed: {detail}")
