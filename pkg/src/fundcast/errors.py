"""Exception hierarchy shared across the pipeline stages."""


class FundcastError(Exception):
    """Base class for every error raised by this package."""


# --- report store ---------------------------------------------------------

class MalformedMetadata(FundcastError):
    """Announcement metadata fails validation (dates, ids, revision)."""


class DuplicateRevision(FundcastError):
    """Same (symbol, statement_type, period_end, revision) key, different body."""


class UnknownSymbol(FundcastError):
    """No documents stored for the requested symbol."""


# --- cleaning -------------------------------------------------------------

class UnparseableNumber(FundcastError):
    """Numeric text cannot be interpreted; the row must be quarantined."""


class MissingValue(FundcastError):
    """Explicit missing marker. Distinct from zero by contract."""


class UnknownFormatVersion(FundcastError):
    """No mapping table registered for the report's format version."""


class MandatoryItemMissing(FundcastError):
    """A line item required for this statement type is absent."""


class IdentityViolation(FundcastError):
    """A derivable accounting identity fails beyond tolerance."""


class MixedSymbols(FundcastError):
    """Reports from more than one symbol passed to a per-stock merge."""


# --- feature factory ------------------------------------------------------

class NoVisibleReports(FundcastError):
    """No statement is visible at the requested as-of date."""


class InsufficientHistory(FundcastError):
    """Fewer than the required quarters of visible history."""


class DegenerateVariance(FundcastError):
    """Variance of the beta denominator series is zero."""


class NoTradingDays(FundcastError):
    """No trading days inside the trailing window."""


class SeriesGapTooLarge(FundcastError):
    """No series observation within the configured staleness bound."""


class VocabularyViolation(FundcastError):
    """Categorical code not present in the declared vocabulary."""


# --- dataset builder ------------------------------------------------------

class DomainError(FundcastError):
    """Argument outside the mathematical domain (e.g. ytm <= -1)."""


class HorizonBeyondData(FundcastError):
    """Price history ends before as_of + horizon; example excluded."""


class EmptyInput(FundcastError):
    """An operation that requires rows received none."""


class AllMissingColumn(FundcastError):
    """Every training value in a column is missing."""


# --- predictor ------------------------------------------------------------

class NonFiniteLoss(FundcastError):
    """Training loss became NaN or infinite; aborted with diagnostics."""


class SchemaMismatch(FundcastError):
    """Feature row does not match the model's column manifest."""


class UnknownKind(FundcastError):
    """Unrecognized or disabled model kind."""


class EmptyTestSet(FundcastError):
    """Accuracy evaluation requires at least one labeled example."""


# --- market outlook -------------------------------------------------------

class EmptyUniverse(FundcastError):
    """No stock carries a prediction at the forecast date."""


class NonPositiveCap(FundcastError):
    """Market capitalization weights must be strictly positive."""


# --- allocator / backtester -----------------------------------------------

class NonPositivePrice(FundcastError):
    """Asset prices must be strictly positive at a rebalance."""


class MissingForecast(FundcastError):
    """No usable market forecast at the first rebalance boundary."""


# --- synth ----------------------------------------------------------------

class InvalidConfig(FundcastError):
    """Generator or pipeline configuration violates its invariants."""


# --- CLI / artifacts ------------------------------------------------------

class MissingUpstreamArtifact(FundcastError):
    """A stage's required input artifact has not been produced yet."""


class ConfigConflict(FundcastError):
    """Existing artifacts were produced from different inputs or config."""


class LockHeld(FundcastError):
    """Another command is already running against this output directory."""
