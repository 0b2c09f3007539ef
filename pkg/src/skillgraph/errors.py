"""Exception hierarchy shared by all pipeline stages."""


class SkillGraphError(Exception):
    """Base class for every error raised by this package."""


# --- classifier ingestion ---

class MalformedTriple(SkillGraphError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DanglingReference(SkillGraphError):
    """Essential-skill relation points at an id never declared."""


class MissingIscoMapping(SkillGraphError):
    """Occupation declared without an ISCO group membership."""


class BadCode(SkillGraphError):
    """Malformed SOC / ISCO / numeric token in a delimited table."""


class EmptyTable(SkillGraphError):
    """Delimited table has no usable header or no data rows."""


class OutOfRange(SkillGraphError):
    """Probability outside [0, 1]."""


class DuplicateSoc(SkillGraphError):
    """Same SOC code listed twice with different probabilities."""


# --- similarity graph ---

class UnknownOccupation(SkillGraphError):
    """Occupation id not present in the classifier store."""


# --- supply / demand ---

class MalformedRecord(SkillGraphError):
    """CV or vacancy record failing field validation."""


class UnmappedIsco(SkillGraphError):
    """Vacancy ISCO code with no ESCO occupation under it."""


# --- layout ---

class EmptyGraph(SkillGraphError):
    """Layout requested for zero nodes."""


class InvalidEdgeIndex(SkillGraphError):
    """Edge references an index outside [0, n) or is a self-loop."""


# --- bundle export ---

class IoFailure(SkillGraphError):
    """Underlying I/O error while writing or reading a bundle."""


class ConsistencyViolation(SkillGraphError):
    """Bundle inputs are internally inconsistent; nothing is written."""


class SchemaMismatch(SkillGraphError):
    """Bundle schema_version is not one this reader understands."""


class ParseFailure(SkillGraphError):
    """Bundle file exists but its content violates the schema."""


# --- CLI ---

class ConfigInvalid(SkillGraphError):
    """Pipeline configuration file is missing, unreadable or inconsistent."""


class StageInputMissing(SkillGraphError):
    """A stage was run before the stage that produces its inputs."""
