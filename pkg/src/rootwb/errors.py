"""Exception hierarchy shared across the workbench.

Every error carries a stable machine-readable ``code`` (the class name)
that surfaces unchanged through the REST error body and the CLI.
"""

from __future__ import annotations

from typing import Any


class WorkbenchError(Exception):
    """Base class for all domain errors."""

    def __init__(self, message: str = "", **detail: Any):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.detail = detail or None

    @property
    def code(self) -> str:
        return self.__class__.__name__

    def to_dict(self) -> dict:
        body: dict = {"error": self.code, "message": self.message}
        if self.detail:
            body["detail"] = self.detail
        return body


# -- core model -------------------------------------------------------------

class DuplicateId(WorkbenchError):
    pass


class EmptyField(WorkbenchError):
    pass


class UnknownId(WorkbenchError):
    pass


class DuplicateLink(WorkbenchError):
    pass


class SelfLink(WorkbenchError):
    pass


class CycleDetected(WorkbenchError):
    pass


class InvalidParams(WorkbenchError):
    pass


# -- ingestion --------------------------------------------------------------

class PathNotFound(WorkbenchError):
    pass


class MissingHeader(WorkbenchError):
    pass


class MalformedRow(WorkbenchError):
    pass


class SchemaMismatch(WorkbenchError):
    pass


class ParseError(WorkbenchError):
    pass


# -- similarity -------------------------------------------------------------

class DuplicateDocId(WorkbenchError):
    pass


# -- providers --------------------------------------------------------------

class ProviderUnavailable(WorkbenchError):
    pass


# -- trace engine -----------------------------------------------------------

class UnknownLink(WorkbenchError):
    pass


class NotPending(WorkbenchError):
    pass


# -- docgen -----------------------------------------------------------------

class UnknownType(WorkbenchError):
    pass


class EmptySource(WorkbenchError):
    pass


class EmptyProject(WorkbenchError):
    pass


class WrongType(WorkbenchError):
    pass


# -- vocabulary / health ----------------------------------------------------

class DuplicateTerm(WorkbenchError):
    pass


class UnknownFinding(WorkbenchError):
    pass


class AlreadyClosed(WorkbenchError):
    pass


class InvalidAction(WorkbenchError):
    pass


# -- jobs / server ----------------------------------------------------------

class UnknownProject(WorkbenchError):
    pass


class ProjectBusy(WorkbenchError):
    pass


class UnknownJob(WorkbenchError):
    pass


class AlreadyTerminal(WorkbenchError):
    pass


class EmptyQuestion(WorkbenchError):
    pass
