"""Requirements organization and traceability workbench.

Projects are graphs of artifacts (code files, requirements, features,
concepts) connected by reviewable trace links. The package provides
importers, a deterministic text-similarity backbone, trace-link
prediction, documentation generation behind a pluggable provider,
vocabulary and health checks, an async job engine, a REST API and a CLI.
"""

__version__ = "0.1.0"
