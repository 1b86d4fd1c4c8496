"""labloop: closed-loop validation of materials-science hypotheses.

Pipeline: a free-text claim is canonicalized against a small grammar,
expanded into a schema-validated experiment spec, executed on a toy
interatomic-potential backend (locally or over HTTP), adjudicated by
scripted debate or expert voting, and either reported or revised and
re-run.
"""

__version__ = "0.1.0"
