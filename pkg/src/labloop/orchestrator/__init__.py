"""Run state machine, persistence, reporting, benchmark harness, API, CLI.

Submodules are imported directly (labloop.orchestrator.engine etc.); this
package initializer stays empty to keep low-level imports cycle-free.
"""
