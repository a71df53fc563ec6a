"""
Per-slot dual-domain loop, baseline, Monte Carlo replicas, metrics and outputs.
Entry points live in app.harness.experiment; app.cli wraps them.
"""
