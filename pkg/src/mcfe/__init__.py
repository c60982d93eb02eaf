"""Mirror-circuit fidelity estimation.

Build mirror circuits around a target circuit, simulate them under noise, and
estimate the target's process fidelity from the outcomes.
"""

__version__ = "0.1.0"
