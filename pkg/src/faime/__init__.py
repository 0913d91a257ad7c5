"""faime: a staged event pipeline for AI-assisted musical devices.

Devices are built as validated stage graphs (capture, adaptation,
learning, music adaptation, production, feedback) driven by a
deterministic event scheduler, and talk to synthesizers over OSC/UDP.
"""

__version__ = "0.1.0"
