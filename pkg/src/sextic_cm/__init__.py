"""Hyperelliptic and plane-quartic CM points for sextic CM fields.

Pipeline: field record -> CM types and reflexes -> Shimura class group
quotient -> CM triples -> reduced genus-3 period matrices -> count of
vanishing even theta-nulls.
"""

__version__ = "0.1.0"
