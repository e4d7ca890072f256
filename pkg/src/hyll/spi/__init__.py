"""Stochastic pi-calculus: syntax, congruence, stepper, HyLL encoding and adequacy."""
from .adequacy import (AdequacyError, Analysis, Certified, analyse, cut_at, decode_proc,
                       derivation_to_trace, phase_log, spine, trace_to_derivation)
from .congruence import congruent
from .encode import (canonical_context, canonical_sequent, encode_env, encode_proc, encode_sum,
                     interaction_theory)
from .parse import SpiProgram, parse_process, parse_spi, print_spi
from .step import Config, Event, Transition, initial_config, step, transitions
from .syntax import (Bound, Call, Choice, Def, In, Name, Nil, Nu, Out, Par, Process, SpiError, Sum,
                     Tau, show)
from .trace import Trace, TraceError, dump_trace, load_trace, replay

__all__ = [n for n in dir() if not n.startswith("_")]
