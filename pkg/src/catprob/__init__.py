"""catprob: exact categorical probabilistic theories over commutative semirings."""

from .semirings import Semiring, get_semiring, scalar_subsemiring, is_positive, axioms_check
from .matcat import Obj, Morphism, obj, obj_of_size, UNIT
from .backend import ClassicalBackend, QuantumBackend, toy_theory, backend_self_test
from .karoubi import KaroubiObject, SpoPair, make_object, decoherence_map
from .bell import Scenario, Party, EmpiricalModel, evaluate, no_signalling_check
from .diagram import parse, typecheck, run_document

__all__ = [
    "Semiring", "get_semiring", "scalar_subsemiring", "is_positive", "axioms_check",
    "Obj", "Morphism", "obj", "obj_of_size", "UNIT",
    "ClassicalBackend", "QuantumBackend", "toy_theory", "backend_self_test",
    "KaroubiObject", "SpoPair", "make_object", "decoherence_map",
    "Scenario", "Party", "EmpiricalModel", "evaluate", "no_signalling_check",
    "parse", "typecheck", "run_document",
]

__version__ = "0.1.0"
