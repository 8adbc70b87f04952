"""In-memory Datalog engine over binary predicates with incremental rule and fact maintenance."""

from .errors import (AggregateError, DatalogError, DuplicateRuleError, PlanError,
                     RuleSyntaxError, SafetyError, UnknownRuleError, UnsafeProgramError)
from .model import Atom, Literal, Program, Rule, Var
from .parser import parse_aggregate_rule, parse_facts, parse_rule, parse_rules
from .evaluation import materialize
from .incremental import Engine, UpdateReport
from .storage import DataStore, DataStoreBag

__version__ = "0.1.0"
