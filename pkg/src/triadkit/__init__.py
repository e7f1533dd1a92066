"""Data object models: concept/individual/state triples, semantic networks,
stratified metadata, appraisal functionals, schema merging, access
profiles and personnel dynamics."""

from .access import AccessPolicy, AccessProfile, Decision, OrgPosition, Session, Target, authorize
from .appraisal import (
    AppraisalModel, Assignment, Functional, evaluate_metric, generalization_analysis, restrict,
    unit_appraisal,
)
from .dsl import load, loads, parse_document, print_canonical
from .errors import TriadError
from .evaluator import MappingValue, Universe, apply, comprehend, individuate
from .events import Event, PersonnelEngine, PersonnelState, dispatch, register_script
from .integrator import SchemaHistory, SemanticPriority, merge_component, rollback
from .integrity import verify_integrity
from .metamodel import StratifiedSchema, check_stratification, lift_level
from .model import Concept, DataObject, Individual, Sort, make_data_object, transition_state
from .model import variable_domain
from .org import OrgStructure
from .schema import Schema
from .semnet import Frame, NetworkLanguage, SemanticNetwork, add_frame, holds

__all__ = [
    "AccessPolicy", "AccessProfile", "AppraisalModel", "Assignment", "Concept", "DataObject",
    "Decision", "Event", "Frame", "Functional", "Individual", "MappingValue", "NetworkLanguage",
    "OrgPosition", "OrgStructure", "PersonnelEngine", "PersonnelState", "Schema",
    "SchemaHistory", "SemanticNetwork", "SemanticPriority", "Session", "Sort",
    "StratifiedSchema", "Target", "TriadError", "Universe", "add_frame", "apply", "authorize",
    "check_stratification", "comprehend", "dispatch", "evaluate_metric",
    "generalization_analysis", "holds", "individuate", "lift_level", "load", "loads",
    "make_data_object", "merge_component", "parse_document", "print_canonical",
    "register_script", "restrict", "rollback", "transition_state", "unit_appraisal",
    "variable_domain", "verify_integrity",
]
