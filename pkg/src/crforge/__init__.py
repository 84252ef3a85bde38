"""crforge: exhaustive generation of good drawings of complete graphs
with bounded crossing numbers, and the heavy-subdrawing test that the
staged pipeline feeds."""

from .drawing import (Drawing, Face, ValidationReport, crossing_pairs,
                      crossings_at, delete_vertex, faces, load_file, mirror,
                      relabel, seed_k4, validate, write_file)
from .counting import (DeletionProfile, InconsistentSystem, Stage, StagePlan,
                       deficiency, deletion_profiles, duplication_bound,
                       ndp_check, pairwise_solver, parity_ok, stage_plan, zed)
from .routing import DualGraph, Routing, distances, dual, enumerate_routings
from .extension import (EntangledError, InsertionCandidate, extend_all,
                        minimality_filter, realize)
from .equivalence import (EquivalenceClass, ErrorSet, extend_representatives,
                          partition_classes, select_representative)
from .canonical import (CanonicalCode, DedupStore, canonical_code,
                        drawing_from_code, face_orbits, insert_if_new)
from .k12check import FaceVerdict, check_face, run_k12_stage, subdrawing_crossings
from .pipeline import StageRun, run_k12_compound, run_stage, stats_table, verify_file

__version__ = "0.1.0"
