"""Dataset-specific annotation importers."""
from .jacquard import import_jacquard
from .ocid import corners_to_grasp, import_ocid, parse_class_map

IMPORTERS = {
    'jacquard': import_jacquard,
    'ocid': import_ocid,
}

__all__ = ['import_jacquard', 'import_ocid', 'corners_to_grasp', 'parse_class_map', 'IMPORTERS']
