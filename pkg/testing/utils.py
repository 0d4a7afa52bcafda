import os, warnings

from quantum_periods_py.database.kvdb import load_database, query
from quantum_periods_py.service.server import render_results
from quantum_periods_py.static import TESTING_DATA_DIR, database_path
from quantum_periods_py.utils import write_text_file

# Golden XML responses compared against in service_test.py, as
# (file name, dimension, query arguments, printlevel)
# NOTE: If intentionally changing the XML output, regenerate them with this function

GOLDEN_SEARCHES = [
    ("search_32_printlevel1.xml", 4, {"coefficients": {4: 72, 5: 360}}, 1),
    ("search_340_printlevel2.xml", 4, {"id": 340}, 2),
    ("search_1_printlevel3.xml", 4, {"id": 1}, 3),
]


def generate_search_goldens(output_dir=TESTING_DATA_DIR):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        databases = {dimension: load_database(database_path(dimension), dimension)
                     for dimension in set(d for _, d, _, _ in GOLDEN_SEARCHES)}
    paths = []
    for file_name, dimension, filters, printlevel in GOLDEN_SEARCHES:
        records = query(databases[dimension], **filters)
        paths.append(write_text_file(render_results(records, printlevel), os.path.join(output_dir, file_name)))
    return paths


def fixture_operator_records(dimensions=(1, 2, 3)):
    """(dimension, record) for every shipped record that stores an operator"""
    pairs = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for dimension in dimensions:
            db = load_database(database_path(dimension), dimension)
            pairs.extend((dimension, record) for record in db.records if record.operator is not None)
    return pairs
