import os

_current_dir = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(_current_dir, "data")
DATABASES_DIR = os.path.join(DATA_DIR, "databases")
TESTING_DATA_DIR = os.path.join(DATA_DIR, "testing")

DATABASE_FILE_TEMPLATE = "smooth_fano_{}.txt"
REAL_DATA_DIR_ENV = "QUANTUM_PERIODS_DATA_DIR"
DATAIDS_ENV = "QUANTUM_PERIODS_DATAIDS"


def database_path(dimension, data_dir=DATABASES_DIR):
    return os.path.join(data_dir, DATABASE_FILE_TEMPLATE.format(dimension))
