import json, os, re, tempfile, uuid
from fractions import Fraction
from functools import reduce
from math import gcd, lcm

# I/O

def read_text_file(filename):
    with open(filename, "r", encoding="ascii", newline="") as f:
        return f.read()

def write_text_file(text, filename):
    with open(filename, "w", encoding="ascii", newline="") as f:
        f.write(text)
    return filename

def save_as_json(data, filename):
    with open(fix_filetype(filename, ".json"), "w") as outfile:
        json.dump(data, outfile, indent=2, sort_keys=True)
    return filename

def load_from_json(filename):
    with open(fix_filetype(filename, ".json"), "r") as json_file:
        return json.load(json_file)

def fix_filetype(path, filetype):
    if path[-len(filetype):] == filetype:
        return path
    else:
        return path + filetype

def generate_temporary_file_path(file_name=None, prefix="", suffix="", extension=""):
    if file_name is None:
        file_name = str(uuid.uuid1())
    if extension and not extension.startswith("."):
        extension = "." + extension
    file_name = prefix + file_name + suffix + extension
    return os.path.join(tempfile.gettempdir(), file_name)

def dimension_from_filename(path):
    """Returns N for a file named like smooth_fano_N.txt, else None"""
    match = re.search(r"smooth_fano_(\d+)", os.path.basename(path))
    return int(match.group(1)) if match else None

# Exact arithmetic

def as_fraction(value):
    """
    Converts ints, Fractions, numpy integers and sympy Rationals to a Fraction.
    Floats are refused: every numeric path in this package is exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool) or isinstance(value, float):
        raise TypeError("Refusing to convert {!r} to an exact rational".format(value))
    if hasattr(value, "p") and hasattr(value, "q"):
        return Fraction(int(value.p), int(value.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    return Fraction(int(value))

def integer_content(values):
    """gcd of the absolute values of a list of integers (0 for an all-zero list)"""
    return reduce(gcd, (abs(int(v)) for v in values), 0)

def common_denominator(values):
    return reduce(lcm, (as_fraction(v).denominator for v in values), 1)

def falling_factorial(x, k):
    """x (x-1) ... (x-k+1), with the empty product 1"""
    result = 1
    for j in range(k):
        result *= x - j
    return result

def rising_factorial(x, k):
    """x (x+1) ... (x+k-1), with the empty product 1"""
    result = 1
    for j in range(k):
        result *= x + j
    return result

def format_rational(value):
    value = as_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return "{}/{}".format(value.numerator, value.denominator)
