import re

PRODUCT_SEPARATOR = " x "

LOW_DIMENSION_NAMES = [
    r"P1", r"P2", r"P3", r"Q3",
    r"dP\(\d+\)",
    r"V\(3,\d+\)",
    r"B\(3,\d+\)",
    r"MM\(\d+,\d+\)",
]

DIMENSION_FOUR_NAMES = [
    r"P4", r"Q4",
    r"FI\(4,\d+\)",
    r"V\(4,\d+\)",
    r"MW\(4,\d+\)",
    r"Obro\(4,\d+\)",
    r"Str\(\d+\)",
    r"CKP\(\d+\)",
    r"CKK\(\d+\)",
]


def _compile(patterns):
    return re.compile(r"^(?:{})$".format("|".join(patterns)))


_LOW_DIMENSION = _compile(LOW_DIMENSION_NAMES)
_DIMENSION_FOUR = _compile(DIMENSION_FOUR_NAMES)


def is_valid_name(name, dimension):
    # factors of a product have dimension at most three
    if PRODUCT_SEPARATOR in name:
        return all(_LOW_DIMENSION.match(factor) for factor in name.split(PRODUCT_SEPARATOR))
    grammar = _LOW_DIMENSION if dimension <= 3 else _DIMENSION_FOUR
    return grammar.match(name) is not None


def unrecognized_tokens(name, dimension):
    if PRODUCT_SEPARATOR in name:
        return [factor for factor in name.split(PRODUCT_SEPARATOR) if not _LOW_DIMENSION.match(factor)]
    return [] if is_valid_name(name, dimension) else [name]


def validate_names(record, dimension):
    """Warnings for names outside the naming scheme of the given dimension; never raises"""
    warnings = []
    for name in record.names:
        for token in unrecognized_tokens(name, dimension):
            if token == name:
                warnings.append("Record {}: unrecognized name {!r}".format(record.id, name))
            else:
                warnings.append("Record {}: unrecognized factor {!r} in {!r}".format(record.id, token, name))
    return warnings
