"""
The smooth_fano_N.txt key-value format.

A database is a sequence of records separated by blank lines. Each line of a
record is `key: value`. Canonical key order is CANONICAL_KEY_ORDER; values are
decimal integers, integer sequences `[1,0,2]`, exponent pairs `[[1,2],[1,0]]`,
`true`/`false`, name lists `[CKP(31), Obro(4,31)]` and free single-line text.
"""
import logging
import re
import warnings

from pyparsing import (Combine, DelimitedList, Group, OneOrMore, Opt, ParseBaseException, QuotedString, Regex,
                       Suppress)

from quantum_periods_py.periods.core import FanoRecord
from quantum_periods_py.utils import read_text_file, dimension_from_filename, format_rational

logger = logging.getLogger(__name__)

CANONICAL_KEY_ORDER = ["id", "period", "names", "pf_coefficients", "pf_exponents", "pf_proven", "notes", "duplicate"]
REQUIRED_KEYS = set(["id", "period", "names"])
OPERATOR_KEYS = set(["pf_coefficients", "pf_exponents", "pf_proven"])
DEFAULT_KEYS = set(CANONICAL_KEY_ORDER)

QUERY_COEFFICIENT_RANGE = range(2, 7)


class KeyValueParseError(ValueError):

    def __init__(self, message, line_number=None, record_ordinal=None):
        location = []
        if line_number is not None:
            location.append("line {}".format(line_number))
        if record_ordinal is not None:
            location.append("record {}".format(record_ordinal))
        super(KeyValueParseError, self).__init__("{}{}".format(", ".join(location) + ": " if location else "", message))
        self.line_number = line_number
        self.record_ordinal = record_ordinal


##################
# VALUE GRAMMAR  #
##################

_LBR, _RBR, _COMMA = map(Suppress, "[],")
_INTEGER = Regex(r"[+-]?\d+").set_parse_action(lambda t: int(t[0]))
_INTEGER_LIST = _LBR + Opt(DelimitedList(_INTEGER)) + _RBR
_PAIR = Group(_LBR + _INTEGER + _COMMA + _INTEGER + _RBR)
_PAIR_LIST = _LBR + Opt(DelimitedList(_PAIR)) + _RBR
# A bare name may contain spaces and parenthesised argument lists: `P1 x MM(2,3)`
_BARE_NAME = Combine(OneOrMore(Regex(r'[^,\[\]()"]+') | Regex(r"\([^()]*\)")), adjacent=True) \
    .set_parse_action(lambda t: t[0].strip())
_NAME_LIST = _LBR + Opt(DelimitedList(QuotedString('"') | _BARE_NAME)) + _RBR

_LINE = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)\s*:\s*(.*?)\s*$")


def _parse_grammar(grammar, text):
    return grammar.parse_string(text, parse_all=True).as_list()


def _parse_integer(text):
    if not re.match(r"^[+-]?\d+$", text):
        raise ValueError("expected an integer, got {!r}".format(text))
    return int(text)


def _parse_boolean(text):
    if text not in ("true", "false"):
        raise ValueError("expected true or false, got {!r}".format(text))
    return text == "true"


VALUE_PARSERS = {
    "id": _parse_integer,
    "period": lambda text: _parse_grammar(_INTEGER_LIST, text),
    "names": lambda text: _parse_grammar(_NAME_LIST, text),
    "pf_coefficients": lambda text: _parse_grammar(_INTEGER_LIST, text),
    "pf_exponents": lambda text: _parse_grammar(_PAIR_LIST, text),
    "pf_proven": _parse_boolean,
    "notes": lambda text: text,
    "duplicate": _parse_integer,
}


def _parse_value(key, text):
    try:
        return VALUE_PARSERS[key](text)
    except ParseBaseException as e:
        raise ValueError("malformed value for {}: {}".format(key, e))


def _names_are_quoted(text):
    return text.lstrip("[ ").startswith('"')


#############
# DATABASE  #
#############

class Database(object):
    """
    An immutable parsed database.

    Args:
        dimension (int): 1..4
        records (list): FanoRecords in file order
        quoted_names (bool): names were quoted in the source and are serialized quoted
    """

    def __init__(self, dimension, records, quoted_names=False):
        if dimension not in (1, 2, 3, 4):
            raise ValueError("Database dimension must be 1, 2, 3 or 4, got {}".format(dimension))
        self._dimension = dimension
        self._records = tuple(records)
        self._quoted_names = quoted_names
        self._index = {}
        for position, record in enumerate(self._records):
            if record.id in self._index:
                raise ValueError("Duplicate record id {}".format(record.id))
            self._index[record.id] = position
        self._coefficient_index = {d: {} for d in QUERY_COEFFICIENT_RANGE}
        for record in self._records:
            for d in QUERY_COEFFICIENT_RANGE:
                value = record.coefficient(d)
                if value is not None:
                    self._coefficient_index[d].setdefault(value, set()).add(record.id)

    @property
    def dimension(self):
        return self._dimension

    @property
    def records(self):
        return self._records

    @property
    def quoted_names(self):
        return self._quoted_names

    @property
    def ids(self):
        return [record.id for record in self._records]

    def __len__(self):
        return len(self._records)

    def __iter__(self):
        return iter(self._records)

    def __contains__(self, record_id):
        return record_id in self._index

    def get(self, record_id):
        if record_id not in self._index:
            raise KeyError("No record with id {}".format(record_id))
        return self._records[self._index[record_id]]

    def ids_with_coefficient(self, d, value):
        return set(self._coefficient_index[d].get(value, ()))

    def has_sequential_ids(self):
        return self.ids == list(range(1, len(self._records) + 1))

    def __eq__(self, other):
        return isinstance(other, Database) and (self.dimension, self.records) == (other.dimension, other.records)

    def __repr__(self):
        return "Database(dimension={}, records={})".format(self.dimension, len(self))


def _split_blocks(text):
    """Yields [(line number, line)] for each blank-line separated block"""
    block = []
    for number, line in enumerate(text.split("\n"), start=1):
        if line.strip():
            block.append((number, line))
        elif block:
            yield block
            block = []
    if block:
        yield block


def _parse_block(block, ordinal):
    values = {}
    lines = {}
    quoted = False
    for number, line in block:
        match = _LINE.match(line)
        if match is None:
            raise KeyValueParseError("expected `key: value`, got {!r}".format(line), number, ordinal)
        key, text = match.group(1), match.group(2)
        if key not in DEFAULT_KEYS:
            raise KeyValueParseError("unknown key {!r}".format(key), number, ordinal)
        if key in values:
            raise KeyValueParseError("duplicate key {!r}".format(key), number, ordinal)
        try:
            values[key] = _parse_value(key, text)
        except ValueError as e:
            raise KeyValueParseError(str(e), number, ordinal)
        if key == "names":
            quoted = _names_are_quoted(text)
        lines[key] = number
    return values, lines, quoted


def parse_fragment(text):
    """
    Parses a single block without requiring any key. Used to pipe the output of
    one command into another.
    """
    blocks = list(_split_blocks(text))
    if len(blocks) > 1:
        raise KeyValueParseError("expected a single block, got {}".format(len(blocks)), blocks[1][0][0])
    if not blocks:
        return {}
    values, _, _ = _parse_block(blocks[0], 1)
    return values


def record_from_values(values, lines=None, ordinal=None):
    lines = lines or {}
    first_line = min(lines.values()) if lines else None
    missing = REQUIRED_KEYS - set(values)
    if missing:
        raise KeyValueParseError("record is missing {}".format(", ".join(sorted(missing))), first_line, ordinal)
    present_operator_keys = OPERATOR_KEYS & set(values)
    if present_operator_keys and present_operator_keys != OPERATOR_KEYS:
        raise KeyValueParseError("operator keys must appear together, got only {}".format(
            ", ".join(sorted(present_operator_keys))), lines.get(sorted(present_operator_keys)[0], first_line), ordinal)
    if "pf_coefficients" in values and len(values["pf_coefficients"]) != len(values["pf_exponents"]):
        raise KeyValueParseError("pf_coefficients has {} entries but pf_exponents has {}".format(
            len(values["pf_coefficients"]), len(values["pf_exponents"])), lines.get("pf_exponents"), ordinal)
    try:
        return FanoRecord.from_dict(values)
    except ValueError as e:
        raise KeyValueParseError(str(e), first_line, ordinal)


def parse_database(text, dimension):
    """
    Args:
        text (str or bytes): ASCII database contents
        dimension (int): 1..4
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("ascii")
        except UnicodeDecodeError as e:
            raise KeyValueParseError("database is not ASCII: {}".format(e))
    text = text.replace("\r\n", "\n")

    records = []
    seen_ids = {}
    quoted_names = False
    for ordinal, block in enumerate(_split_blocks(text), start=1):
        values, lines, quoted = _parse_block(block, ordinal)
        record = record_from_values(values, lines, ordinal)
        if record.id in seen_ids:
            raise KeyValueParseError("id {} already used by record {}".format(record.id, seen_ids[record.id]),
                                     lines["id"], ordinal)
        seen_ids[record.id] = ordinal
        quoted_names = quoted_names or quoted
        records.append(record)

    db = Database(dimension, records, quoted_names)
    if not db.has_sequential_ids():
        message = "Record ids in the dimension {} database are not sequential from 1".format(dimension)
        warnings.warn(message, RuntimeWarning)
    logger.debug("Parsed %d records for dimension %d", len(db), dimension)
    return db


def load_database(path, dimension=None):
    """Reads smooth_fano_N.txt, taking N from the file name unless given"""
    if dimension is None:
        dimension = dimension_from_filename(path)
        if dimension is None:
            raise ValueError("Cannot infer the dimension from {}; pass it explicitly".format(path))
    return parse_database(read_text_file(path), dimension)


##################
# SERIALIZATION  #
##################

def format_integer_list(values):
    values = list(values)
    for v in values:
        if int(v) != v:
            raise ValueError("Integer sequences cannot hold the non-integral value {}".format(format_rational(v)))
    return "[{}]".format(",".join(str(int(v)) for v in values))


def format_pair_list(pairs):
    return "[{}]".format(",".join("[{},{}]".format(m, n) for m, n in pairs))


def format_names(names, quoted=False):
    if quoted:
        return "[{}]".format(", ".join('"{}"'.format(name) for name in names))
    return "[{}]".format(", ".join(names))


def format_boolean(value):
    return "true" if value else "false"


def record_lines(record, quoted_names=False):
    values = {
        "id": str(record.id),
        "period": format_integer_list(record.period.to_list()),
        "names": format_names(record.names, quoted_names),
    }
    if record.operator is not None:
        values["pf_coefficients"] = format_integer_list(record.operator.coefficients)
        values["pf_exponents"] = format_pair_list(record.operator.exponents)
        values["pf_proven"] = format_boolean(record.pf_proven)
    if record.notes is not None:
        values["notes"] = record.notes
    if record.duplicate is not None:
        values["duplicate"] = str(record.duplicate)
    return ["{}: {}".format(key, values[key]) for key in CANONICAL_KEY_ORDER if key in values]


def serialize_database(db):
    if len(db) == 0:
        return ""
    return "\n\n".join("\n".join(record_lines(record, db.quoted_names)) for record in db) + "\n"


def serialize_fragment(values):
    """Inverse of parse_fragment for the keys present, in canonical order"""
    formatters = {
        "id": str,
        "period": format_integer_list,
        "names": format_names,
        "pf_coefficients": format_integer_list,
        "pf_exponents": format_pair_list,
        "pf_proven": format_boolean,
        "notes": str,
        "duplicate": str,
    }
    return "".join("{}: {}\n".format(key, formatters[key](values[key])) for key in CANONICAL_KEY_ORDER if key in values)


##########
# QUERY  #
##########

def query(db, id=None, name=None, coefficients=None):
    """
    Records matching every supplied constraint, in id order.

    Args:
        id (int): exact id
        name (str): substring of some name
        coefficients (dict): {d: c_d} for d in 2..6
    """
    coefficients = coefficients or {}
    for d in coefficients:
        if d not in QUERY_COEFFICIENT_RANGE:
            raise ValueError("Coefficient constraints are supported for c2..c6, got c{}".format(d))
    candidates = set(db.ids)
    if id is not None:
        candidates &= set([id])
    for d, value in coefficients.items():
        candidates &= db.ids_with_coefficient(d, value)
    matches = [db.get(record_id) for record_id in sorted(candidates)]
    if name is not None:
        matches = [record for record in matches if any(name in n for n in record.names)]
    return matches


def coincident_periods(db, prefix_length=7):
    """
    Groups of ids whose periods agree on their common prefix, among records
    storing at least prefix_length coefficients.
    """
    buckets = {}
    for record in db:
        if len(record.period) >= prefix_length:
            buckets.setdefault(record.period.coeffs[:prefix_length], []).append(record)
    groups = []
    for bucket in buckets.values():
        parent = {record.id: record.id for record in bucket}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, a in enumerate(bucket):
            for b in bucket[i + 1:]:
                common = min(len(a.period), len(b.period))
                if a.period.coeffs[:common] == b.period.coeffs[:common]:
                    parent[find(a.id)] = find(b.id)
        components = {}
        for record in bucket:
            components.setdefault(find(record.id), []).append(record.id)
        groups.extend(sorted(ids) for ids in components.values() if len(ids) > 1)
    return sorted(groups)
