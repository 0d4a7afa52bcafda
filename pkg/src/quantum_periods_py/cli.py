"""
quantum-periods: command-line entry point.

    quantum-periods validate smooth_fano_2.txt --ramification --report report.json
    quantum-periods expand p1.txt --terms 8 | quantum-periods fit - --max-order 1 --max-degree 2
    quantum-periods analyze smooth_fano_3.txt#2
    quantum-periods product smooth_fano_1.txt#1 smooth_fano_1.txt#1 --terms 6
    quantum-periods query --data smooth_fano_4.txt c4=72 c5=360
    quantum-periods serve --port 8080 --data smooth_fano_4.txt

SOURCE arguments are `-` (a key-value block on stdin), a file holding a single
key-value block, or FILE#ID selecting one record of a database file.
"""
import logging
import os
import sys
from argparse import ArgumentParser

from quantum_periods_py.analysis.ramification import ramification_data, NotFuchsianError, DEFAULT_ANALYSIS_PARAMS
from quantum_periods_py.database.kvdb import load_database, parse_fragment, serialize_fragment, record_lines, query, \
    KeyValueParseError
from quantum_periods_py.database.validation import DatabaseValidator
from quantum_periods_py.fitting.fit import fit_operator_search, OperatorNotFound, DEFAULT_FIT_PARAMS
from quantum_periods_py.periods.core import DOperator, PeriodSequence
from quantum_periods_py.periods.recurrence import expand_period, product_period, product_names, ExpansionError
from quantum_periods_py.service.server import load_service_databases, serve, DEFAULT_SERVICE_PARAMS
from quantum_periods_py.utils import read_text_file, save_as_json, dimension_from_filename, format_rational

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VALIDATION_FAILED = 2
EXIT_USAGE = 64

DEFAULT_TERMS = 20


class UsageError(Exception):
    pass


class CommandLineParser(ArgumentParser):
    """ArgumentParser that exits with status 64 on usage errors"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "{}: error: {}\n".format(self.prog, message))


# I/O

def read_source(source):
    """Key-value dict for `-`, a single-block file, or FILE#ID"""
    if source == "-":
        return parse_fragment(sys.stdin.read())
    path, _, record_id = source.partition("#")
    if not os.path.exists(path):
        raise UsageError("No such file: {}".format(path))
    if record_id:
        try:
            record_id = int(record_id)
        except ValueError:
            raise UsageError("Record selector must be an integer id, got {!r}".format(record_id))
        db = load_database(path, dimension_from_filename(path) or 1)
        if record_id not in db:
            raise UsageError("{} has no record with id {}".format(path, record_id))
        return db.get(record_id).to_dict()
    return parse_fragment(read_text_file(path))


def operator_from_values(values, source):
    if "pf_coefficients" not in values or "pf_exponents" not in values:
        raise UsageError("{} holds no pf_coefficients/pf_exponents".format(source))
    return DOperator.from_lists(values["pf_coefficients"], values["pf_exponents"])


def period_from_values(values, source):
    if "period" not in values:
        raise UsageError("{} holds no period".format(source))
    return PeriodSequence(values["period"])


def _write(text):
    sys.stdout.write(text)
    sys.stdout.flush()


#############
# COMMANDS  #
#############

def cmd_validate(args):
    dimension = args.dimension or dimension_from_filename(args.file)
    if dimension is None:
        raise UsageError("Cannot infer the dimension of {}; pass it after the file name".format(args.file))
    db = load_database(args.file, dimension)
    analysis_params = {"max_factor_degree": args.max_degree} if args.max_degree is not None else {}
    validator = DatabaseValidator(fuchsian=args.fuchsian, ramification=args.ramification, info=args.verbose > 0,
                                  analysis_params=analysis_params)
    report = validator.validate(db)
    for record in report.records:
        status = "ok" if record.ok else "FAILED"
        checks = ", ".join("{}={}".format(k, v) for k, v in sorted(record.checks.items()))
        line = "{}: {} ({})".format(record.record_id, status, checks)
        if record.defect is not None:
            line += " defect={}".format(record.defect)
        _write(line + "\n")
        for message in record.messages:
            _write("  {}\n".format(message))
    _write("records: {}, failed: {}\n".format(len(report.records), len(report.failures())))
    if args.report:
        save_as_json(report.to_dict(), args.report)
    return EXIT_OK if report.ok else EXIT_VALIDATION_FAILED


def cmd_expand(args):
    values = read_source(args.source)
    op = operator_from_values(values, args.source)
    period = expand_period(op, args.terms)
    _write(serialize_fragment({"period": period.to_list()}))
    return EXIT_OK


def cmd_fit(args):
    values = read_source(args.source)
    seq = period_from_values(values, args.source)
    result = fit_operator_search(seq, args.max_order, args.max_degree, args.min_excess, method="modular",
                                 seed=args.seed, info=args.verbose > 0)
    logger.info("Fitted at ansatz %s with %d excess equations", result.ansatz, result.excess_equations)
    _write(serialize_fragment(result.operator.to_dict()))
    return EXIT_OK


def format_exponent(root):
    """`1/2`, `0^2` for a double root, `algebraic^3` for three irrational roots"""
    text = "algebraic" if root.value is None else format_rational(root.value)
    return text if root.multiplicity == 1 else "{}^{}".format(text, root.multiplicity)


def cmd_analyze(args):
    values = read_source(args.source)
    op = operator_from_values(values, args.source)
    params = dict(DEFAULT_ANALYSIS_PARAMS)
    if args.max_degree is not None:
        params["max_factor_degree"] = args.max_degree
    report = ramification_data(op, info=args.verbose > 0, **params)
    _write("rank: {}\n".format(report.rank))
    for point in report.points:
        exponents = ", ".join(format_exponent(root) for root in point.exponents)
        _write("point: {}; exponents: [{}]; invariant_dim: {}; contribution: {}\n".format(
            point.point.label(), exponents, point.invariant_dim, point.contribution))
    _write("rf: {}\ndefect: {}\nextremal: {}\ncompleteness: {}\n".format(
        report.rf, report.defect, "true" if report.extremal else "false", report.to_dict()["completeness"]))
    if args.report:
        save_as_json(report.to_dict(), args.report)
    return EXIT_OK


def cmd_product(args):
    a = read_source(args.first)
    b = read_source(args.second)
    period = product_period(period_from_values(a, args.first), period_from_values(b, args.second), args.terms)
    output = {"period": period.to_list()}
    if "names" in a and "names" in b:
        output["names"] = product_names(a["names"], b["names"])
    _write(serialize_fragment(output))
    return EXIT_OK


def parse_filters(terms):
    """`id=340`, `name=CKP`, `c4=72` -> keyword arguments of query"""
    filters = {"coefficients": {}}
    for term in terms:
        key, sep, value = term.partition("=")
        if not sep:
            raise UsageError("Filters look like key=value, got {!r}".format(term))
        try:
            if key == "id":
                filters["id"] = int(value)
            elif key == "name":
                filters["name"] = value
            elif key in ("c2", "c3", "c4", "c5", "c6"):
                filters["coefficients"][int(key[1])] = int(value)
            else:
                raise UsageError("Unknown filter {!r}; use id, name or c2..c6".format(key))
        except ValueError:
            raise UsageError("Filter {} needs an integer value, got {!r}".format(key, value))
    return filters


def cmd_query(args):
    filters = parse_filters(args.filters)
    blocks = []
    for path in args.data:
        dimension = dimension_from_filename(path)
        if dimension is None:
            raise UsageError("Cannot infer the dimension of {}; name it smooth_fano_N.txt".format(path))
        matches = query(load_database(path, dimension), **filters)
        blocks.extend("\n".join(record_lines(record)) + "\n" for record in matches)
    _write("\n".join(blocks))
    return EXIT_OK


def cmd_serve(args):
    serve(load_service_databases(args.data), port=args.port)
    return EXIT_OK


def build_parser():
    parser = CommandLineParser(prog="quantum-periods",
                               description="Exact tools for regularized quantum periods of Fano manifolds")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress and info, -vv for debug")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True

    validate = subparsers.add_parser("validate", help="check every record of a database file")
    validate.add_argument("file", help="smooth_fano_N.txt")
    validate.add_argument("dimension", type=int, nargs="?", choices=[1, 2, 3, 4],
                          help="defaults to N from the file name")
    validate.add_argument("--fuchsian", action="store_true", help="check the Fuchs criterion")
    validate.add_argument("--ramification", action="store_true", help="check ramification defects")
    validate.add_argument("--max-degree", dest="max_degree", type=int, default=None,
                          help="largest algebraic factor degree analysed")
    validate.add_argument("--report", help="write a JSON report to this path")
    validate.set_defaults(func=cmd_validate)

    expand = subparsers.add_parser("expand", help="expand a period from its operator")
    expand.add_argument("source", nargs="?", default="-")
    expand.add_argument("--terms", type=int, default=DEFAULT_TERMS, help="last coefficient index to compute")
    expand.set_defaults(func=cmd_expand)

    fit = subparsers.add_parser("fit", help="find an operator annihilating a period")
    fit.add_argument("source", nargs="?", default="-")
    fit.add_argument("--max-order", dest="max_order", type=int, default=DEFAULT_FIT_PARAMS["max_order"])
    fit.add_argument("--max-degree", dest="max_degree", type=int, default=DEFAULT_FIT_PARAMS["max_degree"])
    fit.add_argument("--min-excess", dest="min_excess", type=int, default=DEFAULT_FIT_PARAMS["min_excess"])
    fit.add_argument("--seed", type=int, default=0, help="seed for the random primes")
    fit.set_defaults(func=cmd_fit)

    analyze = subparsers.add_parser("analyze", help="singular points and ramification of an operator")
    analyze.add_argument("source", nargs="?", default="-")
    analyze.add_argument("--max-degree", dest="max_degree", type=int, default=None,
                         help="largest algebraic factor degree analysed")
    analyze.add_argument("--report", help="write a JSON report to this path")
    analyze.set_defaults(func=cmd_analyze)

    product = subparsers.add_parser("product", help="period of a product of two Fano manifolds")
    product.add_argument("first")
    product.add_argument("second")
    product.add_argument("--terms", type=int, default=DEFAULT_TERMS, help="last coefficient index to compute")
    product.set_defaults(func=cmd_product)

    query_parser = subparsers.add_parser("query", help="search database files")
    query_parser.add_argument("filters", nargs="*", help="id=N, name=TEXT, c2=N .. c6=N")
    query_parser.add_argument("--data", action="append", required=True, metavar="FILE",
                              help="a smooth_fano_N.txt file; repeat the flag for several files")
    query_parser.set_defaults(func=cmd_query)

    serve_parser = subparsers.add_parser("serve", help="XML search service")
    serve_parser.add_argument("--port", type=int, default=DEFAULT_SERVICE_PARAMS["port"])
    serve_parser.add_argument("--data", nargs="+", default=None, help="smooth_fano_N.txt files")
    serve_parser.set_defaults(func=cmd_serve)
    return parser


def configure_logging(verbosity):
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    parser = build_parser()
    args, extras = parser.parse_known_args(argv)
    # query filters may follow --data; argparse leaves those unmatched
    if args.command == "query" and not any(e.startswith("-") for e in extras):
        args.filters = args.filters + extras
    elif extras:
        parser.error("unrecognized arguments: {}".format(" ".join(extras)))
    configure_logging(args.verbose)
    try:
        return args.func(args)
    except UsageError as e:
        sys.stderr.write("{}: {}\n".format(parser.prog, e))
        return EXIT_USAGE
    except KeyValueParseError as e:
        sys.stderr.write("{}: parse error: {}\n".format(parser.prog, e))
        return EXIT_ERROR
    except (OperatorNotFound, NotFuchsianError, ExpansionError, ValueError) as e:
        sys.stderr.write("{}: {}\n".format(parser.prog, e))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
