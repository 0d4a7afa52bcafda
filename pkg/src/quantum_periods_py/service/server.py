"""
Read-only reproduction of the Graded Ring Database XML search endpoint,
GET /xml/search.xml?agent=...&dataid=smoothfano4&c4=72&c5=360&printlevel=1
"""
import logging
import os
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import urlsplit, parse_qs

import lxml.etree as ET

from quantum_periods_py.database.kvdb import load_database, query, format_integer_list, format_pair_list, \
    format_boolean, QUERY_COEFFICIENT_RANGE
from quantum_periods_py.static import DATABASES_DIR, DATABASE_FILE_TEMPLATE, DATAIDS_ENV
from quantum_periods_py.utils import dimension_from_filename, format_rational

logger = logging.getLogger(__name__)

SEARCH_PATH = "/xml/search.xml"
XML_HEADER = '<?xml version="1.0"?>\n<!-- Graded Ring Database -->\n'

DEFAULT_SERVICE_PARAMS = {
    "host": "127.0.0.1",
    "port": 8080,
}

DATAID_FILES = {"smoothfano{}".format(n): DATABASE_FILE_TEMPLATE.format(n) for n in (1, 2, 3, 4)}


class BadRequest(ValueError):
    pass


def dataid_for_dimension(dimension):
    return "smoothfano{}".format(dimension)


def dataid_paths_from_env(environ=None):
    """Parses QUANTUM_PERIODS_DATAIDS, a comma-separated list of dataid=path pairs"""
    value = (environ if environ is not None else os.environ).get(DATAIDS_ENV, "").strip()
    mapping = {}
    if not value:
        return mapping
    for item in value.split(","):
        if "=" not in item:
            raise ValueError("{} entries must look like dataid=path, got {!r}".format(DATAIDS_ENV, item))
        dataid, path = item.split("=", 1)
        mapping[dataid.strip()] = path.strip()
    return mapping


def load_service_databases(paths=None, data_dir=DATABASES_DIR, environ=None):
    """
    dataid -> Database. Explicit paths are mapped by the dimension in their file
    name; otherwise the environment override is used, and otherwise every
    shipped database file that exists.
    """
    if paths:
        mapping = {}
        for path in paths:
            dimension = dimension_from_filename(path)
            if dimension is None:
                raise ValueError("Cannot infer a dataid for {}; name it smooth_fano_N.txt".format(path))
            mapping[dataid_for_dimension(dimension)] = path
    else:
        mapping = dataid_paths_from_env(environ)
        if not mapping:
            mapping = {dataid: os.path.join(data_dir, name) for dataid, name in DATAID_FILES.items()
                       if os.path.exists(os.path.join(data_dir, name))}
    databases = {}
    for dataid, path in mapping.items():
        dimension = dimension_from_filename(path) or int(dataid[len("smoothfano"):])
        databases[dataid] = load_database(path, dimension)
        logger.info("Serving %s from %s (%d records)", dataid, path, len(databases[dataid]))
    return databases


##############
# RENDERING  #
##############

def _add(parent, tag, text):
    element = ET.SubElement(parent, tag)
    element.text = text
    return element


def render_results(records, printlevel):
    root = ET.Element("results", numrows=str(len(records)))
    for row, record in enumerate(records, start=1):
        result = ET.SubElement(root, "result", row=str(row), printlevel=str(printlevel))
        _add(result, "id", str(record.id))
        _add(result, "names", ", ".join(record.names))
        for d in QUERY_COEFFICIENT_RANGE:
            value = record.coefficient(d)
            if value is not None:
                _add(result, "c{}".format(d), format_rational(value))
        if printlevel >= 2:
            _add(result, "period", format_integer_list(record.period.to_list()))
            if record.notes is not None:
                _add(result, "notes", record.notes)
        if printlevel >= 3 and record.operator is not None:
            _add(result, "pf_coefficients", format_integer_list(record.operator.coefficients))
            _add(result, "pf_exponents", format_pair_list(record.operator.exponents))
            _add(result, "pf_proven", format_boolean(record.pf_proven))
    return XML_HEADER + ET.tostring(root, pretty_print=True, encoding="unicode")


def render_error(message):
    root = ET.Element("error")
    root.text = message
    return XML_HEADER + ET.tostring(root, pretty_print=True, encoding="unicode")


class GradedRingService(object):
    """
    Answers search queries over a fixed set of databases keyed by dataid.
    The databases are never modified, so one instance serves all threads.
    """

    def __init__(self, databases):
        if not databases:
            raise ValueError("The search service needs at least one database")
        self.databases = dict(databases)

    @staticmethod
    def _integer(params, key):
        text = params[key]
        try:
            return int(text)
        except ValueError:
            raise BadRequest("Parameter {} must be an integer, got {!r}".format(key, text))

    def search(self, params):
        """
        Args:
            params (dict): query parameters, each a string or a list of strings

        Returns (HTTP status, XML body)
        """
        params = {k: v[0] if isinstance(v, list) else v for k, v in params.items()}
        try:
            if "agent" not in params:
                raise BadRequest("Missing agent parameter; identify your client with agent=<name>")
            dataid = params.get("dataid")
            if dataid not in self.databases:
                raise BadRequest("Unknown dataid {!r}; available: {}".format(dataid, ", ".join(sorted(self.databases))))
            printlevel = self._integer(params, "printlevel") if "printlevel" in params else 1
            if printlevel not in (1, 2, 3):
                raise BadRequest("printlevel must be 1, 2 or 3, got {}".format(printlevel))
            record_id = self._integer(params, "id") if "id" in params else None
            coefficients = {d: self._integer(params, "c{}".format(d))
                            for d in QUERY_COEFFICIENT_RANGE if "c{}".format(d) in params}
        except BadRequest as e:
            return 400, render_error(str(e))

        logger.info("Search by agent %r on %s: id=%s coefficients=%s", params["agent"], dataid, record_id, coefficients)
        records = query(self.databases[dataid], id=record_id, coefficients=coefficients)
        return 200, render_results(records, printlevel)


class SearchRequestHandler(BaseHTTPRequestHandler):

    service = None

    def do_GET(self):
        url = urlsplit(self.path)
        if url.path != SEARCH_PATH:
            self._respond(404, render_error("Not found: {}".format(url.path)))
            return
        status, body = self.service.search(parse_qs(url.query))
        self._respond(status, body)

    def _respond(self, status, body):
        payload = body.encode("ascii", "xmlcharrefreplace")
        self.send_response(status)
        self.send_header("Content-Type", "text/xml")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, format, *args):
        logger.debug("%s - %s", self.address_string(), format % args)


class SearchServer(ThreadingHTTPServer):
    # Finish in-flight responses on shutdown
    daemon_threads = False
    block_on_close = True


def make_server(service, host=DEFAULT_SERVICE_PARAMS["host"], port=DEFAULT_SERVICE_PARAMS["port"]):
    handler = type("BoundSearchRequestHandler", (SearchRequestHandler,), {"service": service})
    return SearchServer((host, port), handler)


def serve(databases, port=DEFAULT_SERVICE_PARAMS["port"], host=DEFAULT_SERVICE_PARAMS["host"]):
    server = make_server(GradedRingService(databases), host, port)
    logger.warning("Serving %s on http://%s:%d%s", ", ".join(sorted(databases)), host, server.server_address[1], SEARCH_PATH)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        logger.info("Shutting down")
    finally:
        server.server_close()
