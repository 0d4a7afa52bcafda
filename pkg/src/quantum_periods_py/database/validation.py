import logging

from tqdm import tqdm

from quantum_periods_py.analysis.diff_form import to_diff_form
from quantum_periods_py.analysis.ramification import is_fuchsian, ramification_data, NotFuchsianError, RamificationReport
from quantum_periods_py.database.names import validate_names
from quantum_periods_py.periods.recurrence import annihilates

logger = logging.getLogger(__name__)

PASS, FAIL, SKIP = "pass", "fail", "skip"

# The two dimension-two local systems known to be non-extremal
DEFECT_ONE_NAMES = set(["dP(7)", "dP(8)"])


def expected_defect(record, dimension):
    """1 for dP(7) and dP(8), 0 for every other record of dimension <= 3, None in dimension 4"""
    if dimension > 3:
        return None
    return 1 if DEFECT_ONE_NAMES & set(record.names) else 0


class RecordValidation(object):

    def __init__(self, record_id):
        self.record_id = record_id
        self.checks = {}
        self.messages = []
        self.warnings = []
        self.defect = None

    def set(self, check, status, message=None):
        self.checks[check] = status
        if message:
            self.messages.append("{}: {}".format(check, message))

    @property
    def ok(self):
        return all(status != FAIL for status in self.checks.values())

    def to_dict(self):
        record_dict = {"id": self.record_id, "ok": self.ok, "checks": dict(self.checks),
                       "messages": list(self.messages), "warnings": list(self.warnings)}
        if self.defect is not None:
            record_dict["defect"] = self.defect
        return record_dict


class ValidationReport(object):

    def __init__(self, dimension, records, warnings=()):
        self.dimension = dimension
        self.records = list(records)
        self.warnings = list(warnings)

    @property
    def ok(self):
        return all(r.ok for r in self.records)

    def failures(self):
        return [r for r in self.records if not r.ok]

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "ok": self.ok,
            "num_records": len(self.records),
            "num_failed": len(self.failures()),
            "warnings": list(self.warnings),
            "records": [r.to_dict() for r in self.records],
        }


class DatabaseValidator(object):
    """
    Runs the consistency checks on every record of a Database. Fuchsian and
    ramification checks are expensive and only run when requested.

    Args:
        fuchsian (bool): check the Fuchs criterion for each stored operator
        ramification (bool): compute the ramification defect and compare with the expected value
        info (bool): progress bar on stderr
        analysis_params (dict): overrides for the ramification computation
    """

    def __init__(self, fuchsian=False, ramification=False, info=False, analysis_params=None):
        self.fuchsian = fuchsian
        self.ramification = ramification
        self.info = info
        self.analysis_params = analysis_params or {}

    def validate(self, db):
        warnings = []
        if not db.has_sequential_ids():
            warnings.append("Record ids are not sequential from 1")
        results = []
        for record in tqdm(db.records, desc="Validating", disable=not self.info):
            results.append(self.validate_record(record, db))
        report = ValidationReport(db.dimension, results, warnings)
        logger.info("Validated %d records, %d failed", len(results), len(report.failures()))
        return report

    def validate_record(self, record, db):
        result = RecordValidation(record.id)
        issues = record.period.period_issues()
        result.set("period", FAIL if issues else PASS, "; ".join(issues))

        missing = []
        if db.dimension <= 3:
            if record.operator is None:
                missing.append("pf_coefficients, pf_exponents, pf_proven")
            if record.notes is None:
                missing.append("notes")
        result.set("keys", FAIL if missing else PASS, "missing " + ", ".join(missing) if missing else None)

        if record.duplicate is None:
            result.set("duplicate", SKIP)
        elif record.duplicate == record.id or record.duplicate not in db:
            result.set("duplicate", FAIL, "references unknown record {}".format(record.duplicate))
        else:
            result.set("duplicate", PASS)

        result.warnings.extend(validate_names(record, db.dimension))
        self._check_operator(record, db.dimension, result)
        return result

    def _check_operator(self, record, dimension, result):
        op = record.operator
        operator_checks = ["annihilation", "normalized"]
        if self.fuchsian:
            operator_checks.append("fuchsian")
        if self.ramification:
            operator_checks.append("ramification")
        if op is None:
            for check in operator_checks:
                result.set(check, SKIP)
            return

        report = annihilates(op, record.period)
        result.set("annihilation", PASS if report.ok else FAIL,
                   None if report.ok else "nonzero residuals at e = {}".format([e for e, _ in report.residuals]))
        result.set("normalized", PASS if op.is_normalized() else FAIL,
                   None if op.is_normalized() else "operator is not in normalized form")

        if self.fuchsian:
            certificate = is_fuchsian(to_diff_form(op))
            result.set("fuchsian", PASS if certificate.fuchsian else FAIL,
                       None if certificate.fuchsian else "irregular at {}".format(
                           ", ".join(p.label() for p in certificate.failing_points())))

        if self.ramification:
            try:
                ramification = ramification_data(op, **self.analysis_params)
            except NotFuchsianError as e:
                result.set("ramification", FAIL, str(e))
                return
            result.defect = ramification.defect
            expected = expected_defect(record, dimension)
            if ramification.completeness != RamificationReport.FULL:
                result.set("ramification", SKIP, ramification.partial_reason)
            elif expected is None or ramification.defect == expected:
                result.set("ramification", PASS)
            else:
                result.set("ramification", FAIL, "defect {}, expected {}".format(ramification.defect, expected))
