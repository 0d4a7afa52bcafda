import heapq, logging, time

logger = logging.getLogger(__name__)


class AnsatzSearch(object):
    """
    Walks ansatz sizes (R, S) with 1 <= R <= max_order, 1 <= S <= max_degree in
    increasing order of (R + S, R), starting from (1, 1) and expanding each size
    to (R + 1, S) and (R, S + 1). Returns the first value attempt_fn produces.

    Args:
        attempt_fn (func): takes (R, S), returns a result or raises one of failure_types
        max_order (int): largest R
        max_degree (int): largest S
        failure_types (tuple): exceptions that mean "try the next ansatz"
    """

    def __init__(self, attempt_fn, max_order, max_degree, failure_types, info=False):
        if max_order < 1 or max_degree < 1:
            raise ValueError("Search bounds must be at least 1, got ({}, {})".format(max_order, max_degree))
        self.attempt = attempt_fn
        self.max_order = max_order
        self.max_degree = max_degree
        self.failure_types = failure_types
        self.info = info
        self.failures = []

    def run(self):
        start_time = time.time()
        seen = set()
        pq = PriorityQueue()
        pq.push((1, 1), self.priority((1, 1)))
        while not pq.isEmpty():
            ansatz = pq.pop()
            if ansatz in seen:
                continue
            seen.add(ansatz)
            try:
                result = self.attempt(*ansatz)
            except self.failure_types as e:
                logger.debug("Ansatz %s failed: %s", ansatz, e)
                self.failures.append((ansatz, e))
            else:
                if self.info:
                    logger.info("Found operator at ansatz %s after %d attempts in %.2f seconds",
                                ansatz, len(seen), time.time() - start_time)
                return result
            for child in self.successors(ansatz):
                pq.push(child, self.priority(child))
        return None

    def successors(self, ansatz):
        R, S = ansatz
        return [(r, s) for r, s in [(R + 1, S), (R, S + 1)] if r <= self.max_order and s <= self.max_degree]

    @staticmethod
    def priority(ansatz):
        R, S = ansatz
        return (R + S, R)


class PriorityQueue:
    """
    Priority queue on heapq, lowest priority first. An item may be pushed
    several times with different priorities.
    """
    def __init__(self):
        self.heap = []

    def push(self, item, priority):
        heapq.heappush(self.heap, (priority, item))

    def pop(self):
        (priority, item) = heapq.heappop(self.heap)
        return item

    def isEmpty(self):
        return len(self.heap) == 0
