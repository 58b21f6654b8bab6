"""Trace checks shared by the unit and acceptance suites."""
from rentdiv.model import Solution, check_ef


def trace_failures(trace):
    """Every violated walk invariant along ``trace``, as readable strings (empty when all hold)."""
    sur = trace.surrogate.instance
    out = []
    steps = trace.steps
    for st in steps:
        if not check_ef(sur, Solution(st.allocation, st.prices)).ok:
            out.append(f"step {st.iteration}: not envy-free for the surrogate")
    for prev, cur in zip(steps, steps[1:]):
        if any(b > a for a, b in zip(prev.prices, cur.prices)):
            out.append(f"step {cur.iteration}: a price went up")
    run = steps[1:]
    for prev, cur in zip(run, run[1:]):
        if cur.domain == prev.domain and not cur.weight > prev.weight:
            out.append(f"step {cur.iteration}: weight {cur.weight} not above {prev.weight} in the same domain")
        if not cur.potential.key() > prev.potential.key():
            out.append(f"step {cur.iteration}: potential did not increase")
    for st in run:
        pot = st.potential
        if pot.phi2 is not None and not (0 <= pot.phi2 < 1):
            out.append(f"step {st.iteration}: phi2 = {pot.phi2} outside [0, 1)")
    return out
