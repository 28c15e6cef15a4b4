"""Node-failure injection and rollback of the SFCs it touches."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LAYERS = ("uav", "satellite")
_PREFIX = {"uav": "U", "satellite": "S", "ground": "G"}


@dataclass(frozen=True)
class FailureConfig:
    """Poisson failure process, resampled every ``update_interval_slots``.

    ``schedule`` overrides sampling with explicit ``(slot, nodes)`` pairs:
    from each listed slot on, the failed set is exactly ``nodes`` until the
    next listed slot.  Node names use the ``U3`` / ``S0`` form.
    """

    lambda_: float = 2.0
    update_interval_slots: int = 3
    eligible_layers: tuple[str, ...] = LAYERS
    per_layer_lambda: tuple[tuple[str, float], ...] | None = None
    schedule: tuple[tuple[int, tuple[str, ...]], ...] | None = None

    def __post_init__(self):
        if self.lambda_ < 0:
            raise ValueError("failure.lambda must be >= 0")
        if self.update_interval_slots < 1:
            raise ValueError("failure.update_interval_slots must be >= 1")
        for layer in self.eligible_layers:
            if layer not in LAYERS:
                raise ValueError(f"failure.eligible_layers: unknown layer {layer!r}")
        if self.per_layer_lambda is not None:
            for layer, lam in self.per_layer_lambda:
                if layer not in LAYERS or lam < 0:
                    raise ValueError(f"failure.per_layer_lambda: bad entry {layer!r}: {lam}")


@dataclass
class FailureEvent:
    slot: int
    failed: frozenset
    affected_sfcs: set = field(default_factory=set)
    rolled_back_to: dict = field(default_factory=dict)
    redeploy_flags: list = field(default_factory=list)   # (sfc, vnf) pairs newly flagged


def sample_failures(stream: np.random.Generator, config: FailureConfig,
                    candidate_nodes) -> set:
    """Draw ``n ~ Poisson(lambda)`` distinct failed nodes from the candidates.

    ``n`` is capped at the number of candidates.  With ``per_layer_lambda``
    each listed layer is sampled on its own.
    """
    candidates = sorted(candidate_nodes)
    if config.per_layer_lambda is None:
        groups = [(config.lambda_, candidates)]
    else:
        groups = [(lam, [c for c in candidates if c.startswith(_PREFIX[layer])])
                  for layer, lam in config.per_layer_lambda]
    failed = set()
    for lam, pool in groups:
        if lam <= 0 or not pool:
            continue
        n = min(int(stream.poisson(lam)), len(pool))
        if n:
            picks = stream.choice(len(pool), size=n, replace=False)
            failed.update(pool[int(i)] for i in picks)
    return failed


def failure_candidates(node_names, config: FailureConfig) -> list:
    prefixes = tuple(_PREFIX[layer] for layer in config.eligible_layers)
    return [n for n in node_names if n.startswith(prefixes)]


class FailureProcess:
    """Yields the failed set for every slot, independent of the policy.

    Draws come only from the ``"failures"`` stream, and only at update
    boundaries, so all policies run with the same seed see the same trace.
    """

    def __init__(self, config: FailureConfig, node_names, stream: np.random.Generator | None):
        self.config = config
        self.candidates = failure_candidates(node_names, config)
        self.stream = stream
        self._schedule = dict(config.schedule) if config.schedule is not None else None
        self.current: frozenset = frozenset()

    def is_update(self, slot: int) -> bool:
        if self._schedule is not None:
            return slot in self._schedule
        return slot % self.config.update_interval_slots == 0

    def advance(self, slot: int) -> frozenset | None:
        """Return the new failed set when ``slot`` is an update boundary, else None."""
        if not self.is_update(slot):
            return None
        if self._schedule is not None:
            self.current = frozenset(self._schedule[slot])
        else:
            self.current = frozenset(sample_failures(self.stream, self.config, self.candidates))
        return self.current


def apply_failures(state, failed, slot: int) -> FailureEvent:
    """Roll back every SFC touching ``failed`` and flag VNFs for redeployment.

    An SFC is affected when its current node, its in-flight transmission,
    or any part of its pending deployment (a relay left on its planned
    route, or the node of a VNF not yet completed) has failed.  Affected SFCs return
    to the most recent node of their traversal history that is still alive
    (the origin ground station at worst), lose the progress made beyond that
    node, and are handed to the recovery policy.  ``w`` is set for every
    incomplete VNF whose assigned node failed.
    """
    failed = frozenset(failed)
    event = FailureEvent(slot=slot, failed=failed)
    if not failed:
        return event
    for sfc in state.sfcs:
        if sfc.done:
            continue
        touched = sfc.current in failed
        if sfc.tx is not None and (sfc.tx.dst in failed or sfc.tx.src in failed):
            touched = True
        if any(n in failed for n in sfc.route):
            touched = True
        pending_hit = [m for m, node in sfc.placement.items()
                       if m >= sfc.next_vnf and node in failed]
        if pending_hit:
            touched = True
        if not touched:
            continue
        event.affected_sfcs.add(sfc.k)
        newly = []
        for m in sorted(pending_hit):
            if not sfc.w[m]:
                sfc.w[m] = True
                newly.append(m)
        event.redeploy_flags.extend((sfc.k, m) for m in newly)
        target = state.rollback(sfc, failed, slot, attribute_to=newly[0] if newly else None)
        event.rolled_back_to[sfc.k] = target
    return event
