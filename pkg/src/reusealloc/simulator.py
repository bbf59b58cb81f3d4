"""Discrete-time environment enforcing the hard per-step capacity constraint.

An allocation of A units with duration D made at time t occupies steps
t, ..., t+D-1 and is released at the start of step t+D; D = 0 occupies
nothing.  The simulator owns the feasibility gate: policies only propose
actions, and a proposal is downgraded to the null action whenever any
resource has fewer than a_max free units.
"""

import csv

import numpy as np

from .model import episode_streams, mean_outcomes_for_type, sample_arrival


class ConstraintViolation(RuntimeError):
    pass


class OccupancyLedger:
    """Per-resource schedule of in-use units and their release times."""

    def __init__(self, capacities):
        self.capacities = np.asarray(capacities, dtype=float)
        self.occupied_now = np.zeros(len(self.capacities))
        self.release_schedule = {}  # future time step -> units vector
        self.time = 1

    def occupied(self, i):
        return float(self.occupied_now[i])

    def allocate(self, allocations, durations):
        """Book allocations made at the current step; durations in steps."""
        allocations = np.asarray(allocations, dtype=float)
        durations = np.asarray(durations, dtype=int)
        active = allocations * (durations >= 1)
        after = self.occupied_now + active
        if (after > self.capacities + 1e-12).any():
            raise ConstraintViolation(
                f"allocation at t={self.time} would exceed capacity"
            )
        self.occupied_now = after
        for i, (a, d) in enumerate(zip(allocations, durations)):
            if a > 0.0 and d >= 1:
                release = self.time + int(d)
                bucket = self.release_schedule.setdefault(
                    release, np.zeros(len(self.capacities))
                )
                bucket[i] += a

    def advance(self):
        """Move to the next time step, releasing units scheduled for it."""
        self.time += 1
        released = self.release_schedule.pop(self.time, None)
        if released is not None:
            self.occupied_now = self.occupied_now - released
            self.occupied_now[np.abs(self.occupied_now) < 1e-12] = 0.0


def occupied(ledger, i):
    return ledger.occupied(i)


def feasibility_gate(ledger, a_max):
    """True iff every resource has at least a_max units free."""
    return bool((ledger.occupied_now <= ledger.capacities - a_max + 1e-12).all())


class Trajectory:
    """Per-step record of one episode."""

    def __init__(self, n_rewards, n_resources):
        self.n_rewards = n_rewards
        self.n_resources = n_resources
        self.arrivals = []
        self.actions = []
        self.rewards = []     # realized W vectors
        self.occupancy = []   # occupied vector after the step's allocation
        self.cum_rewards = []

    def record(self, j, k, outcome, occupied_now):
        self.arrivals.append(j)
        self.actions.append(k)
        self.rewards.append(outcome.rewards.copy())
        self.occupancy.append(occupied_now.copy())
        prev = self.cum_rewards[-1] if self.cum_rewards else np.zeros(self.n_rewards)
        self.cum_rewards.append(prev + outcome.rewards)

    def __len__(self):
        return len(self.arrivals)

    def reward_matrix(self):
        return np.array(self.rewards)

    def occupancy_matrix(self):
        return np.array(self.occupancy)

    def cumulative_matrix(self):
        return np.array(self.cum_rewards)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            header = (
                ["t", "arrival_type", "action"]
                + [f"W_{i + 1}" for i in range(self.n_rewards)]
                + [f"occupied_{i + 1}" for i in range(self.n_resources)]
                + [f"cum_W_{i + 1}" for i in range(self.n_rewards)]
            )
            writer.writerow(header)
            for t in range(len(self)):
                writer.writerow(
                    [t + 1, self.arrivals[t], self.actions[t]]
                    + [repr(float(x)) for x in self.rewards[t]]
                    + [repr(float(x)) for x in self.occupancy[t]]
                    + [repr(float(x)) for x in self.cum_rewards[t]]
                )


class EpisodeState:
    def __init__(self, instance, rng_outcomes):
        self.instance = instance
        self.ledger = OccupancyLedger(instance.capacities)
        self.rng_outcomes = rng_outcomes
        self.t = 1


def step(state, j, action):
    """Sample the outcome of `action`, book it, and advance time.

    Gating happens in the policy wrapper; the ledger independently raises on
    any step that would break a capacity constraint (unreachable under
    correct gating with A <= a_max).
    """
    outcome = state.instance.outcome_model.sample(state.rng_outcomes, j, action)
    state.ledger.allocate(outcome.allocations, outcome.durations)
    occupied_now = state.ledger.occupied_now.copy()
    state.ledger.advance()
    state.t += 1
    return outcome, occupied_now


def run_episode(instance, policy, T, seed=None, streams=None, a_max=None):
    """Run one episode; the policy never sees arrival probabilities or T."""
    if T < 1:
        raise ValueError("horizon must be >= 1")
    if streams is None:
        streams = episode_streams(seed)
    if a_max is None:
        from .model import compute_bounds

        a_max = compute_bounds(instance).a_max
    state = EpisodeState(instance, streams["outcomes"])
    trajectory = Trajectory(instance.n_rewards, instance.n_resources)
    rng_arrivals = streams["arrivals"]
    rng_policy = streams["policy"]
    for t in range(1, T + 1):
        j = sample_arrival(rng_arrivals, instance.arrival_probs)
        means = mean_outcomes_for_type(instance, j)
        proposal = policy.next_action(t, j, means, rng_policy)
        if proposal != instance.null_action and not feasibility_gate(state.ledger, a_max):
            action = instance.null_action
        else:
            action = proposal
        outcome, occupied_now = step(state, j, action)
        trajectory.record(j, action, outcome, occupied_now)
        observe = getattr(policy, "observe", None)
        if observe is not None:
            observe(t, outcome)
    return trajectory


def replay_occupancy(instance, trajectory, seed_streams):
    """Re-run a trajectory's actions through a fresh ledger (determinism check)."""
    state = EpisodeState(instance, seed_streams["outcomes"])
    occ = []
    for j, k in zip(trajectory.arrivals, trajectory.actions):
        _, occupied_now = step(state, j, k)
        occ.append(occupied_now)
    return np.array(occ)
