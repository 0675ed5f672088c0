#pragma once

#include <vector>

#include "pima/random.hpp"

namespace pima {

/// Per-slot user counts of a DT sub-frame. Heavier slots come first.
struct SlotLoad {
    int slots = 0;
    std::vector<int> users;  // users[l] for l = 0..slots-1
};

/// Slot index (1-based) assigned to every user, and the DT length.
struct FrameSchedule {
    std::vector<int> slot_of_user;
    int slots = 0;
};

/// P[exactly one active user among the u sharing a slot], with nu of the
/// K users active uniformly at random: u C(K-u, nu-1) / C(K, nu).
double success_prob(int users, int active, int slot_users);

SlotLoad users_per_slot(int users, int slots);

/// Expected successes per DT slot for `slots` slots given nu active users.
double frame_efficiency(int users, int active, int slots);

/// argmax over 1..K of frame_efficiency by exhaustive scan. Ties go to the
/// shorter sub-frame; active == 0 yields 1.
int optimal_slots(int users, int active);

/// Same optimum found by binary search on the sign of the forward
/// difference of the efficiency. Only valid when the efficiency is
/// unimodal in the sub-frame length; checked against the scan in tests.
int optimal_slots_bisect(int users, int active);

/// Offline table of optimal DT lengths indexed by the active count.
class ScheduleTable {
public:
    explicit ScheduleTable(int users);

    int users() const noexcept { return users_; }
    int slots(int active) const { return slots_.at(static_cast<std::size_t>(active)); }
    double efficiency(int active) const { return efficiency_.at(static_cast<std::size_t>(active)); }

private:
    int users_;
    std::vector<int> slots_;
    std::vector<double> efficiency_;
};

/// Deals a uniformly random permutation of all K users into slots with
/// the multiplicities of users_per_slot(K, table.slots(estimate)).
/// With `skip_empty` set, an estimate of 0 yields an empty schedule
/// (slots == 0); otherwise it falls back to a single slot.
FrameSchedule build_schedule(int estimate, const ScheduleTable& table, Rng& rng, bool skip_empty = false);

}  // namespace pima
