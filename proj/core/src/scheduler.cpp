#include "pima/scheduler.hpp"

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

#include "pima/special_functions.hpp"

namespace pima {

namespace {

void check_users(int users)
{
    if (users < 1) {
        throw std::out_of_range("K must be at least 1");
    }
}

void check_active(int users, int active)
{
    if (active < 0 || active > users) {
        throw std::out_of_range("active count " + std::to_string(active) + " outside 0..K");
    }
}

void check_slots(int users, int slots)
{
    if (slots < 1 || slots > users) {
        throw std::out_of_range("DT length " + std::to_string(slots) + " outside 1..K");
    }
}

// Largest K with K * C(K, K/2) < 2^53.
constexpr int kExactUsers = 50;

// Relative slack under which two efficiencies count as a tie.
constexpr double kTieTolerance = 1e-12;

}  // namespace

double success_prob(int users, int active, int slot_users)
{
    check_users(users);
    check_active(users, active);
    if (slot_users < 1 || slot_users > users) {
        throw std::out_of_range("slot users " + std::to_string(slot_users) + " outside 1..K");
    }
    if (active < 1 || active - 1 > users - slot_users) {
        return 0.0;
    }
    if (users <= kExactUsers) {
        // Both integers stay below 2^53, so the quotient is correctly rounded.
        const auto num = static_cast<std::uint64_t>(slot_users) * choose_exact(users - slot_users, active - 1);
        return static_cast<double>(num) / static_cast<double>(choose_exact(users, active));
    }
    const double log_num = log_choose(users - slot_users, active - 1);
    if (std::isinf(log_num)) {
        return 0.0;
    }
    return slot_users * std::exp(log_num - log_choose(users, active));
}

SlotLoad users_per_slot(int users, int slots)
{
    check_users(users);
    check_slots(users, slots);
    SlotLoad load{slots, std::vector<int>(static_cast<std::size_t>(slots), users / slots)};
    const int heavy = users % slots;
    for (int l = 0; l < heavy; ++l) {
        ++load.users[static_cast<std::size_t>(l)];
    }
    return load;
}

double frame_efficiency(int users, int active, int slots)
{
    check_users(users);
    check_active(users, active);
    check_slots(users, slots);
    // Only two distinct loads appear, ceil(K/L2) and floor(K/L2).
    const int light = users / slots;
    const int heavy = users % slots;
    double total = (slots - heavy) * success_prob(users, active, light);
    if (heavy > 0) {
        total += heavy * success_prob(users, active, light + 1);
    }
    return total / slots;
}

int optimal_slots(int users, int active)
{
    check_users(users);
    check_active(users, active);
    if (active == 0) {
        return 1;
    }
    int best = 1;
    double best_eta = frame_efficiency(users, active, 1);
    for (int slots = 2; slots <= users; ++slots) {
        const double eta = frame_efficiency(users, active, slots);
        if (eta > best_eta * (1.0 + kTieTolerance)) {
            best = slots;
            best_eta = eta;
        }
    }
    return best;
}

int optimal_slots_bisect(int users, int active)
{
    check_users(users);
    check_active(users, active);
    if (active == 0) {
        return 1;
    }
    // Smallest L2 with eta(L2) >= eta(L2 + 1), i.e. where ascent stops.
    int lo = 1;
    int hi = users;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        const double here = frame_efficiency(users, active, mid);
        const double next = frame_efficiency(users, active, mid + 1);
        if (next > here * (1.0 + kTieTolerance)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    return lo;
}

ScheduleTable::ScheduleTable(int users) : users_(users)
{
    check_users(users);
    slots_.resize(static_cast<std::size_t>(users) + 1);
    efficiency_.resize(static_cast<std::size_t>(users) + 1);
    for (int active = 0; active <= users; ++active) {
        const int l2 = optimal_slots(users, active);
        slots_[static_cast<std::size_t>(active)] = l2;
        efficiency_[static_cast<std::size_t>(active)] = frame_efficiency(users, active, l2);
    }
}

FrameSchedule build_schedule(int estimate, const ScheduleTable& table, Rng& rng, bool skip_empty)
{
    const int users = table.users();
    check_active(users, estimate);
    FrameSchedule schedule;
    schedule.slot_of_user.assign(static_cast<std::size_t>(users), 0);
    if (estimate == 0 && skip_empty) {
        return schedule;
    }
    const SlotLoad load = users_per_slot(users, table.slots(estimate));
    schedule.slots = load.slots;
    if (load.slots == 1) {
        schedule.slot_of_user.assign(static_cast<std::size_t>(users), 1);
        return schedule;
    }

    std::vector<int> order(static_cast<std::size_t>(users));
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_index(i + 1));
        std::swap(order[i], order[j]);
    }
    std::size_t next = 0;
    for (int l = 0; l < load.slots; ++l) {
        for (int n = 0; n < load.users[static_cast<std::size_t>(l)]; ++n) {
            schedule.slot_of_user[static_cast<std::size_t>(order[next++])] = l + 1;
        }
    }
    return schedule;
}

}  // namespace pima
