#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pima/config.hpp"
#include "pima/metrics.hpp"

namespace pima {

/// Validates `config` and runs one replication.
Metrics run(const SimConfig& config);

/// A labelled base configuration swept over load and seeds.
struct Curve {
    std::string name;
    SimConfig base;
};

/// One (curve, load, seed) replication.
struct Cell {
    std::string curve;
    SimConfig config;
    Metrics metrics;
};

/// Mean and 95% Student-t confidence half-width across seeds.
struct Estimate {
    double mean = 0.0;
    double ci95_half = 0.0;
    std::size_t samples = 0;
};

Estimate summarize(const std::vector<double>& values);

/// Per-(curve, load) aggregation over seeds.
struct PointSummary {
    std::string curve;
    SimConfig config;  // seed field is the first seed of the point
    std::size_t seeds = 0;
    Estimate drop;
    std::optional<Estimate> latency;  // empty when no seed delivered anything
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t residual = 0;
};

struct SweepResult {
    std::vector<Cell> cells;  // curve-major, then load, then seed
    std::vector<PointSummary> points;

    const PointSummary& point(const std::string& curve, std::size_t load_index) const;
};

/// Runs every (curve, load, seed) cell on `threads` workers (0 = hardware
/// concurrency). Results do not depend on the thread count.
SweepResult sweep(const std::vector<Curve>& curves, const std::vector<double>& loads,
                  const std::vector<std::uint64_t>& seeds, unsigned threads = 0);

/// `count` evenly spaced loads from `first` to `last` inclusive.
std::vector<double> linear_grid(double first, double last, std::size_t count);

/// The four reference curves: TDMA, SALOHA, and PIMA at target estimation
/// errors 0.1 and 0.3, sharing K, buffer, horizon and warmup of `base`.
std::vector<Curve> reference_curves(const SimConfig& base);

// CSV ----------------------------------------------------------------------

inline constexpr const char* kCellCsvHeader =
    "protocol,K,lambda_total,B,L1_us,seed,generated,delivered,dropped,drop_prob,mean_latency_s";

/// One cell row matching kCellCsvHeader (no trailing newline). An empty
/// latency field means nothing was delivered.
std::string cell_csv_row(const SimConfig& config, const Metrics& metrics);

inline constexpr const char* kPointCsvHeader =
    "curve,protocol,K,lambda_total,B,L1_us,M1,seeds,mean,ci95_half,ci95_low,ci95_high";

enum class PointMetric { drop, latency };
void write_point_csv(std::ostream& out, const std::vector<PointSummary>& points, PointMetric metric);
void write_cell_csv(std::ostream& out, const std::vector<Cell>& cells);

/// Single-line `key=value` rendering of every resolved field.
std::string describe(const SimConfig& config);

}  // namespace pima
