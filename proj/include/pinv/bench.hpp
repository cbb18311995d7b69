#pragma once

#include "pinv/matrix.hpp"
#include "pinv/store.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pinv::bench {

enum class Experiment { SearchFormat, Representation, HitMiss, FundamentalOps, ConcurrentClients };

const char* experiment_name(Experiment e);

struct Shape {
    std::size_t rows;
    std::size_t cols;
};

/// Parses "MxN".
Shape parse_shape(const std::string& text);
std::string shape_text(Shape s);

struct Measurement {
    std::string label;
    std::map<std::string, std::string> parameters;
    double median_ms = 0.0;
    double min_ms = 0.0;
    std::size_t samples = 0;
};

struct BenchReport {
    Experiment experiment = Experiment::SearchFormat;
    std::map<std::string, std::string> parameters;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<Measurement> measurements;
    std::map<std::string, double> ratios; ///< computed from medians
    std::optional<bool> results_identical;
    std::vector<std::string> notes;

    const Measurement* find(const std::string& label) const;
    std::string to_json() const;
};

/// Common knobs. samples counts kept repetitions; one extra warm-up run is
/// always made and discarded.
struct Options {
    std::size_t samples = 5;
    std::uint64_t seed = 20100601;
};

struct TimingStats {
    double median_ms = 0.0;
    double min_ms = 0.0;
    std::size_t samples = 0;
};

/// Runs fn samples+1 times on a monotonic clock and drops the first run.
TimingStats time_it(std::size_t samples, const std::function<void()>& fn);
TimingStats summarize(std::vector<double> samples_ms);

/// Entries uniform in [-10, 10].
DenseMatrix random_matrix(Shape shape, std::mt19937_64& rng, Backend backend = Backend::Flat);
/// B^T B + n I with B uniform in [-1, 1].
DenseMatrix random_spd(std::size_t n, std::mt19937_64& rng, Backend backend = Backend::Flat);

/// Search latency of find_matrix in full-scan mode for the last of
/// `count` stored random matrices, per layout. With both layouts present the
/// report carries ratios["mR/R"].
BenchReport bench_search(const std::vector<Layout>& layouts, std::size_t count, Shape shape,
                         const Options& options = {});

/// weighted_pinv timings per size and backend, plus the cross-backend
/// bit-equality verdict.
BenchReport bench_pinv_representation(const std::vector<Shape>& sizes, const std::vector<Backend>& backends,
                                      const Options& options = {});

/// The sizes used for the representation experiment, with the labels of
/// the original test-family rows replaced by random matrices.
std::vector<std::pair<std::string, Shape>> representation_sizes();

/// Miss latency (fresh A(MN) request) against hit latency (the same
/// request repeated) for one size. `populate` random matrices are stored
/// first. ratios["miss/hit"] is the speedup.
BenchReport bench_hit_miss(Shape shape, MatrixStore& store, std::size_t populate = 0,
                           const Options& options = {});

enum class FundamentalOp { Multiply, Add, Subtract };
const char* fundamental_name(FundamentalOp op);

struct OperandShapes {
    Shape left;
    Shape right;
};

BenchReport bench_fundamental(const std::vector<FundamentalOp>& ops, const std::vector<OperandShapes>& sizes,
                              const std::vector<Backend>& backends, const Options& options = {});

/// The operand shapes of the fundamental-operations experiment.
std::vector<OperandShapes> fundamental_sizes(FundamentalOp op);

/// Starts the HTTP service on an ephemeral port and lets `clients` threads
/// post identical A(MN) requests. Reported only.
BenchReport bench_concurrent_clients(Shape shape, std::size_t clients, std::size_t requests_per_client,
                                     const Options& options = {});

} // namespace pinv::bench
