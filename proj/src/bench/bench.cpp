#include "pinv/bench.hpp"

#include "pinv/engine.hpp"
#include "pinv/error.hpp"
#include "pinv/format.hpp"
#include "pinv/ops.hpp"
#include "pinv/pipeline.hpp"
#include "pinv/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <set>
#include <thread>

#include <unistd.h>

namespace pinv::bench {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

/// A store file under the temp directory, removed on destruction.
class ScratchStore {
public:
    explicit ScratchStore(Layout layout, SearchMode search = SearchMode::FullScan)
    {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("pinv-bench-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + ".db");
        remove_files();
        store_ = std::make_unique<MatrixStore>(path_, StoreOptions{layout, search});
    }
    ~ScratchStore()
    {
        store_.reset();
        remove_files();
    }
    MatrixStore& operator*() { return *store_; }
    MatrixStore* operator->() { return store_.get(); }

private:
    void remove_files()
    {
        std::error_code ec;
        for (const char* suffix : {"", "-wal", "-shm", "-journal"})
            std::filesystem::remove(path_.string() + suffix, ec);
    }

    std::filesystem::path path_;
    std::unique_ptr<MatrixStore> store_;
};

/// Comma-separated rows, one per line, as a client would type them.
std::string matrix_text(const DenseMatrix& a)
{
    std::string text;
    for (const auto& row : to_mr_records(a))
        text += row + "\n";
    return text;
}

void require_samples(const Options& options)
{
    if (options.samples < 5)
        throw Error(ErrorCode::BadRequest, "at least 5 samples are required");
}

} // namespace

const char* experiment_name(Experiment e)
{
    switch (e) {
    case Experiment::SearchFormat: return "SearchFormat";
    case Experiment::Representation: return "Representation";
    case Experiment::HitMiss: return "HitMiss";
    case Experiment::FundamentalOps: return "FundamentalOps";
    case Experiment::ConcurrentClients: return "ConcurrentClients";
    }
    return "";
}

Shape parse_shape(const std::string& text)
{
    const Dimension d = parse_dimension(text);
    return {d.rows, d.cols};
}

std::string shape_text(Shape s)
{
    return dimension_string(s.rows, s.cols);
}

const Measurement* BenchReport::find(const std::string& label) const
{
    for (const auto& m : measurements)
        if (m.label == label)
            return &m;
    return nullptr;
}

std::string BenchReport::to_json() const
{
    nlohmann::json j;
    j["experiment"] = experiment_name(experiment);
    j["parameters"] = parameters;
    j["samples"] = samples;
    j["seed"] = seed;
    j["measurements"] = nlohmann::json::array();
    for (const auto& m : measurements)
        j["measurements"].push_back({{"label", m.label},
                                     {"parameters", m.parameters},
                                     {"median_ms", m.median_ms},
                                     {"min_ms", m.min_ms},
                                     {"samples", m.samples}});
    j["ratios"] = ratios;
    if (results_identical)
        j["results_identical"] = *results_identical;
    j["notes"] = notes;
    return j.dump(2);
}

TimingStats summarize(std::vector<double> samples_ms)
{
    if (samples_ms.empty())
        return {};
    std::sort(samples_ms.begin(), samples_ms.end());
    const std::size_t n = samples_ms.size();
    const double median = n % 2 ? samples_ms[n / 2] : 0.5 * (samples_ms[n / 2 - 1] + samples_ms[n / 2]);
    return {median, samples_ms.front(), n};
}

TimingStats time_it(std::size_t samples, const std::function<void()>& fn)
{
    fn(); // warm-up
    std::vector<double> times;
    times.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const auto start = Clock::now();
        fn();
        times.push_back(ms_since(start));
    }
    return summarize(std::move(times));
}

DenseMatrix random_matrix(Shape shape, std::mt19937_64& rng, Backend backend)
{
    std::uniform_real_distribution<double> dist(-10.0, 10.0);
    DenseMatrix out(shape.rows, shape.cols, backend);
    for (std::size_t i = 0; i < shape.rows; ++i)
        for (double& v : out.row(i))
            v = dist(rng);
    return out;
}

DenseMatrix random_spd(std::size_t n, std::mt19937_64& rng, Backend backend)
{
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    DenseMatrix b(n, n, backend);
    for (std::size_t i = 0; i < n; ++i)
        for (double& v : b.row(i))
            v = dist(rng);
    DenseMatrix s = multiply(transpose(b), b);
    for (std::size_t i = 0; i < n; ++i)
        s(i, i) += static_cast<double>(n);
    // Symmetrize exactly; the product is symmetric only up to rounding.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            s(j, i) = s(i, j);
    return s;
}

BenchReport bench_search(const std::vector<Layout>& layouts, std::size_t count, Shape shape, const Options& options)
{
    require_samples(options);
    if (count == 0)
        throw Error(ErrorCode::BadRequest, "need at least one stored matrix");
    BenchReport report;
    report.experiment = Experiment::SearchFormat;
    report.samples = options.samples;
    report.seed = options.seed;
    report.parameters = {{"count", std::to_string(count)}, {"size", shape_text(shape)}, {"search", "full-scan"}};

    for (Layout layout : layouts) {
        std::mt19937_64 rng(options.seed);
        ScratchStore store(layout, SearchMode::FullScan);
        std::optional<DenseMatrix> last;
        {
            MatrixStore::Batch batch(*store);
            for (std::size_t i = 0; i < count; ++i) {
                last = random_matrix(shape, rng);
                store->insert_matrix(*last);
            }
        }
        std::optional<std::int64_t> found;
        const TimingStats t = time_it(options.samples, [&] { found = store->find_matrix(*last); });
        if (!found)
            throw Error(ErrorCode::StoreUnavailable, "benchmark matrix was not found");
        report.measurements.push_back({layout_name(layout),
                                       {{"layout", layout_name(layout)}, {"stored", std::to_string(count)}},
                                       t.median_ms,
                                       t.min_ms,
                                       t.samples});
    }
    const Measurement* r = report.find("R");
    const Measurement* mr = report.find("mR");
    if (r && mr && r->median_ms > 0)
        report.ratios["mR/R"] = mr->median_ms / r->median_ms;
    return report;
}

std::vector<std::pair<std::string, Shape>> representation_sizes()
{
    // Test-family rows keep their label; the A family is (n+1) x n like the
    // built-in A_10_11, the F and S families are n x n.
    return {{"A_30_3", {31, 30}}, {"A_50_4", {51, 50}}, {"F_15_2", {15, 15}}, {"F_30_3", {30, 30}},
            {"F_50_4", {50, 50}}, {"S_50_4", {50, 50}}, {"S_80_5", {80, 80}}, {"50x50", {50, 50}},
            {"15x15", {15, 15}},  {"50x35", {50, 35}},  {"45x70", {45, 70}},  {"60x60", {60, 60}}};
}

BenchReport bench_pinv_representation(const std::vector<Shape>& sizes, const std::vector<Backend>& backends,
                                      const Options& options)
{
    require_samples(options);
    if (sizes.empty() || backends.empty())
        throw Error(ErrorCode::BadRequest, "sizes and backends must be non-empty");
    BenchReport report;
    report.experiment = Experiment::Representation;
    report.samples = options.samples;
    report.seed = options.seed;
    report.parameters = {{"operation", "A(MN)"}};
    report.notes.push_back("operands are seeded random matrices with entries uniform in [-10, 10]; "
                           "weights are B^T B + n I");
    bool identical = true;
    std::mt19937_64 rng(options.seed);
    for (const Shape& shape : sizes) {
        const DenseMatrix a = random_matrix(shape, rng);
        const DenseMatrix m = random_spd(shape.rows, rng);
        const DenseMatrix n = random_spd(shape.cols, rng);
        std::optional<DenseMatrix> reference;
        for (Backend backend : backends) {
            const DenseMatrix ab = a.with_backend(backend);
            const WeightPair w{m.with_backend(backend), n.with_backend(backend)};
            std::optional<DenseMatrix> x;
            const TimingStats t = time_it(options.samples, [&] { x = weighted_pinv(ab, w); });
            if (!reference)
                reference = x;
            else if (!bit_identical(*reference, *x))
                identical = false;
            report.measurements.push_back({shape_text(shape) + "/" + backend_name(backend),
                                           {{"size", shape_text(shape)}, {"backend", backend_name(backend)}},
                                           t.median_ms,
                                           t.min_ms,
                                           t.samples});
        }
        const Measurement* flat = report.find(shape_text(shape) + "/flat");
        const Measurement* nested = report.find(shape_text(shape) + "/nested");
        if (flat && nested && flat->median_ms > 0)
            report.ratios[shape_text(shape) + " nested/flat"] = nested->median_ms / flat->median_ms;
    }
    report.results_identical = identical;
    return report;
}

BenchReport bench_hit_miss(Shape shape, MatrixStore& store, std::size_t populate, const Options& options)
{
    require_samples(options);
    BenchReport report;
    report.experiment = Experiment::HitMiss;
    report.samples = options.samples;
    report.seed = options.seed;
    report.parameters = {{"size", shape_text(shape)}, {"operation", "A(MN)"}, {"populated", std::to_string(populate)}};

    std::mt19937_64 rng(options.seed);
    if (populate > 0) {
        MatrixStore::Batch batch(store);
        for (std::size_t i = 0; i < populate; ++i) {
            const DenseMatrix filler = random_matrix({3, 3}, rng);
            if (!store.find_matrix(filler))
                store.insert_matrix(filler);
        }
    }

    ComputePipeline pipeline(store);
    const DenseMatrix m = random_spd(shape.rows, rng);
    const DenseMatrix n = random_spd(shape.cols, rng);
    // One fresh operand A per sample (plus warm-up), so every miss computes.
    std::vector<OperationRequest> requests;
    for (std::size_t i = 0; i <= options.samples; ++i) {
        OperationRequest req;
        req.operation = OpCode::WeightedPinv;
        req.operands = {random_matrix(shape, rng), m, n};
        requests.push_back(std::move(req));
    }

    std::vector<double> miss_ms;
    std::vector<double> hit_ms;
    bool all_hits = true;
    bool identical = true;
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const ComputeResponse miss = pipeline.execute(requests[i]);
        const ComputeResponse hit = pipeline.execute(requests[i]);
        if (miss.cache_hit || !hit.cache_hit)
            all_hits = false;
        if (!bit_identical(miss.elements, hit.elements))
            identical = false;
        if (i == 0)
            continue; // warm-up
        miss_ms.push_back(std::chrono::duration<double, std::milli>(miss.elapsed).count());
        hit_ms.push_back(std::chrono::duration<double, std::milli>(hit.elapsed).count());
    }
    const TimingStats miss = summarize(miss_ms);
    const TimingStats hit = summarize(hit_ms);
    report.measurements.push_back({"miss", {{"cache_hit", "false"}}, miss.median_ms, miss.min_ms, miss.samples});
    report.measurements.push_back({"hit", {{"cache_hit", "true"}}, hit.median_ms, hit.min_ms, hit.samples});
    if (hit.median_ms > 0)
        report.ratios["miss/hit"] = miss.median_ms / hit.median_ms;
    report.results_identical = identical;
    if (!all_hits)
        report.notes.push_back("a repeated request was not answered from the store");
    report.parameters["hits_flagged"] = all_hits ? "true" : "false";
    return report;
}

const char* fundamental_name(FundamentalOp op)
{
    switch (op) {
    case FundamentalOp::Multiply: return "multiply";
    case FundamentalOp::Add: return "add";
    case FundamentalOp::Subtract: return "subtract";
    }
    return "";
}

std::vector<OperandShapes> fundamental_sizes(FundamentalOp op)
{
    auto sq = [](std::size_t n) { return OperandShapes{{n, n}, {n, n}}; };
    switch (op) {
    case FundamentalOp::Multiply:
        return {sq(3), sq(5), sq(10), {{20, 50}, {50, 50}}, {{45, 45}, {45, 70}}, {{80, 80}, {80, 60}},
                {{80, 70}, {70, 70}}, sq(81)};
    case FundamentalOp::Add:
        return {sq(3), sq(5), sq(10), sq(50), sq(60), sq(70), sq(80)};
    case FundamentalOp::Subtract:
        return {sq(3), sq(5), sq(10), sq(50), sq(60), sq(70), sq(81)};
    }
    return {};
}

BenchReport bench_fundamental(const std::vector<FundamentalOp>& ops, const std::vector<OperandShapes>& sizes,
                              const std::vector<Backend>& backends, const Options& options)
{
    require_samples(options);
    BenchReport report;
    report.experiment = Experiment::FundamentalOps;
    report.samples = options.samples;
    report.seed = options.seed;
    bool identical = true;
    std::mt19937_64 rng(options.seed);
    for (FundamentalOp op : ops) {
        for (const OperandShapes& pair : sizes) {
            const DenseMatrix a = random_matrix(pair.left, rng);
            const DenseMatrix b = random_matrix(pair.right, rng);
            std::optional<DenseMatrix> reference;
            for (Backend backend : backends) {
                const DenseMatrix ab = a.with_backend(backend);
                const DenseMatrix bb = b.with_backend(backend);
                std::optional<DenseMatrix> out;
                const TimingStats t = time_it(options.samples, [&] {
                    switch (op) {
                    case FundamentalOp::Multiply: out = multiply(ab, bb); break;
                    case FundamentalOp::Add: out = add(ab, bb); break;
                    case FundamentalOp::Subtract: out = subtract(ab, bb); break;
                    }
                });
                if (!reference)
                    reference = out;
                else if (!bit_identical(*reference, *out))
                    identical = false;
                const std::string label = std::string(fundamental_name(op)) + " " + shape_text(pair.left) + "," +
                                          shape_text(pair.right) + "/" + backend_name(backend);
                report.measurements.push_back({label,
                                               {{"operation", fundamental_name(op)},
                                                {"left", shape_text(pair.left)},
                                                {"right", shape_text(pair.right)},
                                                {"backend", backend_name(backend)}},
                                               t.median_ms,
                                               t.min_ms,
                                               t.samples});
            }
        }
    }
    report.results_identical = identical;
    return report;
}

BenchReport bench_concurrent_clients(Shape shape, std::size_t clients, std::size_t requests_per_client,
                                     const Options& options)
{
    BenchReport report;
    report.experiment = Experiment::ConcurrentClients;
    report.seed = options.seed;
    report.samples = clients * requests_per_client;
    report.parameters = {{"size", shape_text(shape)},
                         {"clients", std::to_string(clients)},
                         {"requests_per_client", std::to_string(requests_per_client)}};

    ScratchStore store(Layout::R, SearchMode::Indexed);
    ComputePipeline pipeline(*store);
    Service service(pipeline);
    const int port = service.bind_any_port("127.0.0.1");
    std::thread server([&] { service.listen_after_bind(); });
    service.wait_until_ready();

    std::mt19937_64 rng(options.seed);
    const DenseMatrix a = random_matrix(shape, rng);
    const nlohmann::json body{{"operation", "A(MN)"},
                              {"operands",
                               {{{"text", matrix_text(a)}},
                                {{"text", matrix_text(random_spd(shape.rows, rng))}},
                                {{"text", matrix_text(random_spd(shape.cols, rng))}}}}};
    const std::string payload = body.dump();

    std::mutex mu;
    std::vector<double> latencies;
    std::set<std::string> payloads;
    std::size_t failures = 0;
    std::vector<std::thread> threads;
    for (std::size_t c = 0; c < clients; ++c) {
        threads.emplace_back([&] {
            httplib::Client client("127.0.0.1", port);
            for (std::size_t i = 0; i < requests_per_client; ++i) {
                const auto start = Clock::now();
                auto res = client.Post("/compute", payload, "application/json");
                const double elapsed = ms_since(start);
                std::lock_guard lock(mu);
                if (!res || res->status != 200) {
                    ++failures;
                    continue;
                }
                latencies.push_back(elapsed);
                payloads.insert(nlohmann::json::parse(res->body)["elements"].get<std::string>());
            }
        });
    }
    for (auto& t : threads)
        t.join();
    service.stop();
    server.join();

    const TimingStats t = summarize(latencies);
    report.measurements.push_back({"request", {{"transport", "http"}}, t.median_ms, t.min_ms, t.samples});
    report.results_identical = payloads.size() <= 1;
    report.parameters["failures"] = std::to_string(failures);
    return report;
}

} // namespace pinv::bench
