// pinvctl: command-line front end for the matrix store, compute pipeline,
// HTTP service and benchmarks.

#include "pinv/bench.hpp"
#include "pinv/error.hpp"
#include "pinv/format.hpp"
#include "pinv/pipeline.hpp"
#include "pinv/service.hpp"
#include "pinv/store.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace pinv;

std::string store_path(const std::string& flag)
{
    if (const char* env = std::getenv("PINV_STORE"); env && *env)
        return env;
    if (flag.empty())
        throw Error(ErrorCode::BadRequest, "no store given (use --store or PINV_STORE)");
    return flag;
}

Operand parse_operand(const std::string& spec)
{
    if (spec.rfind("test:", 0) == 0)
        return TestName{spec.substr(5)};
    std::int64_t id = 0;
    auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), id);
    if (ec == std::errc() && ptr == spec.data() + spec.size())
        return StoredId{id};
    std::ifstream in(spec, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::BadRequest, "cannot read matrix file '" + spec + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    if (buf.str().empty())
        throw Error(ErrorCode::EmptyUpload, spec + " is empty.");
    return parse_matrix_text(buf.str());
}

std::vector<Backend> backends_from(const std::string& text)
{
    if (text == "flat")
        return {Backend::Flat};
    if (text == "nested")
        return {Backend::Nested};
    if (text == "both")
        return {Backend::Flat, Backend::Nested};
    throw Error(ErrorCode::BadRequest, "backend must be flat, nested or both");
}

std::vector<Layout> layouts_from(const std::string& text)
{
    if (text == "both")
        return {Layout::R, Layout::mR};
    return {parse_layout(text)};
}

void print_report(const bench::BenchReport& report, const std::string& json_path)
{
    std::cout << bench::experiment_name(report.experiment) << " (seed " << report.seed << ", " << report.samples
              << " samples)\n";
    for (const auto& m : report.measurements)
        std::cout << "  " << m.label << ": median " << m.median_ms << " ms, min " << m.min_ms << " ms\n";
    for (const auto& [name, value] : report.ratios)
        std::cout << "  ratio " << name << ": " << value << "\n";
    if (report.results_identical)
        std::cout << "  results identical: " << (*report.results_identical ? "yes" : "NO") << "\n";
    for (const auto& note : report.notes)
        std::cout << "  note: " << note << "\n";
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        out << report.to_json() << "\n";
        if (!out)
            throw Error(ErrorCode::BadRequest, "cannot write " + json_path);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weighted Moore-Penrose inverse engine with a persistent result store"};
    app.require_subcommand(1);

    std::string store_flag;
    std::string layout_text = "R";

    // compute
    auto* compute = app.add_subcommand("compute", "Compute an operation, answering from the store when possible");
    std::string op_text;
    std::string a_spec, b_spec, c_spec;
    double r = 0, s = 0;
    std::int64_t p = 0, q = 0;
    bool as_json = false;
    compute->add_option("--op", op_text, "Operation code, e.g. A(MN) or r*A+s*B")->required();
    compute->add_option("--a", a_spec, "Operand A: file, stored id or test:NAME")->required();
    compute->add_option("--b", b_spec, "Operand B (or M for A(MN))");
    compute->add_option("--c", c_spec, "Operand C (N for A(MN))");
    compute->add_option("--r", r);
    compute->add_option("--s", s);
    compute->add_option("--p", p);
    compute->add_option("--q", q);
    compute->add_option("--store", store_flag, "Store file");
    compute->add_option("--layout", layout_text, "Layout for a new store: R or mR");
    compute->add_flag("--json", as_json, "Print the full response as JSON");

    // upload
    auto* upload = app.add_subcommand("upload", "Store a matrix text file and print its id");
    std::string upload_file;
    upload->add_option("file", upload_file)->required();
    upload->add_option("--store", store_flag);
    upload->add_option("--layout", layout_text);

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP JSON service");
    int port = 8080;
    std::string host = "0.0.0.0";
    serve->add_option("--store", store_flag);
    serve->add_option("--port", port);
    serve->add_option("--host", host);
    serve->add_option("--layout", layout_text);

    // export / import
    std::string dump_dir;
    auto* exp = app.add_subcommand("export", "Dump the store as matrices_in.tsv and matrices_out.tsv");
    exp->add_option("--store", store_flag);
    exp->add_option("--out", dump_dir)->required();
    auto* imp = app.add_subcommand("import", "Load a dump written by export");
    imp->add_option("--store", store_flag);
    imp->add_option("--out,--in", dump_dir, "Directory holding the dump")->required();
    imp->add_option("--layout", layout_text);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark experiment");
    bench_cmd->require_subcommand(1);
    std::string size_text = "70x70";
    std::size_t count = 1000;
    bench::Options options;
    std::string json_out;
    std::string backend_text = "both";
    std::string bench_layouts = "both";
    std::size_t populate = 0;
    std::size_t clients = 0;
    std::string fundamental_op = "all";
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", options.seed);
        cmd->add_option("--samples", options.samples, "Kept repetitions (>= 5)");
        cmd->add_option("--json", json_out, "Write the report as JSON");
    };
    auto* b_search = bench_cmd->add_subcommand("search", "Full-scan search latency, R vs mR layout");
    b_search->add_option("--layout", bench_layouts, "R, mR or both");
    b_search->add_option("--size", size_text);
    b_search->add_option("--count", count);
    add_common(b_search);
    auto* b_pinv = bench_cmd->add_subcommand("pinv", "A(MN) latency per backend");
    b_pinv->add_option("--backend", backend_text, "flat, nested or both");
    b_pinv->add_option("--size", size_text, "MxN; default runs the full size table");
    add_common(b_pinv);
    auto* b_hit = bench_cmd->add_subcommand("hitmiss", "Stored-result hit against recompute");
    b_hit->add_option("--size", size_text);
    b_hit->add_option("--count", populate, "Random matrices stored before measuring");
    b_hit->add_option("--store", store_flag, "Store file (default: temporary)");
    b_hit->add_option("--clients", clients, "Also simulate N concurrent HTTP clients");
    add_common(b_hit);
    auto* b_fund = bench_cmd->add_subcommand("fundamental", "Multiply/add/subtract per backend");
    b_fund->add_option("--backend", backend_text);
    b_fund->add_option("--op", fundamental_op, "multiply, add, subtract or all");
    b_fund->add_option("--size", size_text, "MxN for square add/subtract; default runs the size table");
    add_common(b_fund);

    bool size_given = false;
    try {
        app.parse(argc, argv);
        size_given = b_pinv->count("--size") + b_fund->count("--size") > 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const StoreOptions store_options{parse_layout(layout_text)};
        if (*compute) {
            MatrixStore store(store_path(store_flag), store_options);
            ComputePipeline pipeline(store);
            OperationRequest req;
            req.operation = parse_op_code(op_text);
            for (const auto* spec : {&a_spec, &b_spec, &c_spec})
                if (!spec->empty())
                    req.operands.push_back(parse_operand(*spec));
            req.r = r;
            req.s = s;
            req.p = p;
            req.q = q;
            const ComputeResponse out = pipeline.execute(req);
            if (as_json) {
                nlohmann::json j{{"result_id", out.result_id},
                                 {"cache_hit", out.cache_hit},
                                 {"elapsed_ms", std::chrono::duration<double, std::milli>(out.elapsed).count()},
                                 {"elements", to_r_string(out.elements)},
                                 {"dimension", dimension_string(out.elements.rows(), out.elements.cols())},
                                 {"display", render_result(out.elements)},
                                 {"operand_ids", out.operand_ids},
                                 {"non_integer_coefficients", out.non_integer_coefficients}};
                std::cout << j.dump(2) << "\n";
            } else {
                for (const auto& row : render_result(out.elements)) {
                    for (std::size_t j = 0; j < row.size(); ++j)
                        std::cout << (j ? " " : "") << row[j];
                    std::cout << "\n";
                }
            }
        } else if (*upload) {
            MatrixStore store(store_path(store_flag), store_options);
            ComputePipeline pipeline(store);
            std::ifstream in(upload_file, std::ios::binary);
            if (!in)
                throw Error(ErrorCode::BadRequest, "cannot read '" + upload_file + "'");
            std::stringstream buf;
            buf << in.rdbuf();
            std::cout << pipeline.ingest_upload(buf.str(), upload_file) << "\n";
        } else if (*serve) {
            MatrixStore store(store_path(store_flag), store_options);
            ComputePipeline pipeline(store);
            Service service(pipeline);
            std::cerr << "listening on " << host << ":" << port << "\n";
            if (!service.listen(host, port))
                throw Error(ErrorCode::StoreUnavailable, "cannot listen on port " + std::to_string(port));
        } else if (*exp) {
            MatrixStore store(store_path(store_flag), store_options);
            store.export_to(dump_dir);
        } else if (*imp) {
            MatrixStore store(store_path(store_flag), store_options);
            store.import_from(dump_dir);
        } else if (*b_search) {
            print_report(bench::bench_search(layouts_from(bench_layouts), count, bench::parse_shape(size_text), options),
                         json_out);
        } else if (*b_pinv) {
            std::vector<bench::Shape> sizes;
            if (size_given)
                sizes.push_back(bench::parse_shape(size_text));
            else
                for (const auto& [label, shape] : bench::representation_sizes())
                    sizes.push_back(shape);
            auto report = bench::bench_pinv_representation(sizes, backends_from(backend_text), options);
            if (!size_given)
                report.notes.push_back("test-family rows use seeded random matrices of the same dimensions");
            print_report(report, json_out);
        } else if (*b_hit) {
            const auto shape = bench::parse_shape(size_text);
            if (!store_flag.empty() || std::getenv("PINV_STORE")) {
                MatrixStore store(store_path(store_flag));
                print_report(bench::bench_hit_miss(shape, store, populate, options), json_out);
            } else {
                MatrixStore store(":memory:");
                print_report(bench::bench_hit_miss(shape, store, populate, options), json_out);
            }
            if (clients > 0)
                print_report(bench::bench_concurrent_clients(shape, clients, options.samples, options), "");
        } else if (*b_fund) {
            std::vector<bench::FundamentalOp> ops;
            if (fundamental_op == "all" || fundamental_op == "multiply")
                ops.push_back(bench::FundamentalOp::Multiply);
            if (fundamental_op == "all" || fundamental_op == "add")
                ops.push_back(bench::FundamentalOp::Add);
            if (fundamental_op == "all" || fundamental_op == "subtract")
                ops.push_back(bench::FundamentalOp::Subtract);
            if (ops.empty())
                throw Error(ErrorCode::BadRequest, "unknown --op '" + fundamental_op + "'");
            bench::BenchReport merged;
            for (auto op : ops) {
                std::vector<bench::OperandShapes> sizes;
                if (size_given) {
                    const auto shape = bench::parse_shape(size_text);
                    sizes.push_back({shape, op == bench::FundamentalOp::Multiply
                                                ? bench::Shape{shape.cols, shape.cols}
                                                : shape});
                } else {
                    sizes = bench::fundamental_sizes(op);
                }
                auto report = bench::bench_fundamental({op}, sizes, backends_from(backend_text), options);
                if (merged.measurements.empty())
                    merged = report;
                else {
                    merged.measurements.insert(merged.measurements.end(), report.measurements.begin(),
                                               report.measurements.end());
                    merged.results_identical = *merged.results_identical && *report.results_identical;
                }
            }
            print_report(merged, json_out);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.name() << ": " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
