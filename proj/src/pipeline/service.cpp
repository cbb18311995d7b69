#include "pinv/service.hpp"

#include "pinv/error.hpp"
#include "pinv/format.hpp"

#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <chrono>

using nlohmann::json;

namespace pinv {

namespace {

HttpReply reply(int status, const json& body)
{
    return {status, body.dump()};
}

HttpReply error_reply(ErrorCode code, std::string_view detail)
{
    return reply(400, json{{"error", std::string(code_name(code))}, {"detail", std::string(detail)}});
}

std::vector<std::size_t> index_vector(const json& j, const char* field)
{
    if (!j.contains(field) || !j[field].is_array())
        throw Error(ErrorCode::BadRequest, std::string("coo.") + field + " must be an array");
    std::vector<std::size_t> out;
    for (const auto& v : j[field]) {
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw Error(ErrorCode::BadRequest, std::string("coo.") + field + " holds a non-index value");
        out.push_back(v.get<std::size_t>());
    }
    return out;
}

SparseCoo coo_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("values") ||
        !j["rows"].is_number_unsigned() || !j["cols"].is_number_unsigned() || !j["values"].is_array())
        throw Error(ErrorCode::BadRequest, "coo needs rows, cols, row_idx, col_idx and values");
    std::vector<double> values;
    for (const auto& v : j["values"]) {
        if (!v.is_number())
            throw Error(ErrorCode::BadRequest, "coo.values holds a non-number");
        values.push_back(v.get<double>());
    }
    return SparseCoo::from_triplets(j["rows"].get<std::size_t>(), j["cols"].get<std::size_t>(),
                                    index_vector(j, "row_idx"), index_vector(j, "col_idx"), std::move(values));
}

Operand operand_from_json(const json& j)
{
    if (j.is_number_integer())
        return StoredId{j.get<std::int64_t>()};
    if (j.is_object()) {
        if (j.contains("id") && j["id"].is_number_integer())
            return StoredId{j["id"].get<std::int64_t>()};
        if (j.contains("text") && j["text"].is_string())
            return parse_matrix_text(j["text"].get<std::string>());
        if (j.contains("test") && j["test"].is_string())
            return TestName{j["test"].get<std::string>()};
        if (j.contains("coo"))
            return coo_from_json(j["coo"]);
    }
    throw Error(ErrorCode::BadRequest, "operand must be an id, {\"text\"}, {\"test\"} or {\"coo\"}");
}

template <typename T>
T number_field(const json& body, const char* name)
{
    if (!body.contains(name) || body[name].is_null())
        return T{};
    const auto& v = body[name];
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer())
            throw Error(ErrorCode::BadRequest, std::string(name) + " must be an integer");
    } else {
        if (!v.is_number())
            throw Error(ErrorCode::BadRequest, std::string(name) + " must be a number");
    }
    return v.get<T>();
}

json record_json(const MatrixRecord& rec, const MatrixStore& store)
{
    json out{{"id", rec.id}, {"dimension", rec.dimension}, {"test", rec.test}, {"sparse", rec.sparse}};
    if (rec.sparse == 0) {
        out["elements"] = rec.elements_in;
    } else {
        out["elements"] = to_r_string(store.load_matrix(rec.id));
        out["coo"] = {{"row_idx", rec.elements_in},
                      {"col_idx", store.matrix_record(rec.id + 1).elements_in},
                      {"values", store.matrix_record(rec.id + 2).elements_in}};
    }
    return out;
}

json result_json(const ResultRecord& r)
{
    return json{{"id", r.id},
                {"elements_out", r.elements_out},
                {"operation", r.operation},
                {"matrix_I", r.matrix_i},
                {"matrix_II", r.matrix_ii},
                {"matrix_III", r.matrix_iii},
                {"r", r.r},
                {"s", r.s},
                {"p", r.p},
                {"q", r.q},
                {"dimension", r.dimension}};
}

std::optional<std::int64_t> trailing_id(std::string_view path, std::string_view prefix)
{
    if (path.substr(0, prefix.size()) != prefix)
        return std::nullopt;
    const std::string_view rest = path.substr(prefix.size());
    std::int64_t id = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), id);
    if (rest.empty() || ec != std::errc() || ptr != rest.data() + rest.size())
        return std::nullopt;
    return id;
}

json parse_body(std::string_view body)
{
    json j = json::parse(body.begin(), body.end(), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw Error(ErrorCode::BadRequest, "body must be a JSON object");
    return j;
}

} // namespace

Service::Service(ComputePipeline& pipeline)
    : pipeline_(pipeline), server_(std::make_unique<httplib::Server>())
{
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
        const HttpReply r = handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    server_->Post(R"(/.*)", route);
    server_->Get(R"(/.*)", route);
}

Service::~Service() = default;

HttpReply Service::handle(std::string_view method, std::string_view path, std::string_view body) const
{
    try {
        if (method == "POST" && path == "/matrices") {
            const json j = parse_body(body);
            std::int64_t id = 0;
            if (j.contains("text") && j["text"].is_string())
                id = pipeline_.resolve(parse_matrix_text(j["text"].get<std::string>()));
            else if (j.contains("coo"))
                id = pipeline_.resolve(coo_from_json(j["coo"]));
            else if (j.contains("test") && j["test"].is_string())
                id = pipeline_.resolve(TestName{j["test"].get<std::string>()});
            else
                throw Error(ErrorCode::BadRequest, "expected one of text, coo or test");
            return reply(201, json{{"id", id}});
        }
        if (method == "POST" && path == "/matrices/upload") {
            return reply(201, json{{"id", pipeline_.ingest_upload(body)}});
        }
        if (method == "GET") {
            if (const auto id = trailing_id(path, "/matrices/"))
                return reply(200, record_json(pipeline_.store().matrix_record(*id), pipeline_.store()));
            if (const auto id = trailing_id(path, "/results/"))
                return reply(200, result_json(pipeline_.store().result_record(*id)));
        }
        if (method == "POST" && path == "/compute") {
            const json j = parse_body(body);
            if (!j.contains("operation") || !j["operation"].is_string())
                throw Error(ErrorCode::BadRequest, "operation is required");
            if (!j.contains("operands") || !j["operands"].is_array())
                throw Error(ErrorCode::BadRequest, "operands must be an array");
            OperationRequest req;
            req.operation = parse_op_code(j["operation"].get<std::string>());
            for (const auto& op : j["operands"])
                req.operands.push_back(operand_from_json(op));
            req.r = number_field<double>(j, "r");
            req.s = number_field<double>(j, "s");
            req.p = number_field<std::int64_t>(j, "p");
            req.q = number_field<std::int64_t>(j, "q");

            const ComputeResponse out = pipeline_.execute(req);
            json display = render_result(out.elements);
            return reply(200, json{{"result_id", out.result_id},
                                   {"cache_hit", out.cache_hit},
                                   {"elapsed_ms", std::chrono::duration<double, std::milli>(out.elapsed).count()},
                                   {"elements", to_r_string(out.elements)},
                                   {"dimension", dimension_string(out.elements.rows(), out.elements.cols())},
                                   {"display", display},
                                   {"operand_ids", out.operand_ids},
                                   {"non_integer_coefficients", out.non_integer_coefficients}});
        }
        return reply(404, json{{"error", "NotFound"}, {"detail", std::string(method) + " " + std::string(path)}});
    } catch (const Error& e) {
        return error_reply(e.code(), e.what());
    } catch (const json::exception& e) {
        return error_reply(ErrorCode::BadRequest, e.what());
    } catch (const std::exception& e) {
        return reply(500, json{{"error", "Internal"}, {"detail", e.what()}});
    }
}

bool Service::listen(const std::string& host, int port)
{
    return server_->listen(host, port);
}

int Service::bind_any_port(const std::string& host)
{
    return server_->bind_to_any_port(host);
}

bool Service::listen_after_bind()
{
    return server_->listen_after_bind();
}

void Service::stop()
{
    server_->stop();
}

void Service::wait_until_ready() const
{
    server_->wait_until_ready();
}

} // namespace pinv
