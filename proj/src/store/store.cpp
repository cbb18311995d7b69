#include "pinv/store.hpp"

#include "pinv/error.hpp"
#include "pinv/format.hpp"

#include <sqlite3.h>

#include <algorithm>
#include <exception>
#include <fstream>
#include <sstream>

namespace pinv {

namespace {

const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS meta (
    key   TEXT PRIMARY KEY,
    value TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS matrices_in (
    id          INTEGER PRIMARY KEY AUTOINCREMENT,
    elements_in TEXT    NOT NULL,
    dimension   TEXT    NOT NULL,
    test        TEXT    NOT NULL DEFAULT '',
    sparse      INTEGER NOT NULL DEFAULT 0,
    digest      INTEGER NOT NULL
);
CREATE INDEX IF NOT EXISTS matrices_in_lookup ON matrices_in (dimension, sparse, digest);
CREATE INDEX IF NOT EXISTS matrices_in_test ON matrices_in (test);
CREATE TABLE IF NOT EXISTS matrix_rows (
    matrix_id INTEGER NOT NULL,
    row_index INTEGER NOT NULL,
    elements  TEXT    NOT NULL,
    PRIMARY KEY (matrix_id, row_index)
) WITHOUT ROWID;
CREATE TABLE IF NOT EXISTS matrices_out (
    id           INTEGER PRIMARY KEY AUTOINCREMENT,
    elements_out TEXT    NOT NULL,
    operation    TEXT    NOT NULL,
    matrix_i     INTEGER NOT NULL DEFAULT 0,
    matrix_ii    INTEGER NOT NULL DEFAULT 0,
    matrix_iii   INTEGER NOT NULL DEFAULT 0,
    r            TEXT    NOT NULL DEFAULT '0',
    s            TEXT    NOT NULL DEFAULT '0',
    p            INTEGER NOT NULL DEFAULT 0,
    q            INTEGER NOT NULL DEFAULT 0,
    dimension    TEXT    NOT NULL,
    UNIQUE (operation, matrix_i, matrix_ii, matrix_iii, r, s, p, q)
);
)sql";

// FNV-1a, 64 bit. Only narrows candidates; equality is always confirmed on
// the full text.
std::int64_t digest(std::string_view text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return static_cast<std::int64_t>(h);
}

class Statement {
public:
    Statement(sqlite3* db, const char* sql)
        : db_(db)
    {
        if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
            throw Error(ErrorCode::StoreUnavailable, std::string("prepare failed: ") + sqlite3_errmsg(db));
    }
    ~Statement() { sqlite3_finalize(stmt_); }
    Statement(const Statement&) = delete;
    Statement& operator=(const Statement&) = delete;

    Statement& bind(int i, std::int64_t v)
    {
        check(sqlite3_bind_int64(stmt_, i, v));
        return *this;
    }
    Statement& bind(int i, std::string_view v)
    {
        // a null pointer would bind SQL NULL, not the empty string
        const char* data = v.data() ? v.data() : "";
        check(sqlite3_bind_text64(stmt_, i, data, v.size(), SQLITE_TRANSIENT, SQLITE_UTF8));
        return *this;
    }

    /// True while a row is available.
    bool step()
    {
        const int rc = sqlite3_step(stmt_);
        if (rc == SQLITE_ROW)
            return true;
        if (rc == SQLITE_DONE)
            return false;
        last_error_ = rc;
        if ((rc & 0xff) == SQLITE_CONSTRAINT)
            throw ConstraintError(sqlite3_errmsg(db_));
        throw Error(ErrorCode::StoreUnavailable, std::string("query failed: ") + sqlite3_errmsg(db_));
    }

    void reset()
    {
        sqlite3_reset(stmt_);
        sqlite3_clear_bindings(stmt_);
    }

    std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }
    std::string text(int col) const
    {
        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
        return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
    }
    std::string_view text_view(int col) const
    {
        const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
        return p ? std::string_view(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col)))
                 : std::string_view();
    }

    struct ConstraintError : Error {
        explicit ConstraintError(const char* msg)
            : Error(ErrorCode::StoreUnavailable, std::string("constraint failed: ") + msg) {}
    };

private:
    void check(int rc)
    {
        if (rc != SQLITE_OK)
            throw Error(ErrorCode::StoreUnavailable, std::string("bind failed: ") + sqlite3_errmsg(db_));
    }

    sqlite3* db_;
    sqlite3_stmt* stmt_ = nullptr;
    int last_error_ = 0;
};

void exec(sqlite3* db, const char* sql)
{
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
        std::string msg = err ? err : "unknown error";
        sqlite3_free(err);
        throw Error(ErrorCode::StoreUnavailable, "store statement failed: " + msg);
    }
}

void reject_control(std::string_view text, const char* what)
{
    if (text.find_first_of("\t\n\r") != std::string_view::npos)
        throw Error(ErrorCode::BadRequest, std::string(what) + " must not contain tabs or newlines");
}

} // namespace

const char* layout_name(Layout layout)
{
    return layout == Layout::R ? "R" : "mR";
}

Layout parse_layout(std::string_view text)
{
    if (text == "R" || text == "r")
        return Layout::R;
    if (text == "mR" || text == "mr" || text == "MR")
        return Layout::mR;
    throw Error(ErrorCode::BadRequest, "unknown layout '" + std::string(text) + "'");
}

const std::vector<std::string>& operation_codes()
{
    static const std::vector<std::string> codes{"A(-1)", "A(+)",  "A(MN)",   "A+B", "A-B",
                                                "A*B",   "r*A+s*B", "A^p*B^q", "r*A"};
    return codes;
}

bool is_operation_code(std::string_view code)
{
    const auto& codes = operation_codes();
    return std::find(codes.begin(), codes.end(), code) != codes.end();
}

std::string coefficient_text(double value)
{
    return format_number(value == 0.0 ? 0.0 : value);
}

struct MatrixStore::Impl {
    sqlite3* db = nullptr;
    SearchMode search = SearchMode::Indexed;

    ~Impl()
    {
        if (db)
            sqlite3_close(db);
    }

    // Candidates of one dimension and sparse flag, either all of them or only
    // those whose digest matches.
    std::vector<std::pair<std::int64_t, std::string>> candidates(std::string_view dimension, int sparse,
                                                                 std::string_view text) const
    {
        std::vector<std::pair<std::int64_t, std::string>> out;
        if (search == SearchMode::Indexed) {
            Statement st(db, "SELECT id, elements_in FROM matrices_in "
                             "WHERE dimension = ?1 AND sparse = ?2 AND digest = ?3 ORDER BY id");
            st.bind(1, dimension).bind(2, std::int64_t{sparse}).bind(3, digest(text));
            while (st.step())
                out.emplace_back(st.integer(0), st.text(1));
        } else {
            Statement st(db, "SELECT id, elements_in FROM matrices_in "
                             "WHERE dimension = ?1 AND sparse = ?2 ORDER BY id");
            st.bind(1, dimension).bind(2, std::int64_t{sparse});
            while (st.step())
                out.emplace_back(st.integer(0), st.text(1));
        }
        return out;
    }

    std::vector<std::string> rows_of(std::int64_t id) const
    {
        Statement st(db, "SELECT elements FROM matrix_rows WHERE matrix_id = ?1 ORDER BY row_index");
        st.bind(1, id);
        std::vector<std::string> out;
        while (st.step())
            out.push_back(st.text(0));
        return out;
    }

    std::optional<std::int64_t> find_dense_r(const std::string& dimension, const std::string& text) const
    {
        if (search == SearchMode::Indexed) {
            Statement st(db, "SELECT id, elements_in FROM matrices_in "
                             "WHERE dimension = ?1 AND sparse = 0 AND digest = ?2 ORDER BY id");
            st.bind(1, dimension).bind(2, digest(text));
            while (st.step())
                if (st.text_view(1) == text)
                    return st.integer(0);
            return std::nullopt;
        }
        // Scan every matrix of this dimension and compare the strings.
        Statement st(db, "SELECT id, elements_in FROM matrices_in "
                         "WHERE dimension = ?1 AND sparse = 0 ORDER BY id");
        st.bind(1, dimension);
        while (st.step())
            if (st.text_view(1) == text)
                return st.integer(0);
        return std::nullopt;
    }

    std::optional<std::int64_t> find_dense_mr(const std::string& dimension, const std::string& text,
                                              const std::vector<std::string>& rows) const
    {
        if (search == SearchMode::Indexed) {
            Statement st(db, "SELECT id FROM matrices_in "
                             "WHERE dimension = ?1 AND sparse = 0 AND digest = ?2 ORDER BY id");
            st.bind(1, dimension).bind(2, digest(text));
            std::vector<std::int64_t> ids;
            while (st.step())
                ids.push_back(st.integer(0));
            for (std::int64_t id : ids)
                if (rows_of(id) == rows)
                    return id;
            return std::nullopt;
        }
        // Every row record of every matrix with this dimension is read back.
        Statement st(db, "SELECT r.matrix_id, r.row_index, r.elements FROM matrix_rows r "
                         "JOIN matrices_in m ON m.id = r.matrix_id "
                         "WHERE m.dimension = ?1 AND m.sparse = 0 "
                         "ORDER BY r.matrix_id, r.row_index");
        st.bind(1, dimension);
        std::int64_t current = 0;
        bool match = false;
        std::size_t seen = 0;
        while (st.step()) {
            const std::int64_t id = st.integer(0);
            if (id != current) {
                if (current != 0 && match && seen == rows.size())
                    return current;
                current = id;
                match = true;
                seen = 0;
            }
            const auto row = static_cast<std::size_t>(st.integer(1));
            if (match && (row >= rows.size() || st.text_view(2) != rows[row]))
                match = false;
            ++seen;
        }
        if (current != 0 && match && seen == rows.size())
            return current;
        return std::nullopt;
    }

    std::optional<MatrixRecord> record(std::int64_t id) const
    {
        Statement st(db, "SELECT id, elements_in, dimension, test, sparse FROM matrices_in WHERE id = ?1");
        st.bind(1, id);
        if (!st.step())
            return std::nullopt;
        MatrixRecord rec{st.integer(0), st.text(1), st.text(2), st.text(3), static_cast<int>(st.integer(4))};
        return rec;
    }

    bool dense_exists(const std::string& dimension, const std::string& text, std::string_view test,
                      Layout layout, const std::vector<std::string>& rows) const
    {
        Statement st(db, "SELECT id, elements_in FROM matrices_in "
                         "WHERE dimension = ?1 AND sparse = 0 AND digest = ?2 AND test = ?3");
        st.bind(1, dimension).bind(2, digest(text)).bind(3, test);
        while (st.step()) {
            if (layout == Layout::R ? st.text_view(1) == text : rows_of(st.integer(0)) == rows)
                return true;
        }
        return false;
    }

    static ResultRecord read_result(const Statement& st)
    {
        ResultRecord r;
        r.id = st.integer(0);
        r.elements_out = st.text(1);
        r.operation = st.text(2);
        r.matrix_i = st.integer(3);
        r.matrix_ii = st.integer(4);
        r.matrix_iii = st.integer(5);
        r.r = st.text(6);
        r.s = st.text(7);
        r.p = st.integer(8);
        r.q = st.integer(9);
        r.dimension = st.text(10);
        return r;
    }
};

MatrixStore::MatrixStore(const std::filesystem::path& path, StoreOptions options)
    : impl_(std::make_unique<Impl>()), layout_(options.layout), max_text_length_(options.max_text_length)
{
    const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
    if (sqlite3_open_v2(path.string().c_str(), &impl_->db, flags, nullptr) != SQLITE_OK) {
        std::string msg = impl_->db ? sqlite3_errmsg(impl_->db) : "out of memory";
        throw Error(ErrorCode::StoreUnavailable, "cannot open store '" + path.string() + "': " + msg);
    }
    sqlite3_busy_timeout(impl_->db, 5000);
    exec(impl_->db, "PRAGMA journal_mode = WAL; PRAGMA synchronous = NORMAL;");
    exec(impl_->db, kSchema);
    impl_->search = options.search;

    Statement get(impl_->db, "SELECT value FROM meta WHERE key = 'layout'");
    if (get.step()) {
        layout_ = parse_layout(get.text(0));
    } else {
        Statement put(impl_->db, "INSERT INTO meta (key, value) VALUES ('layout', ?1)");
        put.bind(1, std::string_view(layout_name(layout_)));
        put.step();
    }
}

MatrixStore::~MatrixStore() = default;

SearchMode MatrixStore::search_mode() const
{
    std::lock_guard lock(mutex_);
    return impl_->search;
}

void MatrixStore::set_search_mode(SearchMode mode)
{
    std::lock_guard lock(mutex_);
    impl_->search = mode;
}

std::optional<std::int64_t> MatrixStore::find_matrix(const DenseMatrix& a) const
{
    const std::string dimension = dimension_string(a.rows(), a.cols());
    const std::string text = to_r_string(a);
    std::lock_guard lock(mutex_);
    if (layout_ == Layout::R)
        return impl_->find_dense_r(dimension, text);
    return impl_->find_dense_mr(dimension, text, to_mr_records(a));
}

std::optional<std::int64_t> MatrixStore::find_matrix(const SparseCoo& s) const
{
    s.validate();
    const std::string dimension = dimension_string(s.rows, s.cols);
    const CooStrings parts = to_coo_strings(s);
    std::lock_guard lock(mutex_);
    for (const auto& [id, text] : impl_->candidates(dimension, 1, parts.row_idx)) {
        if (text != parts.row_idx)
            continue;
        const auto cols = impl_->record(id + 1);
        const auto vals = impl_->record(id + 2);
        if (cols && vals && cols->sparse == 2 && vals->sparse == 3 && cols->elements_in == parts.col_idx &&
            vals->elements_in == parts.values)
            return id;
    }
    return std::nullopt;
}

std::int64_t MatrixStore::insert_matrix(const DenseMatrix& a, std::string_view test)
{
    reject_control(test, "test name");
    const std::string dimension = dimension_string(a.rows(), a.cols());
    const std::string text = to_r_string(a);
    if (text.size() > max_text_length_)
        throw Error(ErrorCode::TooLong, "serialized matrix has " + std::to_string(text.size()) +
                                            " characters, limit is " + std::to_string(max_text_length_));
    const std::vector<std::string> rows = layout_ == Layout::mR ? to_mr_records(a) : std::vector<std::string>{};

    std::lock_guard lock(mutex_);
    if (impl_->dense_exists(dimension, text, test, layout_, rows))
        throw Error(ErrorCode::DuplicateMatrix, "matrix " + dimension + " is already stored");

    Batch batch(*this);
    Statement ins(impl_->db, "INSERT INTO matrices_in (elements_in, dimension, test, sparse, digest) "
                             "VALUES (?1, ?2, ?3, 0, ?4)");
    ins.bind(1, layout_ == Layout::R ? std::string_view(text) : std::string_view())
        .bind(2, dimension)
        .bind(3, test)
        .bind(4, digest(text));
    ins.step();
    const std::int64_t id = sqlite3_last_insert_rowid(impl_->db);
    if (layout_ == Layout::mR) {
        Statement row(impl_->db, "INSERT INTO matrix_rows (matrix_id, row_index, elements) VALUES (?1, ?2, ?3)");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            row.reset();
            row.bind(1, id).bind(2, static_cast<std::int64_t>(i)).bind(3, rows[i]);
            row.step();
        }
    }
    return id;
}

std::int64_t MatrixStore::insert_matrix(const SparseCoo& s, std::string_view test)
{
    reject_control(test, "test name");
    s.validate();
    const std::string dimension = dimension_string(s.rows, s.cols);
    const CooStrings parts = to_coo_strings(s);
    for (const auto* part : {&parts.row_idx, &parts.col_idx, &parts.values})
        if (part->size() > max_text_length_)
            throw Error(ErrorCode::TooLong, "COO component exceeds the text limit");

    std::lock_guard lock(mutex_);
    if (const auto existing = find_matrix(s)) {
        if (impl_->record(*existing)->test == test)
            throw Error(ErrorCode::DuplicateMatrix, "sparse matrix " + dimension + " is already stored");
    }

    Batch batch(*this);
    Statement ins(impl_->db, "INSERT INTO matrices_in (elements_in, dimension, test, sparse, digest) "
                             "VALUES (?1, ?2, ?3, ?4, ?5)");
    std::int64_t first = 0;
    int flag = 1;
    for (const auto* part : {&parts.row_idx, &parts.col_idx, &parts.values}) {
        ins.reset();
        ins.bind(1, *part).bind(2, dimension).bind(3, test).bind(4, std::int64_t{flag}).bind(5, digest(*part));
        ins.step();
        if (flag == 1)
            first = sqlite3_last_insert_rowid(impl_->db);
        ++flag;
    }
    return first;
}

std::optional<std::int64_t> MatrixStore::find_test_matrix(std::string_view name) const
{
    if (name.empty())
        return std::nullopt;
    std::lock_guard lock(mutex_);
    Statement st(impl_->db, "SELECT id FROM matrices_in WHERE test = ?1 AND sparse IN (0, 1) ORDER BY id LIMIT 1");
    st.bind(1, name);
    if (st.step())
        return st.integer(0);
    return std::nullopt;
}

MatrixRecord MatrixStore::matrix_record(std::int64_t id) const
{
    std::lock_guard lock(mutex_);
    auto rec = impl_->record(id);
    if (!rec)
        throw Error(ErrorCode::UnknownId, "no matrix with id " + std::to_string(id));
    if (rec->sparse == 0 && layout_ == Layout::mR) {
        std::string joined;
        for (const auto& row : impl_->rows_of(id)) {
            if (!joined.empty())
                joined.push_back(',');
            joined += row;
        }
        rec->elements_in = std::move(joined);
    }
    return *rec;
}

DenseMatrix MatrixStore::load_matrix(std::int64_t id, Backend backend) const
{
    std::lock_guard lock(mutex_);
    const auto rec = impl_->record(id);
    if (!rec)
        throw Error(ErrorCode::UnknownId, "no matrix with id " + std::to_string(id));
    try {
        const Dimension dim = parse_dimension(rec->dimension);
        if (rec->sparse == 0) {
            if (layout_ == Layout::mR)
                return from_mr_records(impl_->rows_of(id), dim.cols, backend);
            return from_r_string(rec->elements_in, dim.rows, dim.cols, backend);
        }
        if (rec->sparse != 1)
            throw Error(ErrorCode::UnknownId,
                        "id " + std::to_string(id) + " is a COO component, not the start of a matrix");
        const auto cols = impl_->record(id + 1);
        const auto vals = impl_->record(id + 2);
        if (!cols || !vals || cols->sparse != 2 || vals->sparse != 3)
            throw Error(ErrorCode::CorruptRecord, "COO matrix " + std::to_string(id) + " is incomplete");
        return coo_to_dense(from_coo_strings({rec->elements_in, cols->elements_in, vals->elements_in}, dim.rows,
                                             dim.cols),
                            backend);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::UnknownId || e.code() == ErrorCode::CorruptRecord)
            throw;
        throw Error(ErrorCode::CorruptRecord, "matrix " + std::to_string(id) + ": " + e.what());
    }
}

std::optional<ResultRecord> MatrixStore::find_result_record(const ResultKey& key) const
{
    std::lock_guard lock(mutex_);
    Statement st(impl_->db,
                 "SELECT id, elements_out, operation, matrix_i, matrix_ii, matrix_iii, r, s, p, q, dimension "
                 "FROM matrices_out WHERE operation = ?1 AND matrix_i = ?2 AND matrix_ii = ?3 "
                 "AND matrix_iii = ?4 AND r = ?5 AND s = ?6 AND p = ?7 AND q = ?8");
    st.bind(1, key.operation)
        .bind(2, key.matrix_i)
        .bind(3, key.matrix_ii)
        .bind(4, key.matrix_iii)
        .bind(5, coefficient_text(key.r))
        .bind(6, coefficient_text(key.s))
        .bind(7, key.p)
        .bind(8, key.q);
    if (!st.step())
        return std::nullopt;
    return Impl::read_result(st);
}

std::optional<DenseMatrix> MatrixStore::find_result(const ResultKey& key, Backend backend) const
{
    const auto rec = find_result_record(key);
    if (!rec)
        return std::nullopt;
    try {
        const Dimension dim = parse_dimension(rec->dimension);
        return from_r_string(rec->elements_out, dim.rows, dim.cols, backend);
    } catch (const Error& e) {
        throw Error(ErrorCode::CorruptRecord, "result " + std::to_string(rec->id) + ": " + e.what());
    }
}

ResultRecord MatrixStore::result_record(std::int64_t id) const
{
    std::lock_guard lock(mutex_);
    Statement st(impl_->db,
                 "SELECT id, elements_out, operation, matrix_i, matrix_ii, matrix_iii, r, s, p, q, dimension "
                 "FROM matrices_out WHERE id = ?1");
    st.bind(1, id);
    if (!st.step())
        throw Error(ErrorCode::UnknownId, "no result with id " + std::to_string(id));
    return Impl::read_result(st);
}

std::int64_t MatrixStore::insert_result(const ResultKey& key, const DenseMatrix& x)
{
    if (!is_operation_code(key.operation))
        throw Error(ErrorCode::UnknownOperation, "unknown operation '" + key.operation + "'");
    const std::string text = to_r_string(x);
    if (text.size() > max_text_length_)
        throw Error(ErrorCode::TooLong, "serialized result exceeds the text limit");
    std::lock_guard lock(mutex_);
    Statement st(impl_->db, "INSERT INTO matrices_out (elements_out, operation, matrix_i, matrix_ii, matrix_iii, "
                            "r, s, p, q, dimension) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10)");
    st.bind(1, text)
        .bind(2, key.operation)
        .bind(3, key.matrix_i)
        .bind(4, key.matrix_ii)
        .bind(5, key.matrix_iii)
        .bind(6, coefficient_text(key.r))
        .bind(7, coefficient_text(key.s))
        .bind(8, key.p)
        .bind(9, key.q)
        .bind(10, dimension_string(x.rows(), x.cols()));
    try {
        st.step();
    } catch (const Statement::ConstraintError&) {
        throw Error(ErrorCode::DuplicateResult, "a result for operation " + key.operation + " is already stored");
    }
    return sqlite3_last_insert_rowid(impl_->db);
}

std::size_t MatrixStore::matrix_record_count() const
{
    std::lock_guard lock(mutex_);
    Statement st(impl_->db, "SELECT COUNT(*) FROM matrices_in");
    st.step();
    return static_cast<std::size_t>(st.integer(0));
}

std::size_t MatrixStore::result_count() const
{
    std::lock_guard lock(mutex_);
    Statement st(impl_->db, "SELECT COUNT(*) FROM matrices_out");
    st.step();
    return static_cast<std::size_t>(st.integer(0));
}

std::vector<MatrixRecord> MatrixStore::all_matrix_records() const
{
    std::vector<std::int64_t> ids;
    {
        std::lock_guard lock(mutex_);
        Statement st(impl_->db, "SELECT id FROM matrices_in ORDER BY id");
        while (st.step())
            ids.push_back(st.integer(0));
    }
    std::vector<MatrixRecord> out;
    out.reserve(ids.size());
    for (std::int64_t id : ids)
        out.push_back(matrix_record(id));
    return out;
}

std::vector<ResultRecord> MatrixStore::all_result_records() const
{
    std::lock_guard lock(mutex_);
    Statement st(impl_->db,
                 "SELECT id, elements_out, operation, matrix_i, matrix_ii, matrix_iii, r, s, p, q, dimension "
                 "FROM matrices_out ORDER BY id");
    std::vector<ResultRecord> out;
    while (st.step())
        out.push_back(Impl::read_result(st));
    return out;
}

void MatrixStore::export_to(const std::filesystem::path& dir) const
{
    std::filesystem::create_directories(dir);
    std::ofstream in(dir / "matrices_in.tsv", std::ios::binary);
    std::ofstream out(dir / "matrices_out.tsv", std::ios::binary);
    if (!in || !out)
        throw Error(ErrorCode::StoreUnavailable, "cannot write export files in " + dir.string());
    for (const auto& r : all_matrix_records())
        in << r.id << '\t' << r.elements_in << '\t' << r.dimension << '\t' << r.test << '\t' << r.sparse << '\n';
    for (const auto& r : all_result_records())
        out << r.id << '\t' << r.elements_out << '\t' << r.operation << '\t' << r.matrix_i << '\t' << r.matrix_ii
            << '\t' << r.matrix_iii << '\t' << r.r << '\t' << r.s << '\t' << r.p << '\t' << r.q << '\t'
            << r.dimension << '\n';
    if (!in || !out)
        throw Error(ErrorCode::StoreUnavailable, "failed writing export files in " + dir.string());
}

namespace {

std::vector<std::string> split_tabs(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
        if (tab == std::string::npos)
            break;
        start = tab + 1;
    }
    return out;
}

std::int64_t to_int(const std::string& s)
{
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::CorruptRecord, "bad integer field '" + s + "'");
    }
}

} // namespace

void MatrixStore::import_from(const std::filesystem::path& dir)
{
    std::ifstream in(dir / "matrices_in.tsv", std::ios::binary);
    std::ifstream out(dir / "matrices_out.tsv", std::ios::binary);
    if (!in || !out)
        throw Error(ErrorCode::StoreUnavailable, "cannot read export files in " + dir.string());

    std::lock_guard lock(mutex_);
    Batch batch(*this);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split_tabs(line);
        if (f.size() != 5)
            throw Error(ErrorCode::CorruptRecord, "matrices_in line has " + std::to_string(f.size()) + " fields");
        const std::int64_t id = to_int(f[0]);
        const int sparse = static_cast<int>(to_int(f[4]));
        const Dimension dim = parse_dimension(f[2]);
        std::string stored = f[1];
        std::vector<std::string> rows;
        if (sparse == 0) {
            const DenseMatrix a = from_r_string(f[1], dim.rows, dim.cols);
            if (to_r_string(a) != f[1])
                throw Error(ErrorCode::CorruptRecord, "matrix " + f[0] + " is not in canonical form");
            if (layout_ == Layout::mR) {
                rows = to_mr_records(a);
                stored.clear();
            }
        }
        Statement ins(impl_->db, "INSERT INTO matrices_in (id, elements_in, dimension, test, sparse, digest) "
                                 "VALUES (?1, ?2, ?3, ?4, ?5, ?6)");
        ins.bind(1, id).bind(2, stored).bind(3, f[2]).bind(4, f[3]).bind(5, std::int64_t{sparse}).bind(6, digest(f[1]));
        try {
            ins.step();
        } catch (const Statement::ConstraintError&) {
            throw Error(ErrorCode::DuplicateMatrix, "matrix id " + f[0] + " already present");
        }
        Statement row(impl_->db, "INSERT INTO matrix_rows (matrix_id, row_index, elements) VALUES (?1, ?2, ?3)");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            row.reset();
            row.bind(1, id).bind(2, static_cast<std::int64_t>(i)).bind(3, rows[i]);
            row.step();
        }
    }
    while (std::getline(out, line)) {
        if (line.empty())
            continue;
        const auto f = split_tabs(line);
        if (f.size() != 11)
            throw Error(ErrorCode::CorruptRecord, "matrices_out line has " + std::to_string(f.size()) + " fields");
        Statement ins(impl_->db,
                      "INSERT INTO matrices_out (id, elements_out, operation, matrix_i, matrix_ii, matrix_iii, "
                      "r, s, p, q, dimension) VALUES (?1, ?2, ?3, ?4, ?5, ?6, ?7, ?8, ?9, ?10, ?11)");
        ins.bind(1, to_int(f[0]))
            .bind(2, f[1])
            .bind(3, f[2])
            .bind(4, to_int(f[3]))
            .bind(5, to_int(f[4]))
            .bind(6, to_int(f[5]))
            .bind(7, f[6])
            .bind(8, f[7])
            .bind(9, to_int(f[8]))
            .bind(10, to_int(f[9]))
            .bind(11, f[10]);
        try {
            ins.step();
        } catch (const Statement::ConstraintError&) {
            throw Error(ErrorCode::DuplicateResult, "result id " + f[0] + " already present");
        }
    }
}

MatrixStore::Batch::Batch(MatrixStore& store)
    : store_(store), exceptions_(std::uncaught_exceptions())
{
    store_.mutex_.lock();
    if (sqlite3_get_autocommit(store_.impl_->db))
        exec(store_.impl_->db, "BEGIN IMMEDIATE");
    else
        exceptions_ = -1; // nested inside an outer batch
}

MatrixStore::Batch::~Batch()
{
    if (exceptions_ >= 0) {
        const bool failed = std::uncaught_exceptions() > exceptions_;
        sqlite3_exec(store_.impl_->db, failed ? "ROLLBACK" : "COMMIT", nullptr, nullptr, nullptr);
    }
    store_.mutex_.unlock();
}

} // namespace pinv
