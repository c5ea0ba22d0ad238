#pragma once

#include <Eigen/Dense>

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"

#include <json.hpp>

namespace disc {

struct DataMatrix {
    Eigen::MatrixXd values;               // n samples x p features
    std::vector<std::string> feature_ids; // length p

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index p() const { return values.cols(); }
};

namespace detail {

inline std::string format_value(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

inline double parse_value(const std::string& cell, std::size_t row, std::size_t col) {
    double v = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{}) {
        throw ValidationError("parse error at row " + std::to_string(row) +
                              ", column " + std::to_string(col) + ": '" + cell + "'");
    }
    for (const char* q = res.ptr; q != last; ++q) {
        if (*q != ' ' && *q != '\t') {
            throw ValidationError("parse error at row " + std::to_string(row) +
                                  ", column " + std::to_string(col) + ": '" + cell + "'");
        }
    }
    if (!std::isfinite(v)) {
        throw ValidationError("non-finite value at row " + std::to_string(row) +
                              ", column " + std::to_string(col));
    }
    return v;
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    if (!out.empty() && !out.back().empty() && out.back().back() == '\r') out.back().pop_back();
    return out;
}

inline std::string default_feature_id(std::size_t index, std::size_t p) {
    std::size_t width = 4;
    for (std::size_t t = p; t > 9999; t /= 10) ++width;
    std::string digits = std::to_string(index + 1);
    return "f" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

// write to <path>.tmp then rename, so readers never observe partial files
class AtomicFile {
public:
    explicit AtomicFile(const std::filesystem::path& path)
        : path_(path), tmp_(path.string() + ".tmp"), out_(tmp_, std::ios::binary) {
        if (!out_) throw ValidationError("cannot open for writing: " + tmp_.string());
    }
    std::ofstream& stream() { return out_; }
    void commit() {
        out_.close();
        if (!out_) throw ValidationError("write failed: " + tmp_.string());
        std::filesystem::rename(tmp_, path_);
    }

private:
    std::filesystem::path path_;
    std::filesystem::path tmp_;
    std::ofstream out_;
};

} // namespace detail

inline void validate(const DataMatrix& m) {
    if (m.p() < 2) throw ValidationError("need at least 2 feature columns, got " + std::to_string(m.p()));
    if (m.n() < 2) throw ValidationError("need at least 2 sample rows, got " + std::to_string(m.n()));
    if (m.feature_ids.size() != static_cast<std::size_t>(m.p()))
        throw ValidationError("feature id count does not match column count");
    std::set<std::string> seen;
    for (const auto& id : m.feature_ids) {
        if (!seen.insert(id).second) throw ValidationError("duplicate feature id: " + id);
    }
    if (!m.values.allFinite()) throw ValidationError("matrix contains NaN or Inf");
}

inline DataMatrix load_csv(const std::filesystem::path& path, bool has_header = true) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open: " + path.string());

    std::string line;
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
    std::size_t ncols = 0;
    std::size_t lineno = 0;
    bool header_pending = has_header;

    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_line(line);
        if (header_pending) {
            ids.assign(cells.begin(), cells.end());
            ncols = ids.size();
            header_pending = false;
            continue;
        }
        if (ncols == 0) ncols = cells.size();
        if (cells.size() != ncols) {
            throw ValidationError("shape error: row " + std::to_string(lineno) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(ncols));
        }
        std::vector<double> row(ncols);
        for (std::size_t j = 0; j < ncols; ++j) row[j] = detail::parse_value(cells[j], lineno, j + 1);
        rows.push_back(std::move(row));
    }

    DataMatrix m;
    m.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < ncols; ++j) m.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    if (has_header) {
        m.feature_ids = std::move(ids);
    } else {
        m.feature_ids.resize(ncols);
        for (std::size_t j = 0; j < ncols; ++j) m.feature_ids[j] = detail::default_feature_id(j, ncols);
    }
    validate(m);
    return m;
}

inline void save_csv(const std::filesystem::path& path, const DataMatrix& m) {
    detail::AtomicFile file(path);
    auto& out = file.stream();
    for (Eigen::Index j = 0; j < m.p(); ++j) {
        if (j) out << ',';
        out << m.feature_ids[static_cast<std::size_t>(j)];
    }
    out << '\n';
    for (Eigen::Index i = 0; i < m.n(); ++i) {
        for (Eigen::Index j = 0; j < m.p(); ++j) {
            if (j) out << ',';
            out << detail::format_value(m.values(i, j));
        }
        out << '\n';
    }
    file.commit();
}

// column permutation of b such that b.col(perm[j]) carries a.feature_ids[j]
inline std::vector<Eigen::Index> align(const DataMatrix& a, const DataMatrix& b) {
    std::unordered_map<std::string, Eigen::Index> where;
    for (Eigen::Index j = 0; j < b.p(); ++j) where.emplace(b.feature_ids[static_cast<std::size_t>(j)], j);

    std::vector<std::string> missing, extra;
    std::vector<Eigen::Index> perm;
    perm.reserve(static_cast<std::size_t>(a.p()));
    for (const auto& id : a.feature_ids) {
        auto it = where.find(id);
        if (it == where.end()) missing.push_back(id);
        else perm.push_back(it->second);
    }
    std::set<std::string> a_ids(a.feature_ids.begin(), a.feature_ids.end());
    for (const auto& id : b.feature_ids)
        if (!a_ids.count(id)) extra.push_back(id);

    if (!missing.empty() || !extra.empty()) {
        std::string msg = "feature alignment error;";
        if (!missing.empty()) {
            msg += " missing in b:";
            for (const auto& id : missing) msg += " " + id;
        }
        if (!extra.empty()) {
            msg += " extra in b:";
            for (const auto& id : extra) msg += " " + id;
        }
        throw ValidationError(msg);
    }
    return perm;
}

inline DataMatrix apply_alignment(const DataMatrix& b, const std::vector<Eigen::Index>& perm,
                                  const std::vector<std::string>& target_ids) {
    DataMatrix out;
    out.values.resize(b.n(), static_cast<Eigen::Index>(perm.size()));
    for (std::size_t j = 0; j < perm.size(); ++j) out.values.col(static_cast<Eigen::Index>(j)) = b.values.col(perm[j]);
    out.feature_ids = target_ids;
    return out;
}

inline void save_loadings(const std::filesystem::path& path, const std::vector<std::string>& ids,
                          const Eigen::MatrixXd& v) {
    detail::AtomicFile file(path);
    auto& out = file.stream();
    out << "feature_id";
    for (Eigen::Index j = 0; j < v.cols(); ++j) out << ",v" << (j + 1);
    out << '\n';
    for (Eigen::Index i = 0; v.cols() > 0 && i < v.rows(); ++i) {
        out << ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < v.cols(); ++j) out << ',' << detail::format_value(v(i, j));
        out << '\n';
    }
    file.commit();
}

struct Loadings {
    std::vector<std::string> feature_ids;
    Eigen::MatrixXd v;
};

inline Loadings load_loadings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open: " + path.string());
    std::string line;
    Loadings out;
    std::size_t ncols = 0;
    std::size_t lineno = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_line(line);
        if (lineno == 1) {
            if (cells.empty() || cells[0] != "feature_id")
                throw ValidationError("expected feature_id header in " + path.string());
            ncols = cells.size();
            continue;
        }
        if (cells.size() != ncols)
            throw ValidationError("shape error: row " + std::to_string(lineno) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(ncols));
        out.feature_ids.push_back(cells[0]);
        std::vector<double> row(ncols - 1);
        for (std::size_t j = 1; j < ncols; ++j) row[j - 1] = detail::parse_value(cells[j], lineno, j + 1);
        rows.push_back(std::move(row));
    }
    out.v.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(ncols - 1));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j + 1 < ncols; ++j)
            out.v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return out;
}

inline void save_sigma(const std::filesystem::path& path, const Eigen::VectorXd& sigma) {
    detail::AtomicFile file(path);
    auto& out = file.stream();
    out << "sigma\n";
    for (Eigen::Index i = 0; i < sigma.size(); ++i) out << detail::format_value(sigma(i)) << '\n';
    file.commit();
}

inline void save_json(const std::filesystem::path& path, const nlohmann::json& j) {
    detail::AtomicFile file(path);
    file.stream() << j.dump(2) << '\n';
    file.commit();
}

// one differential result: loadings, significances, and the run summary
inline void save_result(const std::filesystem::path& dir, const std::string& tag,
                        const std::vector<std::string>& ids, const Eigen::MatrixXd& v,
                        const Eigen::VectorXd& sigma, const nlohmann::json& summary) {
    std::filesystem::create_directories(dir);
    save_loadings(dir / ("v_" + tag + ".csv"), ids, v);
    save_sigma(dir / ("sigma_" + tag + ".csv"), sigma);
    save_json(dir / "summary.json", summary);
}

inline std::uint64_t fnv1a_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open: " + path.string());
    std::uint64_t h = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    return h;
}

} // namespace disc
