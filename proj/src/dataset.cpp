#include "occ/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "occ/rng.hpp"

namespace occ {

Matrix ScalingProfile::apply(const Matrix& m) const {
    if (m.cols() != divisors.size())
        throw std::invalid_argument("ScalingProfile::apply: width mismatch");
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j) / divisors[j];
    return out;
}

std::string ScalingProfile::to_json() const {
    nlohmann::json j;
    j["divisors"] = divisors;
    return j.dump();
}

namespace {

// RFC-4180-style field splitting: quoted fields, doubled quotes, commas.
std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c == '\r' && i + 1 == line.size()) {
            // trailing CR from CRLF files
        } else {
            cur += c;
        }
    }
    if (quoted)
        throw std::runtime_error("load_csv: unterminated quote on line " + std::to_string(line_no));
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column, MissingPolicy policy) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || trim(line).empty())
        throw std::runtime_error("load_csv: empty file " + path);

    const auto header = split_csv_line(line, 1);
    std::size_t label_idx = header.size();
    for (std::size_t j = 0; j < header.size(); ++j)
        if (trim(header[j]) == label_column) label_idx = j;
    if (label_idx == header.size())
        throw std::runtime_error("load_csv: label column '" + label_column + "' not found in " +
                                 path);

    Dataset d;
    auto slash = path.find_last_of('/');
    d.name = slash == std::string::npos ? path : path.substr(slash + 1);
    if (auto dot = d.name.find_last_of('.'); dot != std::string::npos) d.name = d.name.substr(0, dot);

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line, line_no);
        if (fields.size() != header.size())
            throw std::runtime_error("load_csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(fields.size()) + " fields, expected " +
                                     std::to_string(header.size()));
        std::vector<double> row;
        row.reserve(header.size() - 1);
        bool missing = false;
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (j == label_idx) continue;
            const std::string f = trim(fields[j]);
            if (f.empty()) {
                missing = true;
                continue;
            }
            std::size_t consumed = 0;
            double v = 0;
            try {
                v = std::stod(f, &consumed);
            } catch (const std::exception&) {
                throw std::runtime_error("load_csv: non-numeric value '" + f + "' at line " +
                                         std::to_string(line_no) + ", column " + header[j]);
            }
            if (consumed != f.size())
                throw std::runtime_error("load_csv: non-numeric value '" + f + "' at line " +
                                         std::to_string(line_no) + ", column " + header[j]);
            if (!std::isfinite(v)) missing = true;
            row.push_back(v);
        }
        if (missing || row.size() != header.size() - 1) {
            if (policy == MissingPolicy::DropRow) continue;
            throw std::runtime_error("load_csv: missing or non-finite value at line " +
                                     std::to_string(line_no));
        }
        d.features.push_row(row);
        d.labels.push_back(trim(fields[label_idx]));
    }
    if (d.features.rows() == 0) throw std::runtime_error("load_csv: no data rows in " + path);
    return d;
}

std::vector<ClassPartition> derive_problems(const Dataset& d, std::size_t min_class_size) {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < d.labels.size(); ++i) by_class[d.labels[i]].push_back(i);

    std::vector<ClassPartition> out;
    for (const auto& [cls, rows] : by_class) {
        if (rows.size() < min_class_size) continue;
        ClassPartition p;
        p.target_class = cls;
        p.target_rows = rows;
        for (const auto& [other_cls, other_rows] : by_class)
            if (other_cls != cls)
                p.other_rows.insert(p.other_rows.end(), other_rows.begin(), other_rows.end());
        std::sort(p.other_rows.begin(), p.other_rows.end());
        out.push_back(std::move(p));
    }
    return out;
}

double interpolated_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("interpolated_quantile: empty input");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

ScalingProfile fit_iqr_scaling(const Matrix& target_train) {
    if (target_train.empty()) throw std::invalid_argument("fit_iqr_scaling: empty target set");
    ScalingProfile p;
    p.divisors.resize(target_train.cols());
    for (std::size_t j = 0; j < target_train.cols(); ++j) {
        std::vector<double> col(target_train.rows());
        for (std::size_t i = 0; i < target_train.rows(); ++i) col[i] = target_train(i, j);
        double div = interpolated_quantile(col, 0.75) - interpolated_quantile(col, 0.25);
        if (div == 0.0) {
            const auto [mn, mx] = std::minmax_element(col.begin(), col.end());
            div = *mx - *mn;  // fallback: full range
        }
        if (div == 0.0) div = 1.0;  // constant feature
        p.divisors[j] = div;
    }
    return p;
}

std::vector<FoldSplit> stratified_kfold(const std::vector<bool>& is_target, std::size_t k,
                                        std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
    std::vector<std::size_t> targets, others;
    for (std::size_t i = 0; i < is_target.size(); ++i)
        (is_target[i] ? targets : others).push_back(i);
    if (targets.size() < k)
        throw std::runtime_error("stratified_kfold: only " + std::to_string(targets.size()) +
                                 " target instances for k=" + std::to_string(k));

    auto rng = make_rng(seed);
    std::shuffle(targets.begin(), targets.end(), rng);
    std::shuffle(others.begin(), others.end(), rng);

    std::vector<std::vector<std::size_t>> folds(k);
    for (std::size_t i = 0; i < targets.size(); ++i) folds[i % k].push_back(targets[i]);
    for (std::size_t i = 0; i < others.size(); ++i) folds[i % k].push_back(others[i]);

    std::vector<FoldSplit> out(k);
    for (std::size_t f = 0; f < k; ++f) {
        out[f].test = folds[f];
        std::sort(out[f].test.begin(), out[f].test.end());
        for (std::size_t g = 0; g < k; ++g) {
            if (g == f) continue;
            out[f].train.insert(out[f].train.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(out[f].train.begin(), out[f].train.end());
    }
    return out;
}

OneClassProblem make_problem(const Dataset& d, const ClassPartition& part, const FoldSplit& fold) {
    OneClassProblem p;
    p.dataset_name = d.name;
    p.target_class = part.target_class;

    std::vector<bool> in_target(d.features.rows(), false);
    for (auto i : part.target_rows) in_target[i] = true;
    std::vector<bool> in_scope(d.features.rows(), false);
    for (auto i : part.target_rows) in_scope[i] = true;
    for (auto i : part.other_rows) in_scope[i] = true;

    std::vector<std::size_t> target_train_rows;
    for (auto i : fold.train) {
        if (!in_scope[i]) continue;
        p.train_features.push_row(d.features.row(i));
        p.train_is_target.push_back(in_target[i]);
        if (in_target[i]) target_train_rows.push_back(i);
    }
    p.target_train = d.features.select_rows(target_train_rows);
    for (auto i : fold.test) {
        if (!in_scope[i]) continue;
        p.test_features.push_row(d.features.row(i));
        p.test_is_target.push_back(in_target[i]);
    }
    return p;
}

}  // namespace occ
