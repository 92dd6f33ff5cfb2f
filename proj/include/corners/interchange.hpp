#pragma once

// JSON interchange: MatrixDocument ({"rows", "cols", "data": [[[re, im], ...], ...]})
// and the report documents emitted by the command-line tool.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "corners/linalg.hpp"

namespace corners {

using Json = nlohmann::ordered_json;

/// Malformed document or unreadable file. The message names the offending field.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Json matrix_to_json(const ComplexMatrix& m) {
    Json data = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
        data.push_back(std::move(row));
    }
    Json doc;
    doc["rows"] = m.rows();
    doc["cols"] = m.cols();
    doc["data"] = std::move(data);
    return doc;
}

inline ComplexMatrix matrix_from_json(const Json& doc, const std::string& where = "document") {
    if (!doc.is_object()) throw InputError(where + ": expected a JSON object");
    const auto count = [&](const char* key) -> Index {
        if (!doc.contains(key)) throw InputError(where + "." + key + ": missing");
        const Json& v = doc.at(key);
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            throw InputError(where + "." + key + ": expected a non-negative integer");
        }
        return static_cast<Index>(v.get<std::int64_t>());
    };
    const Index rows = count("rows");
    const Index cols = count("cols");
    if (!doc.contains("data")) throw InputError(where + ".data: missing");
    const Json& data = doc.at("data");
    if (!data.is_array() || static_cast<Index>(data.size()) != rows) {
        throw InputError(where + ".data: expected an array of " + std::to_string(rows) + " rows");
    }
    ComplexMatrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const Json& row = data[static_cast<std::size_t>(i)];
        const std::string row_path = where + ".data[" + std::to_string(i) + "]";
        if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
            throw InputError(row_path + ": expected an array of " + std::to_string(cols) + " entries");
        }
        for (Index j = 0; j < cols; ++j) {
            const Json& e = row[static_cast<std::size_t>(j)];
            const std::string path = row_path + "[" + std::to_string(j) + "]";
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
                throw InputError(path + ": expected a [re, im] pair of numbers");
            }
            const double re = e[0].get<double>();
            const double im = e[1].get<double>();
            if (!std::isfinite(re) || !std::isfinite(im)) throw InputError(path + ": non-finite value");
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

/// Compact single-line JSON with shortest round-trip decimals, newline-terminated.
inline std::string serialize(const Json& doc) { return doc.dump() + "\n"; }

inline Json parse_json(const std::string& text, const std::string& where = "document") {
    try {
        return Json::parse(text);
    } catch (const Json::exception& e) {
        throw InputError(where + ": invalid JSON (" + std::string(e.what()) + ")");
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw InputError(path + ": cannot write file");
}

inline ComplexMatrix load_matrix(const std::string& path) {
    return matrix_from_json(parse_json(read_file(path), path), path);
}

/// 64-bit FNV-1a over the bytes of `text`, as 16 hex digits.
inline std::string fnv1a_digest(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    return out;
}

inline std::string matrix_digest(const ComplexMatrix& m) {
    return "fnv1a64:" + fnv1a_digest(serialize(matrix_to_json(m)));
}

/// Output of every subcommand. Metrics that are not finite (an infinite corner
/// ratio) serialize as null.
struct ReportDocument {
    std::string command;
    std::map<std::string, std::string> inputs;
    std::map<std::string, double> metrics;
    std::map<std::string, bool> verdicts;
    std::map<std::string, double> tolerances;
    std::map<std::string, ComplexMatrix> witness;

    Json to_json() const {
        Json doc;
        doc["command"] = command;
        doc["inputs"] = Json::object();
        for (const auto& [k, v] : inputs) doc["inputs"][k] = v;
        doc["metrics"] = Json::object();
        for (const auto& [k, v] : metrics) {
            doc["metrics"][k] = std::isfinite(v) ? Json(v) : Json(nullptr);
        }
        doc["verdicts"] = Json::object();
        for (const auto& [k, v] : verdicts) doc["verdicts"][k] = v;
        doc["tolerances"] = Json::object();
        for (const auto& [k, v] : tolerances) doc["tolerances"][k] = v;
        if (!witness.empty()) {
            doc["witness"] = Json::object();
            for (const auto& [k, v] : witness) doc["witness"][k] = matrix_to_json(v);
        }
        return doc;
    }

    std::string to_text() const {
        std::ostringstream os;
        os.precision(17);
        os << "command: " << command << "\n";
        for (const auto& [k, v] : inputs) os << "input." << k << " = " << v << "\n";
        for (const auto& [k, v] : metrics) os << "metric." << k << " = " << v << "\n";
        for (const auto& [k, v] : verdicts) os << "verdict." << k << " = " << (v ? "true" : "false") << "\n";
        for (const auto& [k, v] : tolerances) os << "tolerance." << k << " = " << v << "\n";
        for (const auto& [k, m] : witness) {
            os << "witness." << k << " (" << m.rows() << "x" << m.cols() << "):\n";
            for (Index i = 0; i < m.rows(); ++i) {
                os << " ";
                for (Index j = 0; j < m.cols(); ++j) os << " " << m(i, j);
                os << "\n";
            }
        }
        return os.str();
    }
};

}  // namespace corners
