#pragma once

// Structured experiment record shared by every checker and CLI command.
//
// A Report echoes its inputs, stores named quantities, and keeps one row per
// asserted inequality or identity. It passes iff every row passes. The JSON
// form has sorted keys and prints every real with 12 significant digits, so
// identical runs produce identical bytes.

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace bgklab {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "1";

/// Fixed 12-significant-digit rendering used for JSON and CSV alike.
inline std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";  // folds -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

enum class Relation { le, ge, abs_diff_le };

inline const char* to_string(Relation r) {
    switch (r) {
        case Relation::le: return "<=";
        case Relation::ge: return ">=";
        case Relation::abs_diff_le: return "abs_diff<=";
    }
    return "?";
}

struct Assertion {
    std::string name;
    double lhs;
    double rhs;
    Relation relation;
    bool pass;
};

class Report {
public:
    explicit Report(std::string command = {}) : command_(std::move(command)) {}

    const std::string& command() const noexcept { return command_; }

    void set_input(const std::string& key, Json value) { inputs_[key] = std::move(value); }
    void set_quantity(const std::string& key, Json value) { quantities_[key] = std::move(value); }
    const std::map<std::string, Json>& quantities() const noexcept { return quantities_; }
    const std::map<std::string, Json>& inputs() const noexcept { return inputs_; }

    /// Passes iff lhs <= rhs + slack. NaN never passes.
    bool check_le(std::string name, double lhs, double rhs, double slack = 0.0) {
        return record(std::move(name), lhs, rhs, Relation::le, lhs <= rhs + slack);
    }
    /// Passes iff lhs >= rhs - slack.
    bool check_ge(std::string name, double lhs, double rhs, double slack = 0.0) {
        return record(std::move(name), lhs, rhs, Relation::ge, lhs >= rhs - slack);
    }
    /// Records |a - b| against tol.
    bool check_close(std::string name, double a, double b, double tol) {
        const double diff = std::abs(a - b);
        return record(std::move(name), diff, tol, Relation::abs_diff_le, diff <= tol);
    }
    bool check_diff(std::string name, double diff, double tol) {
        return record(std::move(name), diff, tol, Relation::abs_diff_le, diff <= tol);
    }
    /// Boolean facts are stored as 1/0 against 1.
    bool check_true(std::string name, bool ok) {
        return record(std::move(name), ok ? 1.0 : 0.0, 1.0, Relation::ge, ok);
    }

    void warn(std::string message) { warnings_.push_back(std::move(message)); }
    void add_trace(Json row) { trace_.push_back(std::move(row)); }

    const std::vector<Assertion>& assertions() const noexcept { return assertions_; }
    const std::vector<std::string>& warnings() const noexcept { return warnings_; }
    const std::vector<Json>& trace() const noexcept { return trace_; }

    bool pass() const {
        for (const auto& a : assertions_) {
            if (!a.pass) return false;
        }
        return true;
    }

    /// Appends another report's rows, prefixing names with `prefix.`.
    void absorb(const Report& other, std::string_view prefix) {
        const std::string pre = prefix.empty() ? std::string{} : std::string(prefix) + ".";
        for (const auto& a : other.assertions_) {
            assertions_.push_back({pre + a.name, a.lhs, a.rhs, a.relation, a.pass});
        }
        for (const auto& [k, v] : other.quantities_) quantities_[pre + k] = v;
        for (const auto& w : other.warnings_) warnings_.push_back(pre + w);
        for (const auto& t : other.trace_) trace_.push_back(t);
    }

    Json to_json() const {
        Json j;
        j["schema_version"] = kSchemaVersion;
        j["command"] = command_;
        j["inputs"] = Json::object();
        for (const auto& [k, v] : inputs_) j["inputs"][k] = v;
        j["quantities"] = Json::object();
        for (const auto& [k, v] : quantities_) j["quantities"][k] = v;
        j["assertions"] = Json::array();
        for (const auto& a : assertions_) {
            j["assertions"].push_back({{"name", a.name},
                                       {"lhs", real_json(a.lhs)},
                                       {"rhs", real_json(a.rhs)},
                                       {"relation", to_string(a.relation)},
                                       {"pass", a.pass}});
        }
        j["warnings"] = warnings_;
        if (!trace_.empty()) j["trace"] = trace_;
        j["pass"] = pass();
        return j;
    }

    /// Non-finite reals become strings since JSON has no literal for them.
    static Json real_json(double x) {
        if (!std::isfinite(x)) return format_real(x);
        return x;
    }

private:
    bool record(std::string name, double lhs, double rhs, Relation rel, bool ok) {
        if (std::isnan(lhs) || std::isnan(rhs)) ok = false;
        assertions_.push_back({std::move(name), lhs, rhs, rel, ok});
        return ok;
    }

    std::string command_;
    std::map<std::string, Json> inputs_;
    std::map<std::string, Json> quantities_;
    std::vector<Assertion> assertions_;
    std::vector<std::string> warnings_;
    std::vector<Json> trace_;
};

/// lhs <= 2^log2_rhs. Bounds with astronomically large constants are
/// recorded in log2 form (name suffixed ".log2") so that they stay finite.
inline bool check_le_log2(Report& rep, const std::string& name, double lhs, double log2_rhs) {
    if (log2_rhs < 1000.0) return rep.check_le(name, lhs, std::exp2(log2_rhs));
    return rep.check_le(name + ".log2", lhs > 0.0 ? std::log2(lhs) : -1e300, log2_rhs);
}

/// lhs >= 2^log2_rhs, same convention.
inline bool check_ge_log2(Report& rep, const std::string& name, double lhs, double log2_rhs,
                          double slack = 0.0) {
    if (log2_rhs > -1000.0) return rep.check_ge(name, lhs, std::exp2(log2_rhs), slack);
    return rep.check_ge(name + ".log2", lhs > 0.0 ? std::log2(lhs) : -1e300, log2_rhs);
}

namespace detail {

inline void dump_into(const Json& j, std::string& out, int indent) {
    const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(indent + 1) * 2, ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            // nlohmann's default object type is a std::map, so keys iterate sorted.
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ",\n";
                first = false;
                out += inner + Json(it.key()).dump() + ": ";
                dump_into(it.value(), out, indent + 1);
            }
            out += "\n" + pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            bool first = true;
            for (const auto& v : j) {
                if (!first) out += ",\n";
                first = false;
                out += inner;
                dump_into(v, out, indent + 1);
            }
            out += "\n" + pad + "]";
            return;
        }
        case Json::value_t::number_float:
            if (std::isfinite(j.get<double>())) {
                out += format_real(j.get<double>());
            } else {
                out += Json(format_real(j.get<double>())).dump();
            }
            return;
        default:
            out += j.dump(-1, ' ', false, Json::error_handler_t::replace);
            return;
    }
}

}  // namespace detail

/// Deterministic JSON text: sorted keys, two-space indent, 12 significant
/// digits for every real, trailing LF.
inline std::string dump_json(const Json& j) {
    std::string out;
    detail::dump_into(j, out, 0);
    out += "\n";
    return out;
}

}  // namespace bgklab
