#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "madel/grid.hpp"
#include "madel/madelung.hpp"

namespace madel::io {

// 17 significant digits: round-trips doubles exactly and keeps output
// byte-identical across runs.
inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt(int v) { return std::to_string(v); }
inline std::string fmt(long v) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }

// Minimal ordered JSON value; keys keep insertion order so identical inputs
// produce byte-identical documents.
class Json {
public:
    static Json num(double v) { return Json(fmt(v)); }
    static Json integer(long v) { return Json(std::to_string(v)); }
    static Json boolean(bool v) { return Json(v ? "true" : "false"); }
    static Json str(const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
            }
        }
        out += '"';
        return Json(out);
    }
    static Json array() {
        Json j;
        j.kind_ = Kind::array;
        return j;
    }
    static Json object() {
        Json j;
        j.kind_ = Kind::object;
        return j;
    }
    static Json complex(Complex z) {
        Json j = object();
        j.set("re", num(z.real()));
        j.set("im", num(z.imag()));
        j.set("abs", num(std::abs(z)));
        j.set("arg", num(std::arg(z)));
        return j;
    }

    Json& push_back(Json v) {
        items_.emplace_back("", std::move(v));
        return *this;
    }
    Json& set(const std::string& key, Json v) {
        items_.emplace_back(key, std::move(v));
        return *this;
    }

    void emit(std::ostream& os, int indent = 0) const {
        const std::string pad(static_cast<size_t>(indent) * 2, ' ');
        const std::string pad1(static_cast<size_t>(indent + 1) * 2, ' ');
        switch (kind_) {
        case Kind::scalar: os << scalar_; break;
        case Kind::array:
            if (items_.empty()) {
                os << "[]";
                break;
            }
            os << "[\n";
            for (size_t i = 0; i < items_.size(); ++i) {
                os << pad1;
                items_[i].second.emit(os, indent + 1);
                os << (i + 1 < items_.size() ? ",\n" : "\n");
            }
            os << pad << "]";
            break;
        case Kind::object:
            if (items_.empty()) {
                os << "{}";
                break;
            }
            os << "{\n";
            for (size_t i = 0; i < items_.size(); ++i) {
                os << pad1 << Json::str(items_[i].first).scalar_ << ": ";
                items_[i].second.emit(os, indent + 1);
                os << (i + 1 < items_.size() ? ",\n" : "\n");
            }
            os << pad << "}";
            break;
        }
    }

private:
    enum class Kind { scalar, array, object };
    explicit Json(std::string scalar) : kind_(Kind::scalar), scalar_(std::move(scalar)) {}
    Json() = default;

    Kind kind_ = Kind::scalar;
    std::string scalar_ = "null";
    std::vector<std::pair<std::string, Json>> items_;
};

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) os << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

// columns: x, Re, Im
inline void write_field_csv(std::ostream& os, const ComplexField& f) {
    write_csv_row(os, {"x", "re", "im"});
    for (int i = 0; i < f.grid.n_points; ++i)
        write_csv_row(os, {fmt(f.grid.x(i)), fmt(f[i].real()), fmt(f[i].imag())});
}

inline Json field_json(const ComplexField& f) {
    Json x = Json::array(), re = Json::array(), im = Json::array();
    for (int i = 0; i < f.grid.n_points; ++i) {
        x.push_back(Json::num(f.grid.x(i)));
        re.push_back(Json::num(f[i].real()));
        im.push_back(Json::num(f[i].imag()));
    }
    Json j = Json::object();
    j.set("x", std::move(x));
    j.set("re", std::move(re));
    j.set("im", std::move(im));
    return j;
}

// columns: x, rho, S, v, Q, node_flag
inline void write_madelung_csv(std::ostream& os, const MadelungField& f) {
    write_csv_row(os, {"x", "rho", "S", "v", "Q", "node"});
    for (int i = 0; i < f.grid.n_points; ++i)
        write_csv_row(os, {fmt(f.grid.x(i)), fmt(f.rho[static_cast<size_t>(i)]),
                           fmt(f.S[static_cast<size_t>(i)]), fmt(f.v[static_cast<size_t>(i)]),
                           fmt(f.Q[static_cast<size_t>(i)]),
                           std::to_string(static_cast<int>(f.node_mask[static_cast<size_t>(i)]))});
}

inline Json madelung_json(const MadelungField& f) {
    Json x = Json::array(), rho = Json::array(), S = Json::array(), v = Json::array(),
         Q = Json::array(), node = Json::array();
    for (int i = 0; i < f.grid.n_points; ++i) {
        x.push_back(Json::num(f.grid.x(i)));
        rho.push_back(Json::num(f.rho[static_cast<size_t>(i)]));
        S.push_back(Json::num(f.S[static_cast<size_t>(i)]));
        v.push_back(Json::num(f.v[static_cast<size_t>(i)]));
        Q.push_back(Json::num(f.Q[static_cast<size_t>(i)]));
        node.push_back(Json::integer(f.node_mask[static_cast<size_t>(i)]));
    }
    Json j = Json::object();
    j.set("x", std::move(x));
    j.set("rho", std::move(rho));
    j.set("S", std::move(S));
    j.set("v", std::move(v));
    j.set("Q", std::move(Q));
    j.set("node", std::move(node));
    return j;
}

} // namespace madel::io
