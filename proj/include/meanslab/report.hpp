#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace meanslab {

/// Minimal insertion-ordered JSON document.  Reports must be byte-stable
/// across runs and platforms, so serialization is pinned down here: keys keep
/// insertion order, floats print with 17 significant digits, and there is no
/// whitespace variation to drift.
class Json {
public:
    static Json object();
    static Json array();
    static Json number(double v);
    static Json integer(long long v);
    static Json uinteger(std::uint64_t v);
    static Json boolean(bool v);
    static Json text(std::string v);

    /// Object field (insertion order preserved); returns *this for chaining.
    Json& set(const std::string& key, Json v);
    /// Array element.
    Json& push(Json v);

    /// Compact single-line serialization.
    std::string dump() const;

    /// 17-significant-digit float formatting used across all reports.
    static std::string format_double(double v);

private:
    enum class Kind { object, array, number, integer, uinteger, boolean, text };
    Kind kind_ = Kind::object;
    double num_ = 0.0;
    long long int_ = 0;
    std::uint64_t uint_ = 0;
    bool bool_ = false;
    std::string text_;
    std::vector<std::pair<std::string, Json>> fields_;
    std::vector<Json> items_;

    void dump_to(std::string& out) const;
};

} // namespace meanslab
