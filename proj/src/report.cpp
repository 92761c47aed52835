#include "meanslab/report.hpp"

#include <cstdio>

namespace meanslab {

Json Json::object() {
    Json j;
    j.kind_ = Kind::object;
    return j;
}

Json Json::array() {
    Json j;
    j.kind_ = Kind::array;
    return j;
}

Json Json::number(double v) {
    Json j;
    j.kind_ = Kind::number;
    j.num_ = v;
    return j;
}

Json Json::integer(long long v) {
    Json j;
    j.kind_ = Kind::integer;
    j.int_ = v;
    return j;
}

Json Json::uinteger(std::uint64_t v) {
    Json j;
    j.kind_ = Kind::uinteger;
    j.uint_ = v;
    return j;
}

Json Json::boolean(bool v) {
    Json j;
    j.kind_ = Kind::boolean;
    j.bool_ = v;
    return j;
}

Json Json::text(std::string v) {
    Json j;
    j.kind_ = Kind::text;
    j.text_ = std::move(v);
    return j;
}

Json& Json::set(const std::string& key, Json v) {
    fields_.emplace_back(key, std::move(v));
    return *this;
}

Json& Json::push(Json v) {
    items_.push_back(std::move(v));
    return *this;
}

std::string Json::format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {
void append_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        case '\t':
            out += "\\t";
            break;
        case '\r':
            out += "\\r";
            break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
}
} // namespace

void Json::dump_to(std::string& out) const {
    switch (kind_) {
    case Kind::object: {
        out += '{';
        bool first = true;
        for (const auto& [key, value] : fields_) {
            if (!first)
                out += ',';
            first = false;
            append_escaped(out, key);
            out += ':';
            value.dump_to(out);
        }
        out += '}';
        break;
    }
    case Kind::array: {
        out += '[';
        bool first = true;
        for (const auto& item : items_) {
            if (!first)
                out += ',';
            first = false;
            item.dump_to(out);
        }
        out += ']';
        break;
    }
    case Kind::number:
        out += format_double(num_);
        break;
    case Kind::integer:
        out += std::to_string(int_);
        break;
    case Kind::uinteger:
        out += std::to_string(uint_);
        break;
    case Kind::boolean:
        out += bool_ ? "true" : "false";
        break;
    case Kind::text:
        append_escaped(out, text_);
        break;
    }
}

std::string Json::dump() const {
    std::string out;
    dump_to(out);
    return out;
}

} // namespace meanslab
