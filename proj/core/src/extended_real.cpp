#include "mmlab/extended_real.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "mmlab/error.hpp"

namespace mmlab {

double ExtendedReal::to_double() const {
    switch (tag_) {
        case Tag::NegInf: return -std::numeric_limits<double>::infinity();
        case Tag::PosInf: return std::numeric_limits<double>::infinity();
        case Tag::Finite: return value_;
    }
    return value_;
}

std::partial_ordering ExtendedReal::operator<=>(const ExtendedReal& o) const {
    auto rank = [](Tag t) { return t == Tag::NegInf ? 0 : (t == Tag::Finite ? 1 : 2); };
    if (tag_ != o.tag_) return rank(tag_) <=> rank(o.tag_);
    if (tag_ != Tag::Finite) return std::partial_ordering::equivalent;
    return value_ <=> o.value_;
}

std::string ExtendedReal::to_string() const {
    if (tag_ == Tag::NegInf) return "-inf";
    if (tag_ == Tag::PosInf) return "+inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, value_);
    return std::string(buf, res.ptr);
}

ExtendedReal ExtendedReal::parse(const std::string& text) {
    if (text == "-inf" || text == "-infinity") return neg_inf();
    if (text == "+inf" || text == "inf" || text == "+infinity" || text == "infinity") return pos_inf();
    double v = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(v)) {
        fail(ErrorKind::Parse, "not an extended real: '" + text + "'");
    }
    return ExtendedReal(v);
}

ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b) { return (a < b) ? b : a; }
ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b) { return (b < a) ? b : a; }

}  // namespace mmlab
