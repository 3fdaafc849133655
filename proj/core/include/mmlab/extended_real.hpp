#pragma once

#include <compare>
#include <string>

namespace mmlab {

// A real number or one of the two infinities. Infinite interval endpoints are
// tagged explicitly instead of being encoded as IEEE infinities.
class ExtendedReal {
public:
    enum class Tag { NegInf, Finite, PosInf };

    constexpr ExtendedReal() = default;
    constexpr ExtendedReal(double v) : tag_(Tag::Finite), value_(v) {}  // NOLINT(google-explicit-constructor)

    static constexpr ExtendedReal neg_inf() { return ExtendedReal(Tag::NegInf); }
    static constexpr ExtendedReal pos_inf() { return ExtendedReal(Tag::PosInf); }

    constexpr Tag tag() const { return tag_; }
    constexpr bool is_finite() const { return tag_ == Tag::Finite; }
    constexpr bool is_neg_inf() const { return tag_ == Tag::NegInf; }
    constexpr bool is_pos_inf() const { return tag_ == Tag::PosInf; }

    // Only meaningful for finite values.
    constexpr double value() const { return value_; }

    // IEEE view, for arithmetic at the boundary of the library.
    double to_double() const;

    constexpr bool operator==(const ExtendedReal& o) const {
        return tag_ == o.tag_ && (tag_ != Tag::Finite || value_ == o.value_);
    }
    std::partial_ordering operator<=>(const ExtendedReal& o) const;

    // "-inf", "+inf" or the shortest round-trip decimal.
    std::string to_string() const;
    static ExtendedReal parse(const std::string& text);

private:
    constexpr explicit ExtendedReal(Tag t) : tag_(t) {}

    Tag tag_ = Tag::Finite;
    double value_ = 0.0;
};

ExtendedReal max(const ExtendedReal& a, const ExtendedReal& b);
ExtendedReal min(const ExtendedReal& a, const ExtendedReal& b);

}  // namespace mmlab
