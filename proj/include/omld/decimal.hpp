#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace omld {

using BigInt = boost::multiprecision::cpp_int;

/// Exact decimal number: unscaled * 10^-scale, kept normalized so that
/// equal values compare equal field by field.
class Decimal {
public:
    Decimal() = default;
    Decimal(BigInt unscaled, int scale);
    explicit Decimal(long long v) : Decimal(BigInt(v), 0) {}

    /// Accepts xsd:integer, xsd:decimal and xsd:double lexical forms
    /// (optional sign, digits, optional fraction, optional exponent).
    static std::optional<Decimal> parse(std::string_view lexical);

    /// Shortest decimal that round-trips to `v`. Requires a finite value.
    static Decimal from_double(double v);

    const BigInt& unscaled() const { return unscaled_; }
    int scale() const { return scale_; }
    bool is_integer() const { return scale_ <= 0; }
    BigInt to_integer() const;  // requires is_integer()
    double to_double() const;

    /// Plain decimal notation, no exponent; integers print without a point.
    std::string to_string() const;

    Decimal operator*(const Decimal& rhs) const;

    friend bool operator==(const Decimal&, const Decimal&) = default;

private:
    void normalize();

    BigInt unscaled_ = 0;
    int scale_ = 0;
};

}  // namespace omld
