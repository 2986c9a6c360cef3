#include "omld/decimal.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace omld {

namespace {

BigInt pow10(int n) {
    BigInt r = 1;
    for (int i = 0; i < n; ++i) r *= 10;
    return r;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace

Decimal::Decimal(BigInt unscaled, int scale) : unscaled_(std::move(unscaled)), scale_(scale) {
    normalize();
}

void Decimal::normalize() {
    if (scale_ < 0) {
        unscaled_ *= pow10(-scale_);
        scale_ = 0;
    }
    if (unscaled_ == 0) {
        scale_ = 0;
        return;
    }
    while (scale_ > 0 && unscaled_ % 10 == 0) {
        unscaled_ /= 10;
        --scale_;
    }
}

std::optional<Decimal> Decimal::parse(std::string_view s) {
    std::size_t i = 0;
    bool negative = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) negative = s[i++] == '-';
    std::string digits;
    int scale = 0;
    bool any = false;
    while (i < s.size() && is_digit(s[i])) {
        digits += s[i++];
        any = true;
    }
    if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && is_digit(s[i])) {
            digits += s[i++];
            ++scale;
            any = true;
        }
    }
    if (!any) return std::nullopt;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        ++i;
        int exp = 0;
        auto [ptr, ec] = std::from_chars(s.data() + i + (i < s.size() && s[i] == '+' ? 1 : 0),
                                         s.data() + s.size(), exp);
        if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
        if (exp > 100000 || exp < -100000) return std::nullopt;
        scale -= exp;
        i = s.size();
    }
    if (i != s.size()) return std::nullopt;
    // cpp_int reads a leading 0 as an octal prefix
    auto nonzero = digits.find_first_not_of('0');
    BigInt unscaled(nonzero == std::string::npos ? std::string("0") : digits.substr(nonzero));
    if (negative) unscaled = -unscaled;
    return Decimal(std::move(unscaled), scale);
}

Decimal Decimal::from_double(double v) {
    if (!std::isfinite(v)) throw std::domain_error("non-finite value has no decimal form");
    std::array<char, 512> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc()) throw std::domain_error("value too long for decimal form");
    return *parse(std::string_view(buf.data(), end - buf.data()));
}

BigInt Decimal::to_integer() const {
    if (!is_integer()) throw std::logic_error("decimal has a fractional part");
    return unscaled_;
}

double Decimal::to_double() const {
    return std::strtod(to_string().c_str(), nullptr);
}

std::string Decimal::to_string() const {
    std::string digits = (unscaled_ < 0 ? BigInt(-unscaled_) : unscaled_).str();
    std::string out = unscaled_ < 0 ? "-" : "";
    if (scale_ == 0) return out + digits;
    if (static_cast<int>(digits.size()) <= scale_)
        digits.insert(0, static_cast<std::size_t>(scale_) - digits.size() + 1, '0');
    digits.insert(digits.size() - static_cast<std::size_t>(scale_), 1, '.');
    return out + digits;
}

Decimal Decimal::operator*(const Decimal& rhs) const {
    return Decimal(unscaled_ * rhs.unscaled_, scale_ + rhs.scale_);
}

}  // namespace omld
