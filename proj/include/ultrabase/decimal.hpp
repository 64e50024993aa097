#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace ultrabase {

/**
 * Exact decimal number in canonical form, used to compare ingested distance
 * strings without going through binary floating point.
 *
 * A nonzero value is 0.d1d2...dk x 10^exponent with d1 != 0 and dk != 0.
 * Zero has empty digits. "1", "1.0", "10e-1" and "0.1e1" all normalize to the
 * same value.
 */
class Decimal {
  public:
    Decimal() = default;

    /// Parses [+|-]digits[.digits][(e|E)[+|-]digits]. Returns nullopt on anything else
    /// (including "nan", "inf", empty input and hex).
    static std::optional<Decimal> parse(std::string_view text) {
        Decimal out;
        std::size_t pos = 0;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            out.negative_ = text[pos] == '-';
            ++pos;
        }
        std::string mantissa;
        std::int64_t point_shift = 0; // digits before the decimal point
        bool seen_point = false;
        bool any_digit = false;
        for (; pos < text.size(); ++pos) {
            const char c = text[pos];
            if (c >= '0' && c <= '9') {
                any_digit = true;
                mantissa.push_back(c);
                if (!seen_point) {
                    ++point_shift;
                }
            } else if (c == '.' && !seen_point) {
                seen_point = true;
            } else {
                break;
            }
        }
        if (!any_digit) {
            return std::nullopt;
        }
        std::int64_t exp10 = 0;
        if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
            ++pos;
            bool exp_negative = false;
            if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
                exp_negative = text[pos] == '-';
                ++pos;
            }
            if (pos == text.size()) {
                return std::nullopt;
            }
            for (; pos < text.size(); ++pos) {
                const char c = text[pos];
                if (c < '0' || c > '9') {
                    return std::nullopt;
                }
                if (exp10 < 1'000'000'000) {
                    exp10 = exp10 * 10 + (c - '0');
                }
            }
            if (exp_negative) {
                exp10 = -exp10;
            }
        }
        if (pos != text.size()) {
            return std::nullopt;
        }

        std::size_t first = mantissa.find_first_not_of('0');
        if (first == std::string::npos) {
            out.negative_ = false;
            return out;
        }
        std::size_t last = mantissa.find_last_not_of('0');
        out.digits_ = mantissa.substr(first, last - first + 1);
        out.exponent_ = point_shift - static_cast<std::int64_t>(first) + exp10;
        return out;
    }

    /// Shortest text that round-trips the double.
    static std::string shortest_text(double value) {
        char buf[64];
        auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
        if (ec != std::errc{}) {
            return "nan";
        }
        return std::string(buf, end);
    }

    bool is_zero() const { return digits_.empty(); }
    bool is_negative() const { return negative_; }
    const std::string& digits() const { return digits_; }
    std::int64_t exponent() const { return exponent_; }

    double to_double() const {
        if (is_zero()) {
            return 0.0;
        }
        std::string text = (negative_ ? "-0." : "0.") + digits_ + "e" + std::to_string(exponent_);
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec == std::errc::result_out_of_range) {
            return exponent_ > 0 ? std::numeric_limits<double>::infinity() : 0.0;
        }
        return value;
    }

    friend bool operator==(const Decimal&, const Decimal&) = default;

    friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
        if (a.negative_ != b.negative_) {
            return a.negative_ ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        const auto magnitude = compare_magnitude(a, b);
        return a.negative_ ? 0 <=> magnitude : magnitude;
    }

  private:
    static std::strong_ordering compare_magnitude(const Decimal& a, const Decimal& b) {
        if (a.is_zero() || b.is_zero()) {
            return !a.is_zero() <=> !b.is_zero();
        }
        if (a.exponent_ != b.exponent_) {
            return a.exponent_ <=> b.exponent_;
        }
        const int c = a.digits_.compare(b.digits_);
        return c <=> 0;
    }

    bool negative_ = false;
    std::string digits_;
    std::int64_t exponent_ = 0;
};

} // namespace ultrabase
