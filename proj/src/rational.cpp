#include "pbsyn/rational.hpp"

#include <cctype>

namespace pbsyn {

std::string to_fraction_string(const Rational& r) {
    const BigInt num = numerator(r);
    const BigInt den = denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::string to_decimal_string(const Rational& r, unsigned digits) {
    BigInt num = numerator(r);
    BigInt den = denominator(r);
    const bool negative = num < 0;
    if (negative) num = -num;

    BigInt scale = 1;
    for (unsigned i = 0; i < digits; ++i) scale *= 10;

    // round(num * scale / den), half away from zero
    BigInt scaled = (num * scale * 2 + den) / (den * 2);
    BigInt whole = scaled / scale;
    BigInt frac = scaled % scale;

    std::string out = whole.str();
    if (digits > 0) {
        std::string f = frac.str();
        if (f.size() < digits) f.insert(0, digits - f.size(), '0');
        out += "." + f;
    }
    if (negative && (whole != 0 || frac != 0)) out.insert(0, 1, '-');
    return out;
}

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    const auto bad = [&] { return std::invalid_argument("malformed rational literal: '" + text + "'"); };

    auto is_int = [](const std::string& s) {
        if (s.empty()) return false;
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        if (i == s.size()) return false;
        for (; i < s.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        return true;
    };

    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const std::string num = text.substr(0, slash);
        const std::string den = text.substr(slash + 1);
        if (!is_int(num) || !is_int(den)) throw bad();
        BigInt d{den};
        if (d == 0) throw bad();
        return Rational(BigInt(num), d);
    }

    const auto dot = text.find('.');
    if (dot != std::string::npos) {
        const std::string whole = text.substr(0, dot);
        const std::string frac = text.substr(dot + 1);
        if (frac.empty() || !is_int(whole + (whole.empty() ? "0" : ""))) throw bad();
        for (char c : frac)
            if (!std::isdigit(static_cast<unsigned char>(c))) throw bad();
        const bool neg = !whole.empty() && whole[0] == '-';
        BigInt w{whole.empty() ? "0" : whole};
        if (neg) w = -w;
        BigInt scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        const Rational value = Rational(w) + Rational(BigInt(frac), scale);
        return neg ? -value : value;
    }

    if (!is_int(text)) throw bad();
    return Rational(BigInt(text));
}

}  // namespace pbsyn
