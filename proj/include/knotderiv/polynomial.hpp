#pragma once

#include <cctype>
#include <map>
#include <stdexcept>
#include <string>

namespace knotderiv {

// Sparse polynomial in u with nonnegative integer coefficients.  The constant
// term is a coloring count; each u^k term counts actions whose derivation set
// has k-1 elements.
struct DerivationPolynomial {
  std::map<int, long long> coeffs;  // exponent -> coefficient, zeros absent

  long long at(int k) const {
    auto it = coeffs.find(k);
    return it == coeffs.end() ? 0 : it->second;
  }

  void add(int k, long long v) {
    if (v == 0) return;
    auto [it, fresh] = coeffs.emplace(k, v);
    if (!fresh && (it->second += v) == 0) coeffs.erase(it);
  }

  // Ascending exponents, coefficient 1 left implicit on u-terms:
  // "45 + 176u + 45u^2 + 3u^6 + 15u^10".
  std::string str() const {
    if (coeffs.empty()) return "0";
    std::string out;
    for (const auto& [k, a] : coeffs) {
      if (!out.empty()) out += " + ";
      if (k == 0) {
        out += std::to_string(a);
        continue;
      }
      if (a != 1) out += std::to_string(a);
      out += 'u';
      if (k != 1) out += "^" + std::to_string(k);
    }
    return out;
  }

  friend bool operator==(const DerivationPolynomial& a, const DerivationPolynomial& b) = default;
};

// Inverse of str(); accepts optional whitespace and explicit 1-coefficients.
inline DerivationPolynomial parse_polynomial(const std::string& text) {
  DerivationPolynomial poly;
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  auto read_int = [&]() -> long long {
    long long v = 0;
    std::size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
      v = v * 10 + (text[i++] - '0');
    if (i == start) throw std::invalid_argument("expected a number in polynomial: " + text);
    return v;
  };
  skip_ws();
  if (i == text.size()) throw std::invalid_argument("empty polynomial text");
  bool first = true;
  while (i < text.size()) {
    if (!first) {
      if (text[i] != '+') throw std::invalid_argument("expected '+' in polynomial: " + text);
      ++i;
      skip_ws();
    }
    first = false;
    long long coeff = 1;
    bool have_coeff = i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]));
    if (have_coeff) coeff = read_int();
    int exp = 0;
    if (i < text.size() && (text[i] == 'u' || text[i] == 'U')) {
      ++i;
      exp = 1;
      if (i < text.size() && text[i] == '^') {
        ++i;
        exp = static_cast<int>(read_int());
      }
    } else if (!have_coeff) {
      throw std::invalid_argument("bad polynomial term in: " + text);
    }
    poly.add(exp, coeff);
    skip_ws();
  }
  return poly;
}

}  // namespace knotderiv
