#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>

namespace matcomp {

enum class FieldKind { prime, rational, real };

/// Runtime description of a scalar field, as read from a matrix file header.
struct FieldSpec {
  FieldKind kind = FieldKind::prime;
  std::uint64_t modulus = 2;  // prime fields only
  double tolerance = 0.0;     // real field only

  static FieldSpec gf(std::uint64_t p) { return {FieldKind::prime, p, 0.0}; }
  static FieldSpec rationals() { return {FieldKind::rational, 0, 0.0}; }
  static FieldSpec reals(double tol = 1e-9) { return {FieldKind::real, 0, tol}; }

  bool is_finite() const { return kind == FieldKind::prime; }

  friend bool operator==(const FieldSpec&, const FieldSpec&) = default;
};

class field_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

namespace detail {

// Elimination work counter. Kernels add the number of scalar updates they
// perform so callers can attribute linear-algebra cost to a scope.
inline std::uint64_t& op_counter() {
  thread_local std::uint64_t count = 0;
  return count;
}

inline std::string_view trim_ws(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace detail

/// GF(p) with p prime and p < 2^32, elements stored as residues in [0, p).
class PrimeField {
 public:
  using value_type = std::uint64_t;
  static constexpr bool finite = true;

  explicit PrimeField(std::uint64_t p = 2) : p_(p) {
    if (!is_prime(p)) throw field_error("modulus " + std::to_string(p) + " is not prime");
    if (p >= (std::uint64_t{1} << 32)) throw field_error("modulus must be below 2^32");
  }

  std::uint64_t modulus() const { return p_; }
  std::uint64_t order() const { return p_; }
  FieldSpec spec() const { return FieldSpec::gf(p_); }

  value_type zero() const { return 0; }
  value_type one() const { return 1; }
  /// The i-th element in enumeration order 0, 1, ..., p-1.
  value_type element(std::uint64_t i) const { return i % p_; }

  value_type from_int(long long v) const {
    const auto p = static_cast<long long>(p_);
    long long r = v % p;
    if (r < 0) r += p;
    return static_cast<value_type>(r);
  }

  value_type add(value_type a, value_type b) const {
    const value_type s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  value_type sub(value_type a, value_type b) const { return a >= b ? a - b : a + p_ - b; }
  value_type neg(value_type a) const { return a == 0 ? 0 : p_ - a; }
  value_type mul(value_type a, value_type b) const { return (a * b) % p_; }
  value_type inv(value_type a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    // Fermat: a^(p-2)
    value_type result = 1, base = a, e = p_ - 2;
    while (e) {
      if (e & 1) result = mul(result, base);
      base = mul(base, base);
      e >>= 1;
    }
    return result;
  }
  value_type div(value_type a, value_type b) const { return mul(a, inv(b)); }

  bool is_zero(value_type a) const { return a == 0; }
  bool equal(value_type a, value_type b) const { return a == b; }
  bool valid(value_type a) const { return a < p_; }
  /// Pivot preference; exact fields take the first nonzero candidate.
  bool better_pivot(value_type, value_type) const { return false; }

  std::optional<value_type> parse(std::string_view s) const {
    s = detail::trim_ws(s);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return from_int(v);
  }
  std::string format(value_type a) const { return std::to_string(a); }

 private:
  std::uint64_t p_;
};

/// The rationals, backed by arbitrary-precision integers.
class RationalField {
 public:
  using value_type = boost::multiprecision::cpp_rational;
  static constexpr bool finite = false;

  FieldSpec spec() const { return FieldSpec::rationals(); }

  value_type zero() const { return value_type(0); }
  value_type one() const { return value_type(1); }
  value_type from_int(long long v) const { return value_type(v); }

  value_type add(const value_type& a, const value_type& b) const { return a + b; }
  value_type sub(const value_type& a, const value_type& b) const { return a - b; }
  value_type neg(const value_type& a) const { return -a; }
  value_type mul(const value_type& a, const value_type& b) const { return a * b; }
  value_type inv(const value_type& a) const {
    if (a == 0) throw std::domain_error("inverse of zero");
    return value_type(1) / a;
  }
  value_type div(const value_type& a, const value_type& b) const { return a * inv(b); }

  bool is_zero(const value_type& a) const { return a == 0; }
  bool equal(const value_type& a, const value_type& b) const { return a == b; }
  bool valid(const value_type&) const { return true; }
  bool better_pivot(const value_type&, const value_type&) const { return false; }

  std::optional<value_type> parse(std::string_view s) const {
    s = detail::trim_ws(s);
    const auto slash = s.find('/');
    auto parse_int = [](std::string_view t) -> std::optional<boost::multiprecision::cpp_int> {
      if (t.empty()) return std::nullopt;
      std::size_t i = (t.front() == '-' || t.front() == '+') ? 1 : 0;
      if (i == t.size()) return std::nullopt;
      for (std::size_t j = i; j < t.size(); ++j)
        if (t[j] < '0' || t[j] > '9') return std::nullopt;
      boost::multiprecision::cpp_int v(std::string(t.substr(i)));
      return t.front() == '-' ? boost::multiprecision::cpp_int(-v) : v;
    };
    if (slash == std::string_view::npos) {
      auto n = parse_int(s);
      if (!n) return std::nullopt;
      return value_type(*n);
    }
    auto n = parse_int(s.substr(0, slash));
    auto d = parse_int(s.substr(slash + 1));
    if (!n || !d || *d == 0) return std::nullopt;
    return value_type(*n, *d);
  }
  std::string format(const value_type& a) const {
    if (boost::multiprecision::denominator(a) == 1)
      return boost::multiprecision::numerator(a).str();
    return boost::multiprecision::numerator(a).str() + "/" +
           boost::multiprecision::denominator(a).str();
  }
};

/// Doubles with an absolute zero tolerance. A convenience mode: rank and
/// membership decisions are only as good as the tolerance.
class RealField {
 public:
  using value_type = double;
  static constexpr bool finite = false;

  explicit RealField(double tolerance = 1e-9) : tol_(tolerance) {
    if (!(tolerance >= 0.0) || !std::isfinite(tolerance))
      throw field_error("tolerance must be a finite nonnegative number");
  }

  double tolerance() const { return tol_; }
  FieldSpec spec() const { return FieldSpec::reals(tol_); }

  value_type zero() const { return 0.0; }
  value_type one() const { return 1.0; }
  value_type from_int(long long v) const { return static_cast<double>(v); }

  value_type add(double a, double b) const { return a + b; }
  value_type sub(double a, double b) const { return a - b; }
  value_type neg(double a) const { return -a; }
  value_type mul(double a, double b) const { return a * b; }
  value_type inv(double a) const {
    if (is_zero(a)) throw std::domain_error("inverse of zero");
    return 1.0 / a;
  }
  value_type div(double a, double b) const { return a * inv(b); }

  bool is_zero(double a) const { return std::abs(a) <= tol_; }
  bool equal(double a, double b) const { return std::abs(a - b) <= tol_; }
  bool valid(double a) const { return std::isfinite(a); }
  bool better_pivot(double candidate, double current) const {
    return std::abs(candidate) > std::abs(current);
  }

  std::optional<value_type> parse(std::string_view s) const {
    s = detail::trim_ws(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
    return v;
  }
  std::string format(double a) const {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, a);
    return std::string(buf, ptr);
  }

 private:
  double tol_;
};

template <class F>
concept Field = requires(const F& f, const typename F::value_type& a, std::string_view s) {
  typename F::value_type;
  { F::finite } -> std::convertible_to<bool>;
  { f.zero() } -> std::convertible_to<typename F::value_type>;
  { f.one() } -> std::convertible_to<typename F::value_type>;
  { f.add(a, a) } -> std::convertible_to<typename F::value_type>;
  { f.sub(a, a) } -> std::convertible_to<typename F::value_type>;
  { f.mul(a, a) } -> std::convertible_to<typename F::value_type>;
  { f.neg(a) } -> std::convertible_to<typename F::value_type>;
  { f.inv(a) } -> std::convertible_to<typename F::value_type>;
  { f.is_zero(a) } -> std::convertible_to<bool>;
  { f.equal(a, a) } -> std::convertible_to<bool>;
  { f.better_pivot(a, a) } -> std::convertible_to<bool>;
  { f.parse(s) } -> std::same_as<std::optional<typename F::value_type>>;
  { f.format(a) } -> std::convertible_to<std::string>;
  { f.spec() } -> std::same_as<FieldSpec>;
};

template <class F>
concept FiniteField = Field<F> && F::finite && requires(const F& f, std::uint64_t i) {
  { f.order() } -> std::convertible_to<std::uint64_t>;
  { f.element(i) } -> std::convertible_to<typename F::value_type>;
};

/// Calls fn with a concrete field object built from spec.
template <class Fn>
decltype(auto) visit_field(const FieldSpec& spec, Fn&& fn) {
  switch (spec.kind) {
    case FieldKind::prime:
      return std::forward<Fn>(fn)(PrimeField(spec.modulus));
    case FieldKind::rational:
      return std::forward<Fn>(fn)(RationalField{});
    case FieldKind::real:
      return std::forward<Fn>(fn)(RealField(spec.tolerance));
  }
  throw field_error("unknown field kind");
}

}  // namespace matcomp
