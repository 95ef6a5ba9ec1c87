#pragma once

#include <cstdint>
#include <vector>

namespace bethe {

/// Finite field GF(q) with elements 0..q-1. Primes use modular arithmetic;
/// the prime powers 4, 8, 9, 16, 25 and 27 use fixed irreducible polynomials,
/// with element k read as the coefficient vector of k in base p.
class GaloisField {
 public:
  explicit GaloisField(int q);

  static bool supported(int q);

  int order() const { return q_; }
  int characteristic() const { return p_; }

  int add(int a, int b) const { return add_[index(a, b)]; }
  int sub(int a, int b) const { return add(a, neg(b)); }
  int mul(int a, int b) const { return mul_[index(a, b)]; }
  int neg(int a) const { return neg_[static_cast<std::size_t>(a)]; }
  /// Throws InputError for zero.
  int inv(int a) const;

  bool operator==(const GaloisField& o) const { return q_ == o.q_; }

 private:
  std::size_t index(int a, int b) const {
    return static_cast<std::size_t>(a) * static_cast<std::size_t>(q_) + static_cast<std::size_t>(b);
  }

  int q_;
  int p_;
  std::vector<int> add_;
  std::vector<int> mul_;
  std::vector<int> neg_;
  std::vector<int> inv_;
};

}  // namespace bethe
