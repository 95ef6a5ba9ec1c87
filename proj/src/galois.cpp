#include "bethe/galois.hpp"

#include <string>

#include "bethe/errors.hpp"

namespace bethe {

namespace {

bool is_prime(int n) {
  if (n < 2) return false;
  for (int d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

struct Extension {
  int q;
  int p;
  int degree;
  std::vector<int> modulus;  // monic, low-order coefficients first, leading term omitted
};

// x^2+x+1, x^3+x+1, x^4+x+1, x^2+1, x^2+2, x^3+2x+1.
const std::vector<Extension>& extensions() {
  static const std::vector<Extension> table = {
      {4, 2, 2, {1, 1}},    {8, 2, 3, {1, 1, 0}}, {16, 2, 4, {1, 1, 0, 0}},
      {9, 3, 2, {1, 0}},    {25, 5, 2, {2, 0}},   {27, 3, 3, {1, 2, 0}},
  };
  return table;
}

std::vector<int> digits(int a, int p, int degree) {
  std::vector<int> d(static_cast<std::size_t>(degree));
  for (int k = 0; k < degree; ++k, a /= p) d[static_cast<std::size_t>(k)] = a % p;
  return d;
}

int from_digits(const std::vector<int>& d, int p) {
  int a = 0;
  for (std::size_t k = d.size(); k-- > 0;) a = a * p + d[k];
  return a;
}

int poly_mul(int a, int b, const Extension& ext) {
  const int p = ext.p;
  const int n = ext.degree;
  std::vector<int> prod(static_cast<std::size_t>(2 * n - 1), 0);
  const auto da = digits(a, p, n);
  const auto db = digits(b, p, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      prod[static_cast<std::size_t>(i + j)] =
          (prod[static_cast<std::size_t>(i + j)] + da[static_cast<std::size_t>(i)] * db[static_cast<std::size_t>(j)]) % p;
  // x^n = -(modulus)
  for (int k = 2 * n - 2; k >= n; --k) {
    const int c = prod[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    prod[static_cast<std::size_t>(k)] = 0;
    for (int j = 0; j < n; ++j) {
      auto& t = prod[static_cast<std::size_t>(k - n + j)];
      t = ((t - c * ext.modulus[static_cast<std::size_t>(j)]) % p + p) % p;
    }
  }
  prod.resize(static_cast<std::size_t>(n));
  return from_digits(prod, p);
}

}  // namespace

bool GaloisField::supported(int q) {
  if (is_prime(q)) return true;
  for (const auto& e : extensions())
    if (e.q == q) return true;
  return false;
}

GaloisField::GaloisField(int q) : q_(q), p_(q) {
  if (!supported(q))
    throw InputError("GF(" + std::to_string(q) + ") is not supported; use a prime or one of 4, 8, 9, 16, 25, 27");
  const std::size_t n = static_cast<std::size_t>(q) * static_cast<std::size_t>(q);
  add_.resize(n);
  mul_.resize(n);
  neg_.resize(static_cast<std::size_t>(q));
  inv_.assign(static_cast<std::size_t>(q), 0);

  const Extension* ext = nullptr;
  for (const auto& e : extensions())
    if (e.q == q) ext = &e;

  if (ext == nullptr) {
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b) {
        add_[index(a, b)] = (a + b) % q;
        mul_[index(a, b)] = static_cast<int>((static_cast<long long>(a) * b) % q);
      }
  } else {
    p_ = ext->p;
    for (int a = 0; a < q; ++a) {
      const auto da = digits(a, p_, ext->degree);
      for (int b = 0; b < q; ++b) {
        auto db = digits(b, p_, ext->degree);
        for (std::size_t k = 0; k < db.size(); ++k) db[k] = (da[k] + db[k]) % p_;
        add_[index(a, b)] = from_digits(db, p_);
        mul_[index(a, b)] = poly_mul(a, b, *ext);
      }
    }
  }
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) {
      if (add_[index(a, b)] == 0) neg_[static_cast<std::size_t>(a)] = b;
      if (mul_[index(a, b)] == 1) inv_[static_cast<std::size_t>(a)] = b;
    }
}

int GaloisField::inv(int a) const {
  if (a == 0) throw InputError("GF(q): zero has no inverse");
  return inv_[static_cast<std::size_t>(a)];
}

}  // namespace bethe
