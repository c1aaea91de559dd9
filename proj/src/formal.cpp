#include "fqortho/formal.hpp"

#include <bit>

namespace fqo {

int letter_count(int n) { return n << n; }

unsigned iota_code(int n, unsigned iota) {
  unsigned code = 0;
  for (int h = 1; h <= n; ++h)
    if (iota & (1u << (h - 1))) code |= 1u << (n - h);
  return code;
}

unsigned iota_from_code(int n, unsigned code) { return iota_code(n, code); }

int letter_index(int n, int j, unsigned iota) {
  if (j < 1 || j > n || iota >= (1u << n)) fail("BadShape", "letter outside the alphabet");
  return ((j - 1) << n) + static_cast<int>(iota_code(n, iota));
}

int letter_generator(int n, int letter) { return (letter >> n) + 1; }

unsigned letter_iota(int n, int letter) {
  return iota_from_code(n, static_cast<unsigned>(letter) & ((1u << n) - 1));
}

std::string mask_bits(int n, unsigned mask) {
  std::string s;
  for (int h = 1; h <= n; ++h) s.push_back(mask & (1u << (h - 1)) ? '1' : '0');
  return s;
}

unsigned parse_mask_bits(int n, std::string_view bits) {
  if (static_cast<int>(bits.size()) != n) fail("BadInput", "mask must have n binary digits", ErrorClass::input);
  unsigned mask = 0;
  for (int h = 1; h <= n; ++h) {
    char c = bits[h - 1];
    if (c == '1')
      mask |= 1u << (h - 1);
    else if (c != '0')
      fail("BadInput", "mask must consist of 0 and 1", ErrorClass::input);
  }
  return mask;
}

int blade_product_sign(unsigned a, unsigned b) {
  int swaps = std::popcount(a & b);
  for (unsigned rest = b; rest; rest &= rest - 1) {
    unsigned low = rest & (~rest + 1);
    swaps += std::popcount(a & ~((low << 1) - 1));
  }
  return swaps & 1 ? -1 : 1;
}

Word Word::make(int n, const std::vector<int>& letters, unsigned qmask) {
  if (n < 1 || n > kMaxFormalN) fail("BadShape", "formal n must lie in 1..4");
  if (static_cast<int>(letters.size()) > kMaxFormalDegree) fail("BadShape", "word longer than 8 letters");
  std::uint64_t key = static_cast<std::uint64_t>(letters.size()) << 60;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    if (letters[i] < 0 || letters[i] >= letter_count(n)) fail("BadShape", "letter outside the alphabet");
    key |= static_cast<std::uint64_t>(letters[i]) << (54 - 6 * i);
  }
  key |= static_cast<std::uint64_t>(n) << 4;
  key |= qmask & ((1u << n) - 1);
  return from_key(key);
}

std::vector<int> Word::letters() const {
  std::vector<int> out;
  for (int i = 0; i < degree(); ++i) out.push_back(letter(i));
  return out;
}

std::string Word::to_string() const {
  std::string s;
  for (int i = 0; i < degree(); ++i) {
    int l = letter(i);
    s += "r" + std::to_string(letter_generator(n(), l)) + "," + mask_bits(n(), letter_iota(n(), l)) + " ";
  }
  s += "Q" + mask_bits(n(), qmask());
  return s;
}

std::pair<int, Word> mono_mul(const Word& a, const Word& b) {
  const int n = a.n();
  const int da = a.degree(), db = b.degree();
  if (da + db > kMaxFormalDegree) fail("BadShape", "product exceeds the word length limit");
  unsigned ka = a.qmask();
  int flips = 0;
  std::uint64_t key = static_cast<std::uint64_t>(da + db) << 60;
  for (int i = 0; i < da; ++i) key |= static_cast<std::uint64_t>(a.letter(i)) << (54 - 6 * i);
  for (int i = 0; i < db; ++i) {
    int l = b.letter(i);
    flips += std::popcount(ka & letter_iota(n, l));
    key |= static_cast<std::uint64_t>(l) << (54 - 6 * (da + i));
  }
  key |= static_cast<std::uint64_t>(n) << 4;
  key |= ka ^ b.qmask();
  int sign = (flips & 1 ? -1 : 1) * blade_product_sign(ka, b.qmask());
  return {sign, Word::from_key(key)};
}

int blade_conjugation_sign(const Word& w, unsigned kappa) {
  int flips = 0;
  for (int i = 0; i < w.degree(); ++i) flips += std::popcount(kappa & letter_iota(w.n(), w.letter(i)));
  unsigned kw = w.qmask();
  flips += std::popcount(kappa) * std::popcount(kw) - std::popcount(kappa & kw);
  return flips & 1 ? -1 : 1;
}

}  // namespace fqo
