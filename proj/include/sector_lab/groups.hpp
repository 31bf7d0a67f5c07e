#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sector_lab/error.hpp"
#include "sector_lab/finite_group.hpp"
#include "sector_lab/words.hpp"

namespace sector_lab {

/// Canonical normal form; two elements of one backend are equal iff their
/// normal forms are equal.
///   free:          reduced word letters
///   free-abelian:  exponent vector
///   cyclic-n:      {residue}
///   finite:        {table index}
struct GroupElement {
  std::vector<std::int64_t> nf;

  bool operator==(const GroupElement&) const = default;
  auto operator<=>(const GroupElement&) const = default;
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& e) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : e.nf) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

enum class BackendKind { free, free_abelian, cyclic, finite };

/// Word-problem service for the group classes the library supports.
class GroupBackend {
 public:
  static GroupBackend free(std::vector<std::string> names) {
    return GroupBackend(BackendKind::free, std::move(names), 0, nullptr);
  }
  static GroupBackend free_abelian(std::vector<std::string> names) {
    return GroupBackend(BackendKind::free_abelian, std::move(names), 0, nullptr);
  }
  static GroupBackend cyclic(std::string name, int n) {
    if (n < 1) fail(ErrorCode::invalid_parameter, "cyclic order must be >= 1");
    auto g = std::make_shared<const FiniteGroup>(FiniteGroup::cyclic(n, name));
    return GroupBackend(BackendKind::cyclic, {std::move(name)}, n, std::move(g));
  }
  static GroupBackend finite(FiniteGroup group) {
    auto names = group.generator_names();
    int n = group.order();
    return GroupBackend(BackendKind::finite, std::move(names), n,
                        std::make_shared<const FiniteGroup>(std::move(group)));
  }

  BackendKind kind() const { return kind_; }
  int rank() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& generator_names() const { return names_; }

  std::string tag() const {
    switch (kind_) {
      case BackendKind::free: return "free";
      case BackendKind::free_abelian: return "free-abelian";
      case BackendKind::cyclic: return "cyclic-" + std::to_string(modulus_);
      case BackendKind::finite: return "finite";
    }
    return "unknown";
  }

  bool is_finite() const { return kind_ == BackendKind::cyclic || kind_ == BackendKind::finite; }

  std::optional<std::size_t> order() const {
    if (is_finite()) return static_cast<std::size_t>(finite_->order());
    if (rank() == 0) return 1;
    return std::nullopt;
  }

  bool is_abelian() const {
    switch (kind_) {
      case BackendKind::free: return rank() <= 1;
      case BackendKind::free_abelian:
      case BackendKind::cyclic: return true;
      case BackendKind::finite: return finite_->is_abelian();
    }
    return false;
  }

  /// Table view of a finite (or cyclic) backend.
  const FiniteGroup& finite_group() const {
    if (!finite_) fail(ErrorCode::backend_unavailable, tag() + " backend has no multiplication table");
    return *finite_;
  }

  GroupElement identity() const {
    switch (kind_) {
      case BackendKind::free: return {};
      case BackendKind::free_abelian: return {std::vector<std::int64_t>(names_.size(), 0)};
      case BackendKind::cyclic:
      case BackendKind::finite: return {{0}};
    }
    return {};
  }

  GroupElement generator(int i) const { return reduce(Word{letter_of(i)}); }

  GroupElement reduce(const Word& w) const {
    for (int l : w)
      if (l == 0 || letter_generator(l) >= rank())
        fail(ErrorCode::invalid_parameter, "word uses an undeclared generator");
    switch (kind_) {
      case BackendKind::free: {
        Word r = free_reduce(w);
        return {std::vector<std::int64_t>(r.begin(), r.end())};
      }
      case BackendKind::free_abelian: {
        auto sums = exponent_sums(w, rank());
        return {std::vector<std::int64_t>(sums.begin(), sums.end())};
      }
      case BackendKind::cyclic: {
        long s = 0;
        for (int l : w) s += l > 0 ? 1 : -1;
        return {{((s % modulus_) + modulus_) % modulus_}};
      }
      case BackendKind::finite: return {{finite_->evaluate(w)}};
    }
    return {};
  }

  GroupElement multiply(const GroupElement& a, const GroupElement& b) const {
    switch (kind_) {
      case BackendKind::free: {
        std::vector<std::int64_t> out = a.nf;
        for (auto l : b.nf) {
          if (!out.empty() && out.back() == -l) {
            out.pop_back();
          } else {
            out.push_back(l);
          }
        }
        return {std::move(out)};
      }
      case BackendKind::free_abelian: {
        GroupElement out = a;
        for (std::size_t i = 0; i < out.nf.size(); ++i) out.nf[i] += b.nf[i];
        return out;
      }
      case BackendKind::cyclic: return {{(a.nf[0] + b.nf[0]) % modulus_}};
      case BackendKind::finite: return {{finite_->mul(static_cast<int>(a.nf[0]), static_cast<int>(b.nf[0]))}};
    }
    return {};
  }

  GroupElement inverse(const GroupElement& a) const {
    switch (kind_) {
      case BackendKind::free: {
        std::vector<std::int64_t> out(a.nf.rbegin(), a.nf.rend());
        for (auto& l : out) l = -l;
        return {std::move(out)};
      }
      case BackendKind::free_abelian: {
        GroupElement out = a;
        for (auto& v : out.nf) v = -v;
        return out;
      }
      case BackendKind::cyclic: return {{(modulus_ - a.nf[0]) % modulus_}};
      case BackendKind::finite: return {{finite_->inverse(static_cast<int>(a.nf[0]))}};
    }
    return {};
  }

  bool is_identity(const GroupElement& a) const { return a == identity(); }

  /// A word representing the element (the normal form itself where possible).
  Word word_of(const GroupElement& a) const {
    switch (kind_) {
      case BackendKind::free: return Word(a.nf.begin(), a.nf.end());
      case BackendKind::free_abelian: {
        Word w;
        for (int i = 0; i < rank(); ++i) {
          auto e = a.nf[static_cast<std::size_t>(i)];
          for (std::int64_t k = 0; k < (e < 0 ? -e : e); ++k) w.push_back(letter_of(i, e < 0));
        }
        return w;
      }
      case BackendKind::cyclic:
        return Word(static_cast<std::size_t>(a.nf[0]), 1);
      case BackendKind::finite: return finite_->word_of(static_cast<int>(a.nf[0]));
    }
    return {};
  }

  /// Index of a finite-backend element in its multiplication table.
  int index_of(const GroupElement& a) const {
    if (!is_finite()) fail(ErrorCode::backend_unavailable, "element index requires a finite backend");
    return static_cast<int>(a.nf[0]);
  }
  GroupElement element(int index) const {
    if (!is_finite()) fail(ErrorCode::backend_unavailable, "element index requires a finite backend");
    return {{index}};
  }

  std::string format(const GroupElement& a) const {
    if (kind_ == BackendKind::finite) return "#" + std::to_string(a.nf[0]) + "=" + format_word(word_of(a), names_);
    return format_word(word_of(a), names_);
  }

 private:
  GroupBackend(BackendKind kind, std::vector<std::string> names, int modulus,
               std::shared_ptr<const FiniteGroup> finite)
      : kind_(kind), names_(std::move(names)), modulus_(modulus), finite_(std::move(finite)) {}

  BackendKind kind_;
  std::vector<std::string> names_;
  std::int64_t modulus_;
  std::shared_ptr<const FiniteGroup> finite_;
};

}  // namespace sector_lab
