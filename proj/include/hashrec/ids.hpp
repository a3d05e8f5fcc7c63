#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hashrec {

/// Dense integer handle for an interned entity. The tag keeps user, hashtag
/// and tweet ids from being mixed up at compile time.
template <typename Tag>
struct Id {
  std::uint32_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint32_t v) : value(v) {}

  friend constexpr auto operator<=>(Id, Id) = default;
};

using UserId = Id<struct UserTag>;
using HashtagId = Id<struct HashtagTag>;
using TweetId = Id<struct TweetTag>;

/// Seconds since the unix epoch.
using Timestamp = std::int64_t;

inline constexpr double kSecondsPerHour = 3600.0;

/// Bijective string <-> dense id table.
template <typename IdT>
class Interner {
 public:
  IdT intern(std::string_view name) {
    auto it = index_.find(std::string(name));
    if (it != index_.end()) return it->second;
    IdT id(static_cast<std::uint32_t>(names_.size()));
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
  }

  [[nodiscard]] const IdT* find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &it->second;
  }

  [[nodiscard]] IdT at(std::string_view name) const {
    if (const IdT* id = find(name)) return *id;
    throw std::out_of_range("unknown identifier: " + std::string(name));
  }

  [[nodiscard]] const std::string& name(IdT id) const { return names_.at(id.value); }
  [[nodiscard]] std::size_t size() const { return names_.size(); }
  [[nodiscard]] const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, IdT> index_;
};

}  // namespace hashrec

template <typename Tag>
struct std::hash<hashrec::Id<Tag>> {
  std::size_t operator()(hashrec::Id<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};
