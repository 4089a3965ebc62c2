#pragma once

#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

namespace navarena {

/// Typed access to one INI section that rejects keys nobody asked for.
template <typename Error>
class IniSection {
 public:
  IniSection(std::string name, const boost::property_tree::ptree& tree) : name_(std::move(name)), tree_(tree) {}

  template <typename T>
  void get(const std::string& key, T& value) {
    used_.insert(key);
    const auto child = tree_.get_child_optional(boost::property_tree::ptree::path_type(key, '\0'));
    if (!child) return;
    const auto v = child->get_value_optional<T>();
    if (!v) throw Error(fmt::format("[{}] {}: bad value '{}'", name_, key, child->data()));
    value = *v;
  }

  std::optional<std::vector<double>> numbers(const std::string& key, std::size_t count) {
    used_.insert(key);
    const auto child = tree_.get_child_optional(boost::property_tree::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    std::istringstream in(child->data());
    std::vector<double> out;
    double x = 0.0;
    while (in >> x) out.push_back(x);
    if (!in.eof() || out.size() != count) {
      throw Error(fmt::format("[{}] {}: expected {} numbers, got '{}'", name_, key, count,
                                         child->data()));
    }
    return out;
  }

  std::optional<std::string> text(const std::string& key) {
    used_.insert(key);
    const auto child = tree_.get_child_optional(boost::property_tree::ptree::path_type(key, '\0'));
    if (!child) return std::nullopt;
    return child->data();
  }

  void reject_unknown() const {
    for (const auto& [key, _] : tree_) {
      if (!used_.count(key)) throw Error(fmt::format("[{}] unknown key '{}'", name_, key));
    }
  }

 private:
  std::string name_;
  const boost::property_tree::ptree& tree_;
  std::set<std::string> used_;
};

}  // namespace navarena
