#include "obskernel/facts.hpp"

#include <algorithm>

namespace obskernel {

namespace {
// Inference descends into subterms; this only guards against pathological rule sets.
constexpr int kMaxInferenceDepth = 64;
}  // namespace

void FactBase::add(const Expr& fact) {
  if (index_.insert(fact).second) facts_.push_back(fact);
}

void FactBase::addInference(std::string name, InferenceRule rule) {
  for (const auto& [n, _] : rules_)
    if (n == name) return;
  rules_.emplace_back(std::move(name), std::move(rule));
}

bool FactBase::contains(const Expr& fact) const { return index_.count(fact) > 0; }

bool FactBase::member(const Expr& x, const Expr& set) const {
  if (contains(element(x, set))) return true;
  if (depth_ >= kMaxInferenceDepth) return false;
  ++depth_;
  bool found = false;
  try {
    found = std::any_of(rules_.begin(), rules_.end(),
                        [&](const auto& r) { return r.second(*this, x, set); });
  } catch (...) {
    --depth_;
    throw;
  }
  --depth_;
  return found;
}

bool FactBase::identical(const Expr& a, const Expr& b) const {
  return contains(call("Equal", {a, b})) || contains(call("Equal", {b, a}));
}

std::vector<Expr> FactBase::setsOf(const Expr& x) const {
  std::vector<Expr> out;
  for (const auto& f : facts_)
    if (f.hasHead("Element", 2) && f.arg(0) == x) out.push_back(f.arg(1));
  return out;
}

std::vector<std::pair<Expr, Expr>> FactBase::identities() const {
  std::vector<std::pair<Expr, Expr>> out;
  for (const auto& f : facts_)
    if (f.hasHead("Equal", 2)) out.emplace_back(f.arg(0), f.arg(1));
  return out;
}

}  // namespace obskernel
