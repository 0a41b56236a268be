#include "obskernel/funalg.hpp"

#include <algorithm>

#include "obskernel/canonical.hpp"

namespace obskernel {

namespace {

std::optional<std::size_t> slotIndex(const Expr& e) {
  if (!e.hasHead("Slot", 1) || !e.arg(0).isInteger()) return std::nullopt;
  const Exact& v = e.arg(0).exactValue();
  if (v < 1) return std::nullopt;
  return v.convert_to<std::size_t>();
}

Expr fillSlots(const Expr& e, std::span<const Expr> args) {
  if (auto k = slotIndex(e)) {
    if (*k > args.size())
      throw ArityError("slot #" + std::to_string(*k) + " but only " + std::to_string(args.size()) +
                       " argument(s)");
    return args[*k - 1];
  }
  if (e.isAtom() || e.hasHead("Function")) return e;
  Expr head = fillSlots(e.head(), args);
  std::vector<Expr> out;
  out.reserve(e.size());
  for (const auto& a : e.args()) out.push_back(fillSlots(a, args));
  return Expr::compound(std::move(head), std::move(out));
}

std::vector<Expr> parameters(const Expr& spec) {
  if (spec.isSymbol()) return {spec};
  if (spec.hasHead("List")) {
    std::vector<Expr> out(spec.args().begin(), spec.args().end());
    for (const auto& p : out)
      if (!p.isSymbol()) throw ArityError("function parameters must be symbols");
    return out;
  }
  throw ArityError("function parameters must be a symbol or a list of symbols");
}

Expr fillNamed(const Expr& e, const Bindings& b) {
  if (e.isSymbol()) {
    auto it = b.find(e.name());
    return it == b.end() ? e : it->second;
  }
  if (e.isAtom()) return e;
  if (e.hasHead("Function", 2)) {
    // Inner parameters shadow outer ones.
    Bindings inner = b;
    for (const auto& p : parameters(e.arg(0))) inner.erase(p.name());
    return call("Function", {e.arg(0), fillNamed(e.arg(1), inner)});
  }
  Expr head = fillNamed(e.head(), b);
  std::vector<Expr> out;
  for (const auto& a : e.args()) out.push_back(fillNamed(a, b));
  return Expr::compound(std::move(head), std::move(out));
}

Rule rule(const std::string& text) { return Rule::parse(text); }

std::string replaceField(std::string text, const std::string& field) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '@' && i + 1 < text.size() && text[i + 1] == 'K') {
      out += field;
      ++i;
    } else {
      out += text[i];
    }
  }
  return out;
}

}  // namespace

std::size_t slotArity(const Expr& body) {
  if (auto k = slotIndex(body)) return *k;
  if (body.isAtom() || body.hasHead("Function")) return 0;
  std::size_t m = slotArity(body.head());
  for (const auto& a : body.args()) m = std::max(m, slotArity(a));
  return m;
}

Expr applyFunction(const Expr& function, std::span<const Expr> args) {
  if (function.hasHead("Function", 1)) {
    std::size_t arity = slotArity(function.arg(0));
    if (args.size() < arity)
      throw ArityError("function of arity " + std::to_string(arity) + " applied to " +
                       std::to_string(args.size()) + " argument(s)");
    return fillSlots(function.arg(0), args);
  }
  if (function.hasHead("Function", 2)) {
    auto params = parameters(function.arg(0));
    if (args.size() < params.size())
      throw ArityError("function of arity " + std::to_string(params.size()) + " applied to " +
                       std::to_string(args.size()) + " argument(s)");
    Bindings b;
    for (std::size_t i = 0; i < params.size(); ++i) b[params[i].name()] = args[i];
    return fillNamed(function.arg(1), b);
  }
  throw ArityError("not a function: head " + std::string(function.isCompound() ? "compound" : "atom"));
}

Expr apply(Session& s, const Expr& function, const std::vector<Expr>& args) {
  return s.evaluate(call(function, args));
}

Pack funalgPack(const std::string& field) {
  Pack p;
  p.name = "funalg";
  for (const char* text : {
           "(f_+g_)[x_] -> f[x]+g[x]",
           "(f_*g_)[x_] -> f[x]*g[x]",
           "(f_+g_)[x_, y_] -> f[x, y]+g[x, y]",
           "(f_*g_)[x_, y_] -> f[x, y]*g[x, y]",
           "Circle[f_, g_][x_] -> f[g[x]]",
           "f_[_] /; Element[f, @K] -> f",
           "Subtract[x_, y_] -> x+(-1)*y",
       })
    p.rules.emplace_back(rule(replaceField(text, field)));
  p.facts.push_back(element(num(-1), sym(field)));
  return p;
}

Pack linearPack(const std::string& field) {
  Pack p;
  p.name = "linear[" + field + "]";
  for (const char* text : {
           "f_[a_+b_] /; Element[f, LFs[@K]] -> f[a]+f[b]",
           "f_[l_*r_] /; And[Element[f, LFs[@K]], Element[l, @K]] -> l*f[r]",
           "f_[l_] /; And[Element[f, LFs[@K]], Element[l, @K], UnsameQ[l, 1]] -> l*f[1]",
       })
    p.rules.emplace_back(rule(replaceField(text, field)));
  for (long long v : {0, 1, -1}) p.facts.push_back(element(num(v), sym(field)));
  return p;
}

Pack expandPack() {
  Pack p;
  p.name = "expand";
  auto expander = [](Context&, const Expr& e) -> std::optional<Expr> { return expand(e); };
  p.rules.emplace_back(NativeRule{"expand products", "Times", expander});
  p.rules.emplace_back(NativeRule{"expand powers", "Power", expander});
  return p;
}

}  // namespace obskernel
