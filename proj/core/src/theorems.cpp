#include "obskernel/theorems.hpp"

#include <algorithm>
#include <functional>
#include <random>

#include "obskernel/funalg.hpp"

namespace obskernel {

bool SuiteReport::ok() const {
  return std::all_of(theorems.begin(), theorems.end(), [](const TheoremTally& t) { return t.failed == 0; });
}

namespace {

/// One random environment: roles are dealt out of a shuffled symbol pool.
class Environment {
 public:
  explicit Environment(std::mt19937_64& rng) : rng_(rng) {
    std::vector<std::string> pool{"p", "q", "r", "s", "t", "w", "x", "y", "z", "a", "b", "c"};
    std::shuffle(pool.begin(), pool.end(), rng_);
    for (std::size_t i = 0; i < 4; ++i) free_.push_back(sym(pool[i]));
    for (std::size_t i = 4; i < 7; ++i) uns_.push_back(sym(pool[i]));
    for (std::size_t i = 7; i < 10; ++i) cst_.push_back(sym(pool[i]));
    std::vector<std::string> heads{"f", "g", "h", "F", "G"};
    std::shuffle(heads.begin(), heads.end(), rng_);
    freeHead_ = sym(heads[0]);
    cstHead_ = sym(heads[1]);

    session_.install(funalgPack());
    session_.install(perturbPack());
    for (const auto& u : uns_) session_.assertFact(element(u, sym("Uns")));
    for (const auto& c : cst_) session_.assertFact(element(c, sym("Cst")));
    session_.assertFact(element(cstHead_, sym("Cst")));

    switch (pick(4)) {
      case 0: eps_ = sym("eps"); break;
      case 1: eps_ = num(0); break;
      case 2: eps_ = num(1); break;
      default: eps_ = Expr::rational(static_cast<long long>(1 + pick(8)), 9); break;
    }
  }

  Session& session() { return session_; }
  const Expr& eps() const { return eps_; }
  const Expr& freeHead() const { return freeHead_; }
  const Expr& cstHead() const { return cstHead_; }

  Expr freeOperand() {
    const Expr& a = any(free_);
    switch (pick(5)) {
      case 0: return a;
      case 1: return plus({a, any(cst_)});
      case 2: return times({num(static_cast<long long>(2 + pick(4))), a});
      case 3: return call(freeHead_, {a});
      default: return power(a, num(2));
    }
  }

  Expr unsOperand() {
    const Expr& u = any(uns_);
    switch (pick(4)) {
      case 0: return u;
      case 1: return times({any(cst_), u});
      case 2: return plus({u, any(uns_)});
      default: return plus({u, any(cst_)});
    }
  }

  Expr cstOperand() {
    const Expr& c = any(cst_);
    switch (pick(5)) {
      case 0: return c;
      case 1: return plus({c, num(2)});
      case 2: return times({c, any(cst_)});
      case 3: return call(cstHead_, {c});
      default: return num(static_cast<long long>(1 + pick(9)));
    }
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  const Expr& any(const std::vector<Expr>& v) { return v[pick(v.size())]; }

  std::mt19937_64& rng_;
  Session session_;
  std::vector<Expr> free_, uns_, cst_;
  Expr freeHead_, cstHead_, eps_;
};

using Theorem = std::function<TheoremCheck(Environment&)>;

Expr star(const Expr& e, const Expr& x) { return call("Star", {e, x}); }
Expr delta(const Expr& e, const Expr& x) { return call("Delta", {e, x}); }

TheoremCheck membership(Session& s, const Expr& x, const char* set) {
  TheoremCheck t;
  t.lhs = element(x, sym(set));
  t.rhs = trueExpr();
  t.holds = s.facts().member(x, sym(set));
  t.difference = t.holds ? num(0) : t.lhs;
  return t;
}

const std::vector<std::pair<std::string, Theorem>>& theorems() {
  static const std::vector<std::pair<std::string, Theorem>> list{
      {"product rule",
       [](Environment& env) {
         Expr y = env.freeOperand(), x = env.freeOperand();
         return checkProductRule(env.session(), y, x, env.eps());
       }},
      {"unshielded product",
       [](Environment& env) {
         Expr y = env.unsOperand(), x = env.unsOperand();
         return checkUnshieldedProduct(env.session(), y, x, env.eps());
       }},
      {"chain rule",
       [](Environment& env) {
         return checkChainRule(env.session(), env.freeHead(), env.freeOperand(), env.eps());
       }},
      {"constant head",
       [](Environment& env) {
         return checkConstantHead(env.session(), env.cstHead(), env.freeOperand(), env.eps());
       }},
      {"star commutes with constant heads",
       [](Environment& env) {
         Expr x = env.freeOperand();
         const Expr& h = env.cstHead();
         return checkIdentity(env.session(), star(env.eps(), call(h, {x})), call(h, {star(env.eps(), x)}));
       }},
      {"delta linear over Cst",
       [](Environment& env) {
         Expr c = env.cstOperand(), d = env.cstOperand(), x = env.freeOperand(), y = env.freeOperand();
         const Expr& e = env.eps();
         return checkIdentity(env.session(), delta(e, plus({times({c, x}), times({d, y})})),
                              plus({times({c, delta(e, x)}), times({d, delta(e, y)})}));
       }},
      {"star linear over Cst",
       [](Environment& env) {
         Expr c = env.cstOperand(), x = env.freeOperand(), y = env.freeOperand();
         const Expr& e = env.eps();
         return checkIdentity(env.session(), star(e, plus({times({c, x}), y})),
                              plus({times({c, star(e, x)}), star(e, y)}));
       }},
      {"Cst kernel",
       [](Environment& env) {
         return checkIdentity(env.session(), delta(env.eps(), env.cstOperand()), num(0));
       }},
      {"Cst closure",
       [](Environment& env) {
         Expr c = env.cstOperand(), d = env.cstOperand();
         Expr composite = plus({call(env.cstHead(), {c}), times({d, power(c, num(2))})});
         return membership(env.session(), composite, "Cst");
       }},
      {"Cst inside Uns",
       [](Environment& env) { return membership(env.session(), env.cstOperand(), "Uns"); }},
  };
  return list;
}

}  // namespace

SuiteReport runTheoremSuite(std::size_t environments, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SuiteReport report;
  report.environments = environments;
  report.seed = seed;
  for (const auto& [name, _] : theorems()) report.theorems.push_back(TheoremTally{name, 0, 0, {}});
  for (std::size_t i = 0; i < environments; ++i) {
    Environment env(rng);
    for (std::size_t k = 0; k < theorems().size(); ++k) {
      TheoremTally& tally = report.theorems[k];
      TheoremCheck check;
      try {
        check = theorems()[k].second(env);
      } catch (const Error& e) {
        check.holds = false;
        check.difference = sym(e.what());
      }
      ++tally.checked;
      if (!check.holds) {
        ++tally.failed;
        if (!tally.firstFailure) tally.firstFailure = check;
      }
    }
  }
  return report;
}

}  // namespace obskernel
