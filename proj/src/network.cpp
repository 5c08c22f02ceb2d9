#include "rdeed/network.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace rdeed {

namespace {

bool valid_coefficient(double x) { return std::isfinite(x) && (x == 0.0 || x >= 1.0); }

std::string fmt_number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

ReactionNetwork::ReactionNetwork(std::vector<std::string> species, std::vector<Reaction> reactions,
                                 Vec diffusion)
    : species_(std::move(species)), reactions_(std::move(reactions)), diffusion_(std::move(diffusion)) {
  const int I = num_species();
  if (diffusion_.size() != I) throw Error("diffusion vector has wrong length");
  for (int i = 0; i < I; ++i) {
    if (!(diffusion_[i] > 0.0) || !std::isfinite(diffusion_[i]))
      throw Error("nonpositive diffusion coefficient for species " + species_[i]);
  }
  for (std::size_t r = 0; r < reactions_.size(); ++r) {
    const Reaction& rx = reactions_[r];
    if (rx.alpha.size() != I || rx.beta.size() != I)
      throw Error("reaction " + std::to_string(r) + " has wrong stoichiometry length");
    for (int i = 0; i < I; ++i) {
      if (!valid_coefficient(rx.alpha[i]) || !valid_coefficient(rx.beta[i]))
        throw Error("stoichiometric coefficient must be 0 or >= 1 (reaction " + std::to_string(r) + ")");
    }
    if (!(rx.kf > 0.0) || !(rx.kb > 0.0) || !std::isfinite(rx.kf) || !std::isfinite(rx.kb))
      throw Error("nonpositive rate constant in reaction " + std::to_string(r));
    if (rx.alpha == rx.beta) throw Error("reaction " + std::to_string(r) + " is trivial (alpha == beta)");
  }
}

int ReactionNetwork::species_index(std::string_view name) const {
  for (std::size_t i = 0; i < species_.size(); ++i)
    if (species_[i] == name) return static_cast<int>(i);
  return -1;
}

bool ReactionNetwork::integral_stoichiometry() const {
  for (const auto& rx : reactions_)
    for (int i = 0; i < num_species(); ++i)
      if (rx.alpha[i] != std::round(rx.alpha[i]) || rx.beta[i] != std::round(rx.beta[i])) return false;
  return true;
}

bool ReactionNetwork::unit_rates() const {
  for (const auto& rx : reactions_)
    if (rx.kf != rx.kb) return false;
  return true;
}

// ---------------------------------------------------------------------------
// DSL parser

namespace {

struct Term {
  std::string name;
  double coeff;
  int column;
};

class LineScanner {
 public:
  LineScanner(std::string_view s, int line) : s_(s), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  int column() const { return static_cast<int>(pos_) + 1; }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool consume(std::string_view tok) {
    skip_ws();
    if (s_.substr(pos_, tok.size()) == tok) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, column(), msg); }

  bool at_name_start() const {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  std::string name() {
    skip_ws();
    if (!at_name_start()) fail("expected species name");
    std::size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(b, pos_ - b));
  }
  bool at_number_start() const {
    char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+';
  }
  double number() {
    skip_ws();
    double v = 0.0;
    const char* b = s_.data() + pos_;
    const char* e = s_.data() + s_.size();
    if (b < e && *b == '+') ++b;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || !std::isfinite(v)) fail("expected number");
    pos_ = static_cast<std::size_t>(p - s_.data());
    return v;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_;
};

std::vector<Term> parse_side(LineScanner& sc, std::string_view terminator) {
  std::vector<Term> terms;
  while (true) {
    sc.skip_ws();
    int col = sc.column();
    double coeff = 1.0;
    if (sc.at_number_start()) {
      coeff = sc.number();
      if (coeff < 0.0) throw ParseError(0, col, "negative stoichiometric coefficient");
    }
    std::string nm = sc.name();
    if (coeff > 0.0 && coeff < 1.0)
      throw ParseError(0, col, "stoichiometric coefficient " + fmt_number(coeff) + " lies in (0,1)");
    terms.push_back({nm, coeff, col});
    sc.skip_ws();
    if (sc.consume("+")) continue;
    sc.skip_ws();
    std::string_view rest_tok = terminator;
    if (!sc.consume(rest_tok)) sc.fail(std::string("expected '+' or '") + std::string(terminator) + "'");
    return terms;
  }
}

}  // namespace

ReactionNetwork parse_network(std::string_view text) {
  std::vector<std::string> species;
  std::map<std::string, int> index;
  struct RawReaction {
    std::vector<Term> lhs, rhs;
    double kf, kb;
  };
  std::vector<RawReaction> raw;
  std::map<int, double> diff;

  auto intern = [&](const std::string& nm) {
    auto it = index.find(nm);
    if (it != index.end()) return it->second;
    int k = static_cast<int>(species.size());
    species.push_back(nm);
    index.emplace(nm, k);
    return k;
  };

  int lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    LineScanner sc(line, lineno);
    if (sc.done()) continue;

    try {
      if (sc.consume("diffusion:")) {
        while (!sc.done()) {
          int col = sc.column();
          std::string nm = sc.name();
          if (!sc.consume("=")) sc.fail("expected '=' after species name");
          double d = sc.number();
          if (!(d > 0.0)) throw ParseError(lineno, col, "nonpositive diffusion coefficient for " + nm);
          int k = intern(nm);
          if (diff.count(k)) throw ParseError(lineno, col, "duplicate diffusion coefficient for " + nm);
          diff[k] = d;
        }
        continue;
      }

      RawReaction rx;
      rx.lhs = parse_side(sc, "<->");
      rx.rhs = parse_side(sc, ";");
      std::optional<double> kf, kb;
      while (!sc.done()) {
        int col = sc.column();
        std::string key = sc.name();
        if (!sc.consume("=")) sc.fail("expected '=' after " + key);
        double v = sc.number();
        if (key != "kf" && key != "kb") throw ParseError(lineno, col, "unknown rate key '" + key + "'");
        auto& slot = key == "kf" ? kf : kb;
        if (slot) throw ParseError(lineno, col, "duplicate " + key);
        if (!(v > 0.0)) throw ParseError(lineno, col, "nonpositive rate constant " + key + "=" + fmt_number(v));
        slot = v;
      }
      if (!kf || !kb) sc.fail("missing kf or kb");
      rx.kf = *kf;
      rx.kb = *kb;
      raw.push_back(std::move(rx));
      for (const auto& t : raw.back().lhs) intern(t.name);
      for (const auto& t : raw.back().rhs) intern(t.name);
    } catch (const ParseError& e) {
      if (e.line() == 0) {
        std::string msg = e.what();
        // ParseError raised by helpers without line context; prefix "line 0, column c: ".
        auto colon = msg.find(": ");
        throw ParseError(lineno, e.column(), colon == std::string::npos ? msg : msg.substr(colon + 2));
      }
      throw;
    }
  }

  const int I = static_cast<int>(species.size());
  std::vector<Reaction> reactions;
  for (std::size_t r = 0; r < raw.size(); ++r) {
    Reaction rx;
    rx.alpha = Vec::Zero(I);
    rx.beta = Vec::Zero(I);
    for (const auto& t : raw[r].lhs) rx.alpha[index[t.name]] += t.coeff;
    for (const auto& t : raw[r].rhs) rx.beta[index[t.name]] += t.coeff;
    rx.kf = raw[r].kf;
    rx.kb = raw[r].kb;
    reactions.push_back(rx);
  }
  Vec d = Vec::Ones(I);
  for (auto [k, v] : diff) d[k] = v;
  if (I == 0) throw Error("network declares no species");
  return ReactionNetwork(std::move(species), std::move(reactions), std::move(d));
}

ReactionNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open network file '" + path + "': file not found or unreadable");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str());
}

// ---------------------------------------------------------------------------

Mat wegscheider_matrix(const ReactionNetwork& net) {
  Mat W(net.num_reactions(), net.num_species());
  for (int r = 0; r < net.num_reactions(); ++r) W.row(r) = (net.reaction(r).beta - net.reaction(r).alpha).transpose();
  return W;
}

double monomial(const Vec& c, const Vec& e) {
  double p = 1.0;
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (e[i] == 0.0) continue;
    if (e[i] == 1.0)
      p *= c[i];
    else
      p *= std::pow(c[i], e[i]);
  }
  return p;
}

Vec rate_vector(const ReactionNetwork& net, const Vec& c) {
  Vec K(net.num_reactions());
  for (int r = 0; r < net.num_reactions(); ++r) {
    const Reaction& rx = net.reaction(r);
    K[r] = rx.kf * monomial(c, rx.alpha) - rx.kb * monomial(c, rx.beta);
  }
  return K;
}

Vec reaction_vector(const ReactionNetwork& net, const Vec& c) {
  if (c.size() != net.num_species()) throw Error("state has wrong dimension");
  if ((c.array() < 0.0).any()) throw Error("reaction vector requires nonnegative concentrations");
  Vec R = Vec::Zero(net.num_species());
  for (int r = 0; r < net.num_reactions(); ++r) {
    const Reaction& rx = net.reaction(r);
    double k = rx.kf * monomial(c, rx.alpha) - rx.kb * monomial(c, rx.beta);
    R += (rx.alpha - rx.beta) * k;
  }
  return R;
}

namespace {

// d/dc_j of c^e.
double monomial_derivative(const Vec& c, const Vec& e, int j) {
  if (e[j] == 0.0) return 0.0;
  double p = e[j] * (e[j] == 1.0 ? 1.0 : std::pow(c[j], e[j] - 1.0));
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    if (i == j || e[i] == 0.0) continue;
    p *= std::pow(c[i], e[i]);
  }
  return p;
}

}  // namespace

Mat reaction_jacobian(const ReactionNetwork& net, const Vec& c) {
  const int I = net.num_species();
  Mat J = Mat::Zero(I, I);
  for (int r = 0; r < net.num_reactions(); ++r) {
    const Reaction& rx = net.reaction(r);
    Vec grad(I);
    for (int j = 0; j < I; ++j)
      grad[j] = rx.kf * monomial_derivative(c, rx.alpha, j) - rx.kb * monomial_derivative(c, rx.beta, j);
    J += (rx.alpha - rx.beta) * grad.transpose();
  }
  return J;
}

std::string format_reaction(const ReactionNetwork& net, int r) {
  auto side = [&](const Vec& s) {
    std::string out;
    for (int i = 0; i < net.num_species(); ++i) {
      if (s[i] == 0.0) continue;
      if (!out.empty()) out += " + ";
      if (s[i] != 1.0) out += fmt_number(s[i]) + " ";
      out += net.species()[i];
    }
    return out;
  };
  return side(net.reaction(r).alpha) + " <-> " + side(net.reaction(r).beta);
}

}  // namespace rdeed
