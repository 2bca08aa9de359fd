#include "renyisc/bounds.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

namespace renyisc {

namespace {

bool is_redistribution(ProtocolKind k) {
  return k == ProtocolKind::redistribution || k == ProtocolKind::redistribution_feedback;
}

void require_labels(const Operator& rho, const Labels& labels, const std::string& what) {
  if (rho.space().size() != labels.size()) {
    throw UsageError(what + " state must live on exactly " + std::to_string(labels.size()) + " systems, got " +
                     rho.space().describe());
  }
  for (const auto& l : labels) (void)rho.space().index_of(l);
}

Operator purified(const BoundState& in) {
  if (in.purification) {
    if (!in.purification->space().contains("R")) throw UsageError("supplied purification lacks system R");
    return *in.purification;
  }
  return purify(in.state, "R");
}

/// The state the expressions of `in.kind` are evaluated on.
Operator prepare(const BoundState& in) {
  switch (in.kind) {
    case ProtocolKind::redistribution:
    case ProtocolKind::redistribution_feedback:
      require_labels(in.state, {"A", "B", "C"}, "redistribution");
      return purified(in);
    case ProtocolKind::coherent_merging:
      require_labels(in.state, {"A", "B"}, "coherent merging");
      return purified(in);
    case ProtocolKind::state_splitting:
      require_labels(in.state, {"A", "C"}, "state splitting");
      return purified(in);
    case ProtocolKind::measurement_compression:
      return partial_trace(ideal_measurement_state(in.state, in.povm), {"R", "X", "B"});
    case ProtocolKind::randomness_extraction:
    case ProtocolKind::data_compression:
      require_labels(in.state, {"X", "B"}, "c-q");
      (void)cq_decompose(in.state, "X");
      return in.state;
  }
  throw UsageError("unknown protocol kind");
}

/// Renyi quantities on one prepared state with warm starts carried between calls.
class Evaluator {
 public:
  Evaluator(Operator state, OptimizerConfig config) : state_(std::move(state)), config_(std::move(config)) {}

  double s(const Labels& sys, double alpha) const { return renyi_entropy(state_, sys, alpha); }

  double cond(const Labels& a, const Labels& b, double alpha, const std::string& key) {
    return optimized(a, b, alpha, Reference::identity, key, -1.0);
  }
  double mi(const Labels& a, const Labels& b, double alpha, const std::string& key) {
    return optimized(a, b, alpha, Reference::marginal, key, 1.0);
  }
  const Operator& state() const { return state_; }

 private:
  double optimized(const Labels& a, const Labels& b, double alpha, Reference ref, const std::string& key,
                   double sign) {
    OptimizerConfig cfg = config_;
    if (auto it = warm_.find(key); it != warm_.end()) {
      cfg.initial = it->second;
      cfg.starts = std::min(cfg.starts, 2);
    }
    const OptimizedValue v = min_divergence(state_, a, b, alpha, ref, cfg);
    if (v.method == "bfgs") warm_[key] = v.optimizer.matrix();
    return sign * v.value;
  }

  Operator state_;
  OptimizerConfig config_;
  std::map<std::string, Matrix> warm_;
};

struct Expr {
  std::string id;
  double value;
};

std::vector<Expr> expressions(ProtocolKind kind, Evaluator& ev, double alpha) {
  const double beta = beta_of(alpha);
  switch (kind) {
    case ProtocolKind::redistribution:
    case ProtocolKind::redistribution_feedback: {
      const std::string p = kind == ProtocolKind::redistribution ? "sr-" : "fb-";
      return {
          {p + "q+e", ev.s({"A", "B"}, beta) - ev.s({"B"}, alpha)},
          {p + "q", ev.cond({"R"}, {"B"}, beta, "R|B") - ev.cond({"R"}, {"A", "B"}, alpha, "R|AB")},
          {p + "q-mi", ev.mi({"R"}, {"A", "B"}, alpha, "R;AB") - ev.mi({"R"}, {"B"}, beta, "R;B")},
      };
    }
    case ProtocolKind::coherent_merging:
      return {
          {"csm-q-e", ev.s({"A", "B"}, beta) - ev.s({"B"}, alpha)},
          {"csm-q", ev.s({"R"}, beta) - ev.cond({"R"}, {"A"}, alpha, "R|A")},
      };
    case ProtocolKind::state_splitting:
      return {
          {"qss-q+e", ev.s({"A"}, beta)},
          {"qss-q", ev.s({"R"}, beta) - ev.cond({"R"}, {"A"}, alpha, "R|A")},
          {"qss-q-mi", ev.mi({"R"}, {"A"}, alpha, "R;A")},
      };
    case ProtocolKind::measurement_compression:
      return {{"mc-c", ev.cond({"R"}, {"B"}, beta, "R|B") - ev.cond({"R"}, {"X", "B"}, alpha, "R|XB")}};
    case ProtocolKind::randomness_extraction:
      return {
          {"re-linear", ev.s({"X", "B"}, alpha) - ev.s({"B"}, beta)},
          {"re-cond", ev.cond({"X"}, {"B"}, alpha, "X|B")},
      };
    case ProtocolKind::data_compression:
      return {
          {"dc-linear", ev.s({"X", "B"}, beta) - ev.s({"B"}, alpha)},
          {"dc-cond", ev.cond({"X"}, {"B"}, beta, "X|B")},
      };
  }
  throw UsageError("unknown protocol kind");
}

double rate_of(const Rates& rates, const std::string& key) {
  auto it = rates.find(key);
  if (it == rates.end()) throw UsageError("missing rate '" + key + "'");
  return it->second;
}

double rate_for(const std::string& id, const Rates& r) {
  if (id == "sr-q+e") return rate_of(r, "q") + rate_of(r, "e");
  if (id == "sr-q" || id == "sr-q-mi") return 2.0 * rate_of(r, "q");
  if (id == "fb-q+e") return rate_of(r, "q_tot") + rate_of(r, "e");
  if (id == "fb-q" || id == "fb-q-mi") return 2.0 * rate_of(r, "q_fw");
  if (id == "csm-q-e") return rate_of(r, "q_csm") - rate_of(r, "e_csm");
  if (id == "csm-q") return 2.0 * rate_of(r, "q_csm");
  if (id == "qss-q+e") return rate_of(r, "q_qss") + rate_of(r, "e_qss");
  if (id == "qss-q" || id == "qss-q-mi") return 2.0 * rate_of(r, "q_qss");
  if (id == "mc-c") return rate_of(r, "c");
  if (id == "re-linear" || id == "re-cond") return rate_of(r, "l");
  if (id == "dc-linear" || id == "dc-cond") return rate_of(r, "m");
  throw UsageError("unknown bound id '" + id + "'");
}

void require_grid_alpha(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0)) throw UsageError("bounds need alpha in (1/2, 1), got " + format_double(alpha));
}

std::vector<BoundEntry> evaluate(const BoundState& input, const Rates& rates, double alpha, Evaluator& ev) {
  require_grid_alpha(alpha);
  if (input.copies < 1) throw UsageError("copies must be >= 1");
  const double kappa = bound_kappa(input.kind, alpha);
  const bool reversed = input.kind == ProtocolKind::randomness_extraction;
  std::vector<BoundEntry> out;
  for (const Expr& e : expressions(input.kind, ev, alpha)) {
    BoundEntry b;
    b.bound_id = e.id;
    b.alpha = alpha;
    b.beta = beta_of(alpha);
    b.kappa = kappa;
    b.expression = e.value;
    b.rate = rate_for(e.id, rates);
    b.exponent = kappa * (reversed ? b.rate - b.expression : b.expression - b.rate);
    b.log2_merit_bound = -static_cast<double>(input.copies) * b.exponent;
    out.push_back(b);
  }
  return out;
}

}  // namespace

std::vector<std::string> bound_ids(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::redistribution: return {"sr-q+e", "sr-q", "sr-q-mi"};
    case ProtocolKind::redistribution_feedback: return {"fb-q+e", "fb-q", "fb-q-mi"};
    case ProtocolKind::coherent_merging: return {"csm-q-e", "csm-q"};
    case ProtocolKind::state_splitting: return {"qss-q+e", "qss-q", "qss-q-mi"};
    case ProtocolKind::measurement_compression: return {"mc-c"};
    case ProtocolKind::randomness_extraction: return {"re-linear", "re-cond"};
    case ProtocolKind::data_compression: return {"dc-linear", "dc-cond"};
  }
  return {};
}

double bound_kappa(ProtocolKind kind, double alpha) {
  return kind == ProtocolKind::randomness_extraction ? (1.0 - alpha) / (4.0 * alpha) : kappa_of(alpha);
}

std::vector<double> alpha_grid(double start, double end, int count) {
  if (count < 1) throw UsageError("alpha grid needs at least one point");
  if (!(start > 0.5 && end < 1.0 && start <= end)) {
    throw UsageError("alpha grid must satisfy 1/2 < start <= end < 1");
  }
  if (count == 1) return {start};
  std::vector<double> g;
  for (int i = 0; i < count; ++i) g.push_back(start + (end - start) * i / (count - 1));
  g.back() = end;
  return g;
}

std::vector<double> default_alpha_grid() { return alpha_grid(0.51, 0.99, 25); }

BoundReport converse_bound(const BoundState& input, const Rates& rates, double alpha, const OptimizerConfig& config) {
  Evaluator ev(prepare(input), config);
  return BoundReport{input.kind, input.copies, evaluate(input, rates, alpha, ev)};
}

std::vector<ExponentCurve> exponent_curve(const BoundState& input, const Rates& rates,
                                          const std::vector<double>& grid, const OptimizerConfig& config) {
  if (grid.empty()) throw UsageError("empty alpha grid");
  std::vector<double> sorted = grid;
  std::sort(sorted.begin(), sorted.end());
  Evaluator ev(prepare(input), config);
  std::vector<ExponentCurve> curves;
  for (const auto& id : bound_ids(input.kind)) curves.push_back(ExponentCurve{id, {}, 0.0, 0.0});
  for (double a : sorted) {
    const auto entries = evaluate(input, rates, a, ev);
    for (std::size_t i = 0; i < entries.size(); ++i) curves[i].points.push_back(entries[i]);
  }
  for (auto& c : curves) {
    c.sup = c.points.front().exponent;
    c.sup_alpha = c.points.front().alpha;
    for (const auto& p : c.points) {
      if (p.exponent > c.sup) {
        c.sup = p.exponent;
        c.sup_alpha = p.alpha;
      }
    }
  }
  return curves;
}

std::vector<LimitEntry> vn_limit_check(const BoundState& input, double epsilon, const OptimizerConfig& config) {
  if (!(epsilon > 0.0 && epsilon <= 0.1)) throw UsageError("epsilon must lie in (0, 0.1]");
  Evaluator ev(prepare(input), config);
  const Operator& st = ev.state();
  double cond_ab = 0.0, cmi = 0.0, mi = 0.0, sa = 0.0, xb = 0.0;
  if (is_redistribution(input.kind) || input.kind == ProtocolKind::coherent_merging) {
    cond_ab = vn_conditional_entropy(st, {"A"}, {"B"});
  }
  if (is_redistribution(input.kind)) cmi = vn_conditional_mutual_information(st, {"A"}, {"R"}, {"B"});
  if (input.kind == ProtocolKind::coherent_merging || input.kind == ProtocolKind::state_splitting) {
    mi = vn_mutual_information(st, {"A"}, {"R"});
  }
  if (input.kind == ProtocolKind::state_splitting) sa = von_neumann_entropy(partial_trace(st, {"A"}));
  if (input.kind == ProtocolKind::measurement_compression) cmi = vn_conditional_mutual_information(st, {"X"}, {"R"}, {"B"});
  if (input.kind == ProtocolKind::randomness_extraction || input.kind == ProtocolKind::data_compression) {
    xb = vn_conditional_entropy(st, {"X"}, {"B"});
  }
  auto limit = [&](const std::string& id) {
    if (id.ends_with("q+e") && id != "qss-q+e") return cond_ab;
    if (id == "csm-q-e") return cond_ab;
    if (id == "qss-q+e") return sa;
    if (id.starts_with("sr-") || id.starts_with("fb-") || id == "mc-c") return cmi;
    if (id.starts_with("csm-") || id.starts_with("qss-")) return mi;
    return xb;
  };
  const double alpha = 1.0 - epsilon;
  std::vector<LimitEntry> out;
  for (const Expr& e : expressions(input.kind, ev, alpha)) {
    const double vn = limit(e.id);
    out.push_back(LimitEntry{e.id, alpha, e.value, vn, std::abs(e.value - vn)});
  }
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

void write_curve_csv(std::ostream& out, const std::vector<ExponentCurve>& curves) {
  out << "bound_id,alpha,beta,kappa,expression_bits,rate_bits,exponent,log2_merit_bound\n";
  for (const auto& c : curves) {
    for (const auto& p : c.points) {
      out << p.bound_id << ',' << format_double(p.alpha) << ',' << format_double(p.beta) << ','
          << format_double(p.kappa) << ',' << format_double(p.expression) << ',' << format_double(p.rate) << ','
          << format_double(p.exponent) << ',' << format_double(p.log2_merit_bound) << '\n';
    }
  }
}

}  // namespace renyisc
