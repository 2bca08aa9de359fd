#include "renyisc/protocol.hpp"

#include "renyisc/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace renyisc {

namespace {

using LabelSet = std::set<std::string>;

void guard(long dim, const std::string& what) {
  if (dim > kDimensionBudget) {
    throw BudgetError(what + " needs composite dimension " + std::to_string(dim) + " > budget " +
                      std::to_string(kDimensionBudget));
  }
}

long ipow(long base, int n) {
  long out = 1;
  for (int i = 0; i < n; ++i) out *= base;
  return out;
}

/// Removes dimension-1 subsystems from the space (the matrix is unchanged).
Operator drop_trivial(const Operator& op) {
  std::vector<Subsystem> keep;
  for (const auto& s : op.space().subsystems()) {
    if (s.dim != 1) keep.push_back(s);
  }
  return Operator(SystemSpace(std::move(keep)), op.matrix());
}

/// Adds any dimension-1 input systems of `ch` that `rho` lacks.
Operator with_trivial_inputs(const Operator& rho, const Channel& ch) {
  std::vector<Subsystem> extra;
  for (const auto& s : ch.input().subsystems()) {
    if (!rho.space().contains(s.label)) {
      if (s.dim != 1) throw UsageError("channel input '" + s.label + "' is not available");
      extra.push_back(s);
    }
  }
  if (extra.empty()) return rho;
  return Operator(rho.space().concat(SystemSpace(std::move(extra))), rho.matrix());
}

Operator apply_guarded(const Channel& ch, const Operator& rho, const std::string& what) {
  const Operator padded = with_trivial_inputs(rho, ch);
  guard(padded.dim() / ch.input().dim() * ch.isometry.out_space().dim(), what);
  return apply_channel(ch, padded);
}

LabelSet nontrivial(const SystemSpace& space, const std::vector<std::string>& exclude = {}) {
  LabelSet out;
  for (const auto& s : space.subsystems()) {
    if (s.dim != 1 && std::find(exclude.begin(), exclude.end(), s.label) == exclude.end()) out.insert(s.label);
  }
  return out;
}

std::string join_labels(const LabelSet& s) {
  std::string out = "{";
  for (const auto& l : s) out += (out.size() > 1 ? ", " : "") + l;
  return out + "}";
}

void require_state_systems(const Operator& rho, const std::vector<std::string>& labels, const std::string& kind) {
  if (rho.space().size() != labels.size()) {
    throw UsageError(kind + ": input state must live on " + join_labels(LabelSet(labels.begin(), labels.end())) +
                     ", got " + rho.space().describe());
  }
  for (const auto& l : labels) (void)rho.space().index_of(l);
  require_density(rho);
}

int output_dim(const Channel& ch, const std::string& label) {
  const SystemSpace out = ch.output();
  return out.contains(label) ? out.dim_of(label) : 1;
}

double log2i(long v) { return std::log2(static_cast<double>(v)); }

/// Adds a dimension-1 system with the given label when absent.
Operator ensure_system(const Operator& rho, const std::string& label) {
  if (rho.space().contains(label)) return rho;
  return Operator(rho.space().concat(SystemSpace{{label, 1}}), rho.matrix());
}

struct RoundsResult {
  Operator final_state;
  double merit = 0.0;
  std::vector<long> forward;
  std::vector<long> backward;
};

RoundsResult run_rounds(const Operator& rho, int copies, int k, int m, const std::vector<Channel>& rounds) {
  if (copies < 1) throw UsageError("copies must be >= 1");
  if (k < 1 || m < 1) throw UsageError("entanglement register sizes must be >= 1");
  if (rounds.empty() || rounds.size() % 2 != 0) throw UsageError("channel list must alternate encoder/decoder");
  const int nrounds = static_cast<int>(rounds.size() / 2);

  const Operator single = ensure_system(ensure_system(ensure_system(rho, "A"), "B"), "C");
  require_state_systems(single, {"A", "B", "C"}, "redistribution");
  guard(ipow(single.dim(), copies) * single.dim(), "n-copy state");
  const Operator block = blocked_power(single, copies);
  const Operator psi = purify(block, "R");
  guard(psi.dim() * k * k, "initial state");
  Operator state = k > 1 ? kron(maximally_entangled("TA", "TB", k), psi) : psi;

  LabelSet alice = nontrivial(state.space(), {"B", "TB", "R"});
  LabelSet bob = nontrivial(state.space(), {"A", "C", "TA", "R"});
  RoundsResult res;
  for (int i = 1; i <= nrounds; ++i) {
    const Channel& enc = rounds[static_cast<std::size_t>(2 * i - 2)];
    const Channel& dec = rounds[static_cast<std::size_t>(2 * i - 1)];
    const std::string q = forward_label(i, nrounds);
    const std::string qb = backward_label(i);

    for (const auto& l : nontrivial(enc.input())) {
      if (!alice.count(l)) throw UsageError("round " + std::to_string(i) + " encoder input '" + l + "' is not held by Alice");
    }
    for (const auto& l : nontrivial(enc.input())) alice.erase(l);
    for (const auto& l : nontrivial(enc.output())) {
      if (alice.count(l) || bob.count(l)) throw UsageError("encoder output '" + l + "' already exists");
      if (l != q) alice.insert(l);
    }
    if (i < nrounds && !enc.output().contains(q)) throw UsageError("round " + std::to_string(i) + " encoder lacks '" + q + "'");
    state = apply_guarded(enc, state, "encoder");
    res.forward.push_back(output_dim(enc, q));
    if (res.forward.back() > 1) bob.insert(q);

    for (const auto& l : nontrivial(dec.input())) {
      if (!bob.count(l)) throw UsageError("round " + std::to_string(i) + " decoder input '" + l + "' is not held by Bob");
    }
    for (const auto& l : nontrivial(dec.input())) bob.erase(l);
    for (const auto& l : nontrivial(dec.output())) {
      if (alice.count(l) || bob.count(l)) throw UsageError("decoder output '" + l + "' already exists");
      if (l == qb && i < nrounds) {
        alice.insert(l);
      } else {
        bob.insert(l);
      }
    }
    if (i == nrounds && dec.output().contains(qb) && dec.output().dim_of(qb) > 1) {
      throw UsageError("last decoder must not send '" + qb + "' back");
    }
    state = apply_guarded(dec, state, "decoder");
    if (i < nrounds) res.backward.push_back(output_dim(dec, qb));
  }

  const int da = block.space().dim_of("A");
  const int db = block.space().dim_of("B");
  const int dc = block.space().dim_of("C");
  auto expect = [&](const LabelSet& held, std::map<std::string, int> want, const std::string& who) {
    LabelSet w;
    for (const auto& [l, d] : want) {
      if (d != 1) w.insert(l);
    }
    if (held != w) throw UsageError(who + " ends with " + join_labels(held) + ", expected " + join_labels(w));
    for (const auto& [l, d] : want) {
      const int got = state.space().contains(l) ? state.space().dim_of(l) : 1;
      if (got != d) throw UsageError("output '" + l + "' has dimension " + std::to_string(got) + ", expected " + std::to_string(d));
    }
  };
  expect(alice, {{"C'", dc}, {"TA'", m}}, "Alice");
  expect(bob, {{"A'", da}, {"B'", db}, {"TB'", m}}, "Bob");

  Operator target = relabel(psi, {{"A", "A'"}, {"B", "B'"}, {"C", "C'"}});
  if (m > 1) target = kron(maximally_entangled("TA'", "TB'", m), target);
  res.final_state = drop_trivial(state);
  res.merit = fidelity(res.final_state, drop_trivial(target));
  return res;
}

void require_povm(const std::vector<Matrix>& povm, long dim, const std::string& what) {
  if (povm.empty()) throw UsageError(what + ": empty POVM");
  Matrix sum = Matrix::Zero(dim, dim);
  for (const auto& e : povm) {
    if (e.rows() != dim || e.cols() != dim) throw UsageError(what + ": POVM element has wrong shape");
    if (hermiticity_defect(e) > 1e-8 || hermitian_eigen(e).values.minCoeff() < -1e-8) {
      throw InvalidInput(what + ": POVM element is not positive semidefinite");
    }
    sum += e;
  }
  if ((sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-8) {
    throw InvalidInput(what + ": POVM elements do not sum to the identity");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::redistribution: return "redistribution";
    case ProtocolKind::redistribution_feedback: return "redistribution-feedback";
    case ProtocolKind::coherent_merging: return "coherent-merging";
    case ProtocolKind::state_splitting: return "state-splitting";
    case ProtocolKind::measurement_compression: return "measurement-compression";
    case ProtocolKind::randomness_extraction: return "randomness-extraction";
    case ProtocolKind::data_compression: return "data-compression";
  }
  return "unknown";
}

ProtocolKind parse_protocol_kind(const std::string& name) {
  for (auto k : {ProtocolKind::redistribution, ProtocolKind::redistribution_feedback, ProtocolKind::coherent_merging,
                 ProtocolKind::state_splitting, ProtocolKind::measurement_compression,
                 ProtocolKind::randomness_extraction, ProtocolKind::data_compression}) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown protocol kind '" + name + "'");
}

Operator blocked_power(const Operator& rho, int n) {
  if (n == 1) return rho;
  const Operator p = tensor_power(rho, n);
  std::vector<std::string> order;
  std::vector<Subsystem> merged;
  for (const auto& s : rho.space().subsystems()) {
    for (int c = 1; c <= n; ++c) order.push_back(copy_label(s.label, c));
    merged.push_back({s.label, static_cast<int>(ipow(s.dim, n))});
  }
  return Operator(SystemSpace(std::move(merged)), reorder(p, order).matrix());
}

std::string forward_label(int round, int rounds) { return rounds == 1 ? "Q" : "Q" + std::to_string(round); }
std::string backward_label(int round) { return "Q" + std::to_string(round) + "'"; }

ProtocolOutcome run_redistribution(const RedistributionInstance& inst) {
  const RoundsResult r = run_rounds(inst.state, inst.copies, inst.k, inst.m, {inst.encoder, inst.decoder});
  ProtocolOutcome out{r.final_state, r.merit, {}};
  const double n = inst.copies;
  out.costs["q"] = log2i(r.forward[0]) / n;
  out.costs["e"] = (log2i(inst.k) - log2i(inst.m)) / n;
  return out;
}

ProtocolOutcome run_feedback_redistribution(const FeedbackInstance& inst) {
  const RoundsResult r = run_rounds(inst.state, inst.copies, inst.k, inst.m, inst.rounds);
  ProtocolOutcome out{r.final_state, r.merit, {}};
  const double n = inst.copies;
  double fw = 0.0, bw = 0.0;
  for (long d : r.forward) fw += log2i(d);
  for (long d : r.backward) bw += log2i(d);
  out.costs["q_fw"] = fw / n;
  out.costs["q_tot"] = (fw + bw) / n;
  out.costs["e"] = (log2i(inst.k) - log2i(inst.m)) / n;
  return out;
}

RedistributionInstance specialize(const MergingInputs& in) {
  require_state_systems(in.state, {"A", "B"}, "coherent merging");
  for (const auto& l : nontrivial(in.encoder.input())) {
    if (l != "A") throw UsageError("coherent merging encoder may only act on A, not '" + l + "'");
  }
  for (const auto& l : nontrivial(in.encoder.output())) {
    if (l != "TA'" && l != "Q") throw UsageError("coherent merging encoder outputs only TA' and Q, not '" + l + "'");
  }
  for (const auto& l : nontrivial(in.decoder.input())) {
    if (l != "Q" && l != "B") throw UsageError("coherent merging decoder acts on Q and B, not '" + l + "'");
  }
  RedistributionInstance r;
  r.state = ensure_system(in.state, "C");
  r.copies = in.copies;
  r.k = 1;
  r.m = output_dim(in.encoder, "TA'");
  r.encoder = in.encoder;
  r.decoder = in.decoder;
  return r;
}

RedistributionInstance specialize(const SplittingInputs& in) {
  require_state_systems(in.state, {"A", "C"}, "state splitting");
  for (const auto& l : nontrivial(in.encoder.output())) {
    if (l != "C'" && l != "Q") throw UsageError("state splitting encoder outputs only C' and Q, not '" + l + "'");
  }
  for (const auto& l : nontrivial(in.decoder.input())) {
    if (l != "Q" && l != "TB") throw UsageError("state splitting decoder acts on Q and TB, not '" + l + "'");
  }
  for (const auto& l : nontrivial(in.decoder.output())) {
    if (l != "A'") throw UsageError("state splitting decoder outputs only A', not '" + l + "'");
  }
  RedistributionInstance r;
  r.state = ensure_system(in.state, "B");
  r.copies = in.copies;
  r.k = in.k;
  r.m = 1;
  r.encoder = in.encoder;
  r.decoder = in.decoder;
  return r;
}

ProtocolOutcome run_coherent_merging(const MergingInputs& in) {
  const RedistributionInstance r = specialize(in);
  ProtocolOutcome out = run_redistribution(r);
  const double n = in.copies;
  out.costs = {{"q_csm", log2i(output_dim(in.encoder, "Q")) / n}, {"e_csm", log2i(r.m) / n}};
  return out;
}

ProtocolOutcome run_state_splitting(const SplittingInputs& in) {
  const RedistributionInstance r = specialize(in);
  ProtocolOutcome out = run_redistribution(r);
  const double n = in.copies;
  out.costs = {{"q_qss", log2i(output_dim(in.encoder, "Q")) / n}, {"e_qss", log2i(in.k) / n}};
  return out;
}

// ---------------------------------------------------------------------------
// Measurement compression

std::vector<Matrix> tensor_power_povm(const std::vector<Matrix>& povm, int n) {
  std::vector<Matrix> out = povm;
  for (int c = 1; c < n; ++c) {
    std::vector<Matrix> next;
    next.reserve(out.size() * povm.size());
    for (const auto& a : out) {
      for (const auto& b : povm) next.push_back(kron(Operator(SystemSpace{{"u", static_cast<int>(a.rows())}}, a),
                                                     Operator(SystemSpace{{"v", static_cast<int>(b.rows())}}, b))
                                                    .matrix());
    }
    out = std::move(next);
  }
  return out;
}

Channel measurement_channel(const std::vector<Matrix>& povm, const SystemSpace& in) {
  const long d = in.dim();
  require_povm(povm, d, "measurement");
  const int nx = static_cast<int>(povm.size());
  const SystemSpace out{{"X", nx}, {"X'", nx}};
  std::vector<Matrix> kraus;
  for (int x = 0; x < nx; ++x) {
    const Matrix root = fractional_power(povm[static_cast<std::size_t>(x)], 0.5);
    for (long j = 0; j < d; ++j) {
      Matrix k = Matrix::Zero(out.dim(), d);
      k.row(static_cast<long>(x) * nx + x) = root.row(j);
      kraus.push_back(std::move(k));
    }
  }
  return channel_from_kraus(kraus, in, out, "E_meas");
}

Operator ideal_measurement_state(const Operator& rho_ab, const std::vector<Matrix>& povm) {
  require_state_systems(rho_ab, {"A", "B"}, "measurement compression");
  const Operator psi = purify(rho_ab, "R");
  guard(psi.dim() / psi.space().dim_of("A") * static_cast<long>(povm.size() * povm.size()), "ideal state");
  const Operator phi = apply_channel(measurement_channel(povm, psi.space().select({"A"})), psi);
  return reorder(phi, {"R", "X", "X'", "B"});
}

ProtocolOutcome run_measurement_compression(const MeasurementCompressionInstance& inst) {
  if (inst.copies < 1 || inst.randomness < 1) throw UsageError("copies and randomness size must be >= 1");
  require_state_systems(inst.state, {"A", "B"}, "measurement compression");
  require_povm(inst.povm, inst.state.space().dim_of("A"), "measurement compression");
  guard(ipow(inst.state.dim(), inst.copies), "n-copy state");
  const Operator block = blocked_power(inst.state, inst.copies);
  const auto povm = tensor_power_povm(inst.povm, inst.copies);
  const int nx = static_cast<int>(povm.size());

  const Operator phi = drop_trivial(ideal_measurement_state(block, povm));
  const Operator psi = purify(block, "R");
  Operator state = psi;
  if (inst.randomness > 1) {
    const int r = inst.randomness;
    std::vector<double> p(static_cast<std::size_t>(r * r), 0.0);
    for (int i = 0; i < r; ++i) p[static_cast<std::size_t>(i * r + i)] = 1.0 / r;
    state = kron(state, diagonal_state(SystemSpace{{"MA", r}, {"MB", r}}, p));
  }
  guard(state.dim(), "initial state");

  for (const auto& l : nontrivial(inst.encoder.input())) {
    if (l != "A" && l != "MA") throw UsageError("measurement encoder acts on A and MA, not '" + l + "'");
  }
  for (const auto& l : nontrivial(inst.encoder.output())) {
    if (l != "Xbar" && l != "L") throw UsageError("measurement encoder outputs Xbar and L, not '" + l + "'");
  }
  for (const auto& l : nontrivial(inst.decoder.input())) {
    if (l != "L" && l != "B" && l != "MB") throw UsageError("measurement decoder acts on L, B, MB, not '" + l + "'");
  }
  for (const auto& l : nontrivial(inst.decoder.output())) {
    if (l != "Xhat" && l != "B'") throw UsageError("measurement decoder outputs Xhat and B', not '" + l + "'");
  }
  if (output_dim(inst.encoder, "Xbar") != nx || output_dim(inst.decoder, "Xhat") != nx) {
    throw UsageError("Xbar and Xhat must have the POVM outcome count " + std::to_string(nx));
  }
  if (output_dim(inst.decoder, "B'") != block.space().dim_of("B")) throw UsageError("B' must match B");

  state = apply_guarded(inst.encoder, state, "encoder");
  state = apply_guarded(inst.decoder, state, "decoder");
  for (const auto& l : nontrivial(state.space(), {"R", "Xbar", "Xhat", "B'"})) {
    throw UsageError("system '" + l + "' is left over after decoding");
  }
  ProtocolOutcome out;
  out.final_state = drop_trivial(state);
  out.merit = fidelity(drop_trivial(relabel(state, {{"Xbar", "X"}, {"Xhat", "X'"}, {"B'", "B"}})), phi);
  const double n = inst.copies;
  out.costs["c"] = log2i(output_dim(inst.encoder, "L")) / n;
  out.costs["r"] = log2i(inst.randomness) / n;
  return out;
}

// ---------------------------------------------------------------------------
// c-q protocols

CqEnsemble cq_decompose(const Operator& rho, const std::string& classical) {
  require_density(rho);
  if (rho.space().size() < 1 || rho.space().subsystems()[0].label != classical) {
    throw UsageError("c-q state must list the classical system '" + classical + "' first");
  }
  const int nx = rho.space().subsystems()[0].dim;
  CqEnsemble ens;
  ens.b = rho.space().without({classical});
  const long db = ens.b.dim();
  const Matrix& m = rho.matrix();
  for (int x = 0; x < nx; ++x) {
    for (int y = 0; y < nx; ++y) {
      if (x != y && m.block(x * db, y * db, db, db).cwiseAbs().maxCoeff() > 1e-10) {
        throw InvalidInput("state is not classical on '" + classical + "'");
      }
    }
    const Matrix blk = m.block(x * db, x * db, db, db);
    const double p = std::max(blk.trace().real(), 0.0);
    ens.p.push_back(p);
    ens.states.push_back(p > 0.0 ? Matrix(blk / p) : Matrix(Matrix::Identity(db, db) / static_cast<double>(db)));
  }
  return ens;
}

CqEnsemble cq_power(const CqEnsemble& ens, int n) {
  CqEnsemble out = ens;
  for (int c = 1; c < n; ++c) {
    CqEnsemble next;
    next.b = SystemSpace{{"B", static_cast<int>(out.b.dim() * ens.b.dim())}};
    for (std::size_t i = 0; i < out.p.size(); ++i) {
      for (std::size_t j = 0; j < ens.p.size(); ++j) {
        next.p.push_back(out.p[i] * ens.p[j]);
        Matrix k(out.states[i].rows() * ens.states[j].rows(), out.states[i].cols() * ens.states[j].cols());
        for (long a = 0; a < out.states[i].rows(); ++a) {
          for (long b = 0; b < out.states[i].cols(); ++b) {
            k.block(a * ens.states[j].rows(), b * ens.states[j].cols(), ens.states[j].rows(), ens.states[j].cols()) =
                out.states[i](a, b) * ens.states[j];
          }
        }
        next.states.push_back(std::move(k));
      }
    }
    out = std::move(next);
  }
  if (n > 1) out.b = SystemSpace{{"B", static_cast<int>(out.b.dim())}};
  return out;
}

ExtractionMerit extraction_merit(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) throw UsageError("extraction_merit: no blocks");
  const long d = blocks[0].rows();
  const double scale = 1.0 / std::sqrt(static_cast<double>(blocks.size()));
  std::vector<Matrix> roots;
  Matrix omega_b = Matrix::Zero(d, d);
  for (const auto& w : blocks) {
    roots.push_back(fractional_power(w, 0.5));
    omega_b += w;
  }
  auto value = [&](const Matrix& sigma, Matrix* grad) {
    double f = 0.0;
    if (grad) *grad = Matrix::Zero(d, d);
    for (const auto& r : roots) {
      const Matrix m = r * sigma * r;
      const auto eig = hermitian_eigen(m);
      const double top = std::max(eig.values.maxCoeff(), 0.0);
      RealVector inv(eig.values.size());
      for (Eigen::Index k = 0; k < inv.size(); ++k) {
        const double v = eig.values(k);
        const bool on = v > 1e-14 * top && v > 0.0;
        if (on) f += std::sqrt(v);
        inv(k) = on ? 1.0 / std::sqrt(v) : 0.0;
      }
      if (grad) *grad += 0.5 * r * (eig.vectors * inv.asDiagonal() * eig.vectors.adjoint()) * r;
    }
    if (grad) *grad *= scale;
    return scale * f;
  };

  ExtractionMerit out;
  out.lower = value(omega_b, nullptr);
  out.upper = std::sqrt(out.lower);
  out.merit = out.lower;
  out.sigma = omega_b;
  if (d > 1) {
    // Maximize over sigma = L L^dagger / tr, L lower triangular.
    Matrix start = omega_b + 1e-6 * Matrix::Identity(d, d);
    Eigen::LLT<Matrix> llt(start / start.trace().real());
    const Matrix l0 = llt.matrixL();
    Eigen::VectorXd x0(d * d);
    long k = d;
    for (long i = 0; i < d; ++i) x0(i) = l0(i, i).real();
    for (long i = 1; i < d; ++i) {
      for (long j = 0; j < i; ++j) {
        x0(k) = l0(i, j).real();
        x0(k + 1) = l0(i, j).imag();
        k += 2;
      }
    }
    auto unpack = [d](const Eigen::VectorXd& x) {
      Matrix l = Matrix::Zero(d, d);
      long kk = d;
      for (long i = 0; i < d; ++i) l(i, i) = x(i);
      for (long i = 1; i < d; ++i) {
        for (long j = 0; j < i; ++j) {
          l(i, j) = cplx(x(kk), x(kk + 1));
          kk += 2;
        }
      }
      return l;
    };
    Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
      const Matrix l = unpack(x);
      const Matrix ll = l * l.adjoint();
      const double t = ll.trace().real();
      const Matrix sigma = ll / t;
      Matrix h;
      const double v = value(sigma, grad ? &h : nullptr);
      if (grad) {
        const double mean = (h * sigma).trace().real();
        const Matrix kl = -((h - mean * Matrix::Identity(d, d)) / t) * l;
        grad->resize(x.size());
        long kk = d;
        for (long i = 0; i < d; ++i) (*grad)(i) = 2.0 * kl(i, i).real();
        for (long i = 1; i < d; ++i) {
          for (long j = 0; j < i; ++j) {
            (*grad)(kk) = 2.0 * kl(i, j).real();
            (*grad)(kk + 1) = 2.0 * kl(i, j).imag();
            kk += 2;
          }
        }
      }
      return -v;
    };
    auto renorm = [](Eigen::VectorXd& x) {
      const double t = x.squaredNorm();
      if (t > 1e-3 && t < 1e3) return false;
      x /= std::sqrt(t);
      return true;
    };
    const BfgsResult r = bfgs_minimize(f, x0, BfgsOptions{1e-10, 1e-14, 5000}, renorm);
    if (-r.value > out.merit) {
      out.merit = -r.value;
      const Matrix l = unpack(r.x);
      out.sigma = l * l.adjoint();
      out.sigma /= out.sigma.trace().real();
    }
  }
  if (out.merit > out.upper + 1e-8) {
    throw std::runtime_error("randomness-extraction merit " + std::to_string(out.merit) +
                             " exceeds the sqrt(F') bracket " + std::to_string(out.upper));
  }
  return out;
}

ProtocolOutcome run_randomness_extraction(const RandomnessExtractionInstance& inst) {
  if (inst.copies < 1 || inst.z_size < 1) throw UsageError("copies and |Z| must be >= 1");
  guard(ipow(inst.state.dim(), inst.copies), "n-copy state");
  const CqEnsemble ens = cq_power(cq_decompose(inst.state, "X"), inst.copies);
  const std::size_t nx = ens.p.size();
  if (inst.e_table.size() != nx) {
    throw UsageError("e_table has " + std::to_string(inst.e_table.size()) + " entries, expected " + std::to_string(nx));
  }
  std::vector<bool> hit(static_cast<std::size_t>(inst.z_size), false);
  for (int z : inst.e_table) {
    if (z < 0 || z >= inst.z_size) throw UsageError("e_table value " + std::to_string(z) + " outside Z");
    hit[static_cast<std::size_t>(z)] = true;
  }
  if (std::find(hit.begin(), hit.end(), false) != hit.end()) throw UsageError("e_table is not surjective onto Z");
  const long db = ens.b.dim();
  guard(inst.z_size * db, "extracted state");

  std::vector<Matrix> blocks(static_cast<std::size_t>(inst.z_size), Matrix::Zero(db, db));
  for (std::size_t x = 0; x < nx; ++x) blocks[static_cast<std::size_t>(inst.e_table[x])] += ens.p[x] * ens.states[x];
  const ExtractionMerit em = extraction_merit(blocks);

  Matrix omega = Matrix::Zero(inst.z_size * db, inst.z_size * db);
  for (int z = 0; z < inst.z_size; ++z) omega.block(z * db, z * db, db, db) = blocks[static_cast<std::size_t>(z)];
  ProtocolOutcome out;
  out.final_state = drop_trivial(Operator(SystemSpace{{"Z", inst.z_size}, {"B", static_cast<int>(db)}}, omega));
  out.merit = em.merit;
  out.costs["l"] = log2i(inst.z_size) / inst.copies;
  return out;
}

std::vector<std::vector<Matrix>> pretty_good_decoder(const CqEnsemble& ens, const std::vector<int>& e_table,
                                                     int c_size) {
  const long db = ens.b.dim();
  const std::size_t nx = ens.p.size();
  std::vector<std::vector<Matrix>> povms(static_cast<std::size_t>(c_size),
                                         std::vector<Matrix>(nx, Matrix::Zero(db, db)));
  for (int c = 0; c < c_size; ++c) {
    Matrix s = Matrix::Zero(db, db);
    int first = -1;
    for (std::size_t x = 0; x < nx; ++x) {
      if (e_table[x] != c) continue;
      if (first < 0) first = static_cast<int>(x);
      s += ens.p[x] * ens.states[x];
    }
    auto& povm = povms[static_cast<std::size_t>(c)];
    if (first < 0) {
      povm[0] = Matrix::Identity(db, db);
      continue;
    }
    const Matrix inv_root = fractional_power(s, -0.5);
    for (std::size_t x = 0; x < nx; ++x) {
      if (e_table[x] != c) continue;
      Matrix e = inv_root * (ens.p[x] * ens.states[x]) * inv_root;
      povm[x] = 0.5 * (e + e.adjoint());
    }
    povm[static_cast<std::size_t>(first)] += Matrix::Identity(db, db) - support_projector(s);
  }
  return povms;
}

ProtocolOutcome run_data_compression(const DataCompressionInstance& inst) {
  if (inst.copies < 1 || inst.c_size < 1) throw UsageError("copies and |C| must be >= 1");
  guard(ipow(inst.state.dim(), inst.copies), "n-copy state");
  const CqEnsemble ens = cq_power(cq_decompose(inst.state, "X"), inst.copies);
  const std::size_t nx = ens.p.size();
  if (inst.e_table.size() != nx) {
    throw UsageError("e_table has " + std::to_string(inst.e_table.size()) + " entries, expected " + std::to_string(nx));
  }
  for (int c : inst.e_table) {
    if (c < 0 || c >= inst.c_size) throw UsageError("e_table value " + std::to_string(c) + " outside C");
  }
  const auto povms = inst.pretty_good ? pretty_good_decoder(ens, inst.e_table, inst.c_size) : inst.povms;
  if (povms.size() != static_cast<std::size_t>(inst.c_size)) throw UsageError("need one POVM per value of C");
  for (const auto& povm : povms) {
    if (povm.size() != nx) throw UsageError("each decoding POVM needs one element per x");
    require_povm(povm, ens.b.dim(), "data compression decoder");
  }

  double success = 0.0;
  std::vector<double> joint(nx * nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x) {
    const auto& povm = povms[static_cast<std::size_t>(inst.e_table[x])];
    for (std::size_t y = 0; y < nx; ++y) {
      joint[x * nx + y] = ens.p[x] * std::max(0.0, (povm[y] * ens.states[x]).trace().real());
    }
    success += joint[x * nx + x];
  }
  ProtocolOutcome out;
  // Dense sigma_XX' only while it stays small; the merit never needs it.
  if (static_cast<long>(nx * nx) <= 1024) {
    out.final_state = diagonal_state(SystemSpace{{"X", static_cast<int>(nx)}, {"X'", static_cast<int>(nx)}}, joint);
  }
  out.merit = std::min(1.0, success);
  out.costs["m"] = log2i(inst.c_size) / inst.copies;
  return out;
}

}  // namespace renyisc
