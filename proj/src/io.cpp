#include "renyisc/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace renyisc {

namespace {

std::string join_field(const std::string& base, const std::string& child) {
  if (base.empty()) return child;
  if (!child.empty() && child.front() == '[') return base + child;
  return base + "." + child;
}

std::string index_field(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const Json& member(const Json& j, const std::string& key, const std::string& path, const std::string& field) {
  if (!j.is_object()) throw FileError(path, field.empty() ? "(root)" : field, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw FileError(path, join_field(field, key), "missing");
  return *it;
}

long integer(const Json& j, const std::string& path, const std::string& field, long min_value) {
  if (!j.is_number_integer()) throw FileError(path, field, "expected an integer");
  const long v = j.get<long>();
  if (v < min_value) throw FileError(path, field, "must be >= " + std::to_string(min_value));
  return v;
}

long optional_integer(const Json& j, const std::string& key, long fallback, const std::string& path,
                      const std::string& field, long min_value) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  return integer(*it, path, join_field(field, key), min_value);
}

double number(const Json& j, const std::string& path, const std::string& field) {
  if (!j.is_number()) throw FileError(path, field, "expected a number");
  return j.get<double>();
}

SystemSpace space_from_json(const Json& j, const std::string& path, const std::string& field) {
  if (!j.is_array()) throw FileError(path, field, "expected an array of systems");
  std::vector<Subsystem> subs;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string f = index_field(field, i);
    const Json& label = member(j[i], "label", path, f);
    if (!label.is_string() || label.get<std::string>().empty()) {
      throw FileError(path, join_field(f, "label"), "expected a non-empty string");
    }
    const long dim = integer(member(j[i], "dim", path, f), path, join_field(f, "dim"), 1);
    subs.push_back({label.get<std::string>(), static_cast<int>(dim)});
  }
  try {
    return SystemSpace(subs);
  } catch (const UsageError& e) {
    throw FileError(path, field, e.what());
  }
}

Matrix matrix_from_json(const Json& j, long rows, long cols, const std::string& path, const std::string& field) {
  if (!j.is_array() || static_cast<long>(j.size()) != rows) {
    throw FileError(path, field, "expected " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    const std::string rf = index_field(field, static_cast<std::size_t>(r));
    if (!row.is_array() || static_cast<long>(row.size()) != cols) {
      throw FileError(path, rf, "expected " + std::to_string(cols) + " entries");
    }
    for (long c = 0; c < cols; ++c) {
      const Json& e = row[static_cast<std::size_t>(c)];
      const std::string ef = index_field(rf, static_cast<std::size_t>(c));
      if (!e.is_array() || e.size() != 2) throw FileError(path, ef, "expected [re, im]");
      m(r, c) = cplx(number(e[0], path, ef), number(e[1], path, ef));
    }
  }
  return m;
}

/// Inline object or a path relative to the instance file.
Json resolve(const Json& j, const std::string& path, const std::string& field, std::string* source) {
  if (j.is_string()) {
    const std::filesystem::path p = std::filesystem::path(path).parent_path() / j.get<std::string>();
    *source = p.string();
    return load_json(*source);
  }
  if (!j.is_object()) throw FileError(path, field, "expected an object or a file name");
  *source = path;
  return j;
}

Operator embedded_state(const Json& parent, const std::string& key, const std::string& path) {
  std::string source;
  const Json j = resolve(member(parent, key, path, ""), path, key, &source);
  const std::string field = source == path ? key : "";
  Operator rho = state_from_json(j, source, field);
  try {
    require_density(rho);
  } catch (const InvalidInput& e) {
    throw FileError(source, join_field(field, "matrix"), e.what());
  }
  return rho;
}

Channel channel_at(const Json& j, const std::string& path, const std::string& field) {
  std::string source;
  const Json resolved = resolve(j, path, field, &source);
  const std::string f = source == path ? field : "";
  Channel ch = channel_from_json(resolved, source, f);
  try {
    require_channel(ch);
  } catch (const InvalidInput& e) {
    throw FileError(source, join_field(f, "isometry"), e.what());
  }
  return ch;
}

Channel embedded_channel(const Json& parent, const std::string& key, const std::string& path) {
  return channel_at(member(parent, key, path, ""), path, key);
}

std::vector<Matrix> povm_from_json(const Json& j, long dim, const std::string& path, const std::string& field) {
  if (!j.is_array() || j.empty()) throw FileError(path, field, "expected a non-empty array of matrices");
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(matrix_from_json(j[i], dim, dim, path, index_field(field, i)));
  return out;
}

int digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return 10 + (c - 'a');
  return -1;
}

std::vector<int> e_table_from_json(const Json& j, int dx, int copies, int target, const std::string& path) {
  const std::string field = "e_table";
  if (!j.is_object()) throw FileError(path, field, "expected an object mapping x^n to an index");
  long domain = 1;
  for (int i = 0; i < copies; ++i) domain *= dx;
  std::vector<int> table(static_cast<std::size_t>(domain), -1);
  for (const auto& [key, value] : j.items()) {
    const std::string f = field + "." + key;
    if (static_cast<int>(key.size()) != copies) {
      throw FileError(path, f, "key must have one symbol per copy (" + std::to_string(copies) + ")");
    }
    long x = 0;
    for (char c : key) {
      const int d = digit_value(c);
      if (d < 0 || d >= dx) throw FileError(path, f, "symbol out of range for |X| = " + std::to_string(dx));
      x = x * dx + d;
    }
    long z = -1;
    if (value.is_string()) {
      const std::string s = value.get<std::string>();
      std::size_t used = 0;
      try {
        z = std::stol(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != s.size() || s.empty()) z = -1;
    } else if (value.is_number_integer()) {
      z = value.get<long>();
    }
    if (z < 0 || z >= target) throw FileError(path, f, "value must be an index below " + std::to_string(target));
    if (table[static_cast<std::size_t>(x)] >= 0) throw FileError(path, f, "duplicate entry");
    table[static_cast<std::size_t>(x)] = static_cast<int>(z);
  }
  for (long x = 0; x < domain; ++x) {
    if (table[static_cast<std::size_t>(x)] < 0) throw FileError(path, field, "table is not total on X^n");
  }
  return table;
}

int classical_dim(const Operator& rho, const std::string& path) {
  if (!rho.space().contains("X") || !rho.space().contains("B")) {
    throw FileError(path, "state.systems", "c-q state needs systems X and B");
  }
  return rho.space().dim_of("X");
}

void require_systems(const Operator& rho, const std::vector<std::string>& labels, const std::string& path) {
  if (rho.space().size() != labels.size()) throw FileError(path, "state.systems", "expected systems " + [&] {
    std::string s;
    for (const auto& l : labels) s += (s.empty() ? "" : ",") + l;
    return s;
  }());
  for (const auto& l : labels) {
    if (!rho.space().contains(l)) throw FileError(path, "state.systems", "missing system " + l);
  }
}

/// Isometry rows permuted into output-then-environment order.
Matrix align_to_rows(const Channel& channel) {
  const SystemSpace& full = channel.isometry.out_space();
  const SystemSpace target = channel.output().concat(full.select(channel.environment));
  const std::size_t k = full.size();
  std::vector<long> stride(k, 1);
  for (std::size_t i = k; i-- > 1;) stride[i - 1] = stride[i] * full.subsystems()[i].dim;
  const Matrix& v = channel.isometry.matrix();
  Matrix out(v.rows(), v.cols());
  for (long t = 0; t < target.dim(); ++t) {
    long rest = t;
    long source = 0;
    for (std::size_t j = target.size(); j-- > 0;) {
      const Subsystem& s = target.subsystems()[j];
      source += (rest % s.dim) * stride[full.index_of(s.label)];
      rest /= s.dim;
    }
    out.row(t) = v.row(source);
  }
  return out;
}

Json costs_to_json(const std::map<std::string, double>& costs) {
  Json j = Json::object();
  for (const auto& [k, v] : costs) j[k] = v;
  return j;
}

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(format_double(v)); }

}  // namespace

FileError::FileError(const std::string& path, const std::string& field, const std::string& what)
    : UsageError(path + (field.empty() ? "" : ": field '" + field + "'") + ": " + what), path_(path), field_(field) {}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError(path, "", "cannot open file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FileError(path, "", std::string("invalid JSON: ") + e.what());
  }
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw FileError(path, "", "cannot write file");
  out << j.dump(2) << '\n';
  if (!out) throw FileError(path, "", "write failed");
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(Json::array({m(r, c).real(), m(r, c).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json space_to_json(const SystemSpace& space) {
  Json j = Json::array();
  for (const auto& s : space.subsystems()) j.push_back(Json{{"label", s.label}, {"dim", s.dim}});
  return j;
}

Json state_to_json(const Operator& rho) {
  return Json{{"systems", space_to_json(rho.space())}, {"matrix", matrix_to_json(rho.matrix())}};
}

Json channel_to_json(const Channel& channel) {
  const SystemSpace env = channel.isometry.out_space().select(channel.environment);
  return Json{{"input", space_to_json(channel.input())},
              {"output", space_to_json(channel.output())},
              {"environment", space_to_json(env)},
              {"isometry", matrix_to_json(align_to_rows(channel))}};
}

Operator state_from_json(const Json& j, const std::string& path, const std::string& field) {
  const SystemSpace space = space_from_json(member(j, "systems", path, field), path, join_field(field, "systems"));
  const Matrix m = matrix_from_json(member(j, "matrix", path, field), space.dim(), space.dim(), path,
                                    join_field(field, "matrix"));
  return Operator(space, m);
}

Channel channel_from_json(const Json& j, const std::string& path, const std::string& field) {
  const SystemSpace in = space_from_json(member(j, "input", path, field), path, join_field(field, "input"));
  const SystemSpace out = space_from_json(member(j, "output", path, field), path, join_field(field, "output"));
  SystemSpace env;
  if (j.contains("environment")) env = space_from_json(j["environment"], path, join_field(field, "environment"));
  SystemSpace full;
  try {
    full = out.concat(env);
  } catch (const UsageError& e) {
    throw FileError(path, join_field(field, "environment"), e.what());
  }
  const Matrix v = matrix_from_json(member(j, "isometry", path, field), full.dim(), in.dim(), path,
                                    join_field(field, "isometry"));
  return Channel{Operator(full, in, v), env.labels()};
}

Operator read_state(const std::string& path) {
  Operator rho = state_from_json(load_json(path), path);
  try {
    require_density(rho);
  } catch (const InvalidInput& e) {
    throw FileError(path, "matrix", e.what());
  }
  return rho;
}

void write_state(const std::string& path, const Operator& rho) { save_json(path, state_to_json(rho)); }

Channel read_channel(const std::string& path) { return channel_at(load_json(path), path, ""); }

ProtocolFile read_instance(const std::string& path) {
  const Json j = load_json(path);
  const Json& kind_json = member(j, "kind", path, "");
  if (!kind_json.is_string()) throw FileError(path, "kind", "expected a string");
  ProtocolFile f;
  try {
    f.kind = parse_protocol_kind(kind_json.get<std::string>());
  } catch (const UsageError& e) {
    throw FileError(path, "kind", e.what());
  }
  const int copies = static_cast<int>(optional_integer(j, "copies", 1, path, "", 1));
  const Json registers = j.contains("registers") ? j["registers"] : Json::object();
  if (!registers.is_object()) throw FileError(path, "registers", "expected an object");
  const auto reg = [&](const std::string& key, long fallback) {
    return static_cast<int>(optional_integer(registers, key, fallback, path, "registers", 1));
  };
  const Operator rho = embedded_state(j, "state", path);

  switch (f.kind) {
    case ProtocolKind::redistribution: {
      require_systems(rho, {"A", "B", "C"}, path);
      f.redistribution = {rho, copies, reg("k", 1), reg("m", 1), embedded_channel(j, "encoder", path),
                          embedded_channel(j, "decoder", path)};
      break;
    }
    case ProtocolKind::redistribution_feedback: {
      require_systems(rho, {"A", "B", "C"}, path);
      const Json& rounds = member(j, "rounds", path, "");
      if (!rounds.is_array() || rounds.empty() || rounds.size() % 2 != 0) {
        throw FileError(path, "rounds", "expected E1, D1, ..., EM, DM");
      }
      f.feedback = {rho, copies, reg("k", 1), reg("m", 1), {}};
      for (std::size_t i = 0; i < rounds.size(); ++i) {
        f.feedback.rounds.push_back(channel_at(rounds[i], path, index_field("rounds", i)));
      }
      break;
    }
    case ProtocolKind::coherent_merging:
      require_systems(rho, {"A", "B"}, path);
      f.merging = {rho, copies, embedded_channel(j, "encoder", path), embedded_channel(j, "decoder", path)};
      break;
    case ProtocolKind::state_splitting:
      require_systems(rho, {"A", "C"}, path);
      f.splitting = {rho, copies, reg("k", 1), embedded_channel(j, "encoder", path),
                     embedded_channel(j, "decoder", path)};
      break;
    case ProtocolKind::measurement_compression: {
      require_systems(rho, {"A", "B"}, path);
      auto& m = f.measurement;
      m.state = rho;
      m.povm = povm_from_json(member(j, "povm", path, ""), rho.space().dim_of("A"), path, "povm");
      m.copies = copies;
      m.randomness = reg("randomness", 1);
      m.message = reg("message", 1);
      m.encoder = embedded_channel(j, "encoder", path);
      m.decoder = embedded_channel(j, "decoder", path);
      break;
    }
    case ProtocolKind::randomness_extraction: {
      const int dx = classical_dim(rho, path);
      const int z = reg("z", 1);
      f.extraction = {rho, copies, z, e_table_from_json(member(j, "e_table", path, ""), dx, copies, z, path)};
      break;
    }
    case ProtocolKind::data_compression: {
      const int dx = classical_dim(rho, path);
      auto& d = f.compression;
      d.state = rho;
      d.copies = copies;
      d.c_size = reg("c", 1);
      d.e_table = e_table_from_json(member(j, "e_table", path, ""), dx, copies, d.c_size, path);
      const Json decoder = j.contains("decoder") ? j["decoder"] : Json("pretty-good");
      if (decoder.is_string()) {
        if (decoder.get<std::string>() != "pretty-good") throw FileError(path, "decoder", "expected \"pretty-good\" or POVMs");
        d.pretty_good = true;
      } else {
        if (!decoder.is_array() || static_cast<int>(decoder.size()) != d.c_size) {
          throw FileError(path, "decoder", "expected one POVM per value of c");
        }
        long db = 1;
        long nx = 1;
        for (int i = 0; i < copies; ++i) {
          db *= rho.space().dim_of("B");
          nx *= dx;
        }
        d.pretty_good = false;
        for (std::size_t c = 0; c < decoder.size(); ++c) {
          d.povms.push_back(povm_from_json(decoder[c], db, path, index_field("decoder", c)));
          if (static_cast<long>(d.povms.back().size()) != nx) {
            throw FileError(path, index_field("decoder", c), "expected |X|^n elements");
          }
        }
      }
      break;
    }
  }
  return f;
}

ProtocolOutcome run_instance(const ProtocolFile& f) {
  switch (f.kind) {
    case ProtocolKind::redistribution: return run_redistribution(f.redistribution);
    case ProtocolKind::redistribution_feedback: return run_feedback_redistribution(f.feedback);
    case ProtocolKind::coherent_merging: return run_coherent_merging(f.merging);
    case ProtocolKind::state_splitting: return run_state_splitting(f.splitting);
    case ProtocolKind::measurement_compression: return run_measurement_compression(f.measurement);
    case ProtocolKind::randomness_extraction: return run_randomness_extraction(f.extraction);
    case ProtocolKind::data_compression: return run_data_compression(f.compression);
  }
  throw UsageError("unknown protocol kind");
}

BoundState bound_state(const ProtocolFile& f) {
  BoundState bs;
  bs.kind = f.kind;
  switch (f.kind) {
    case ProtocolKind::redistribution:
      bs.state = f.redistribution.state;
      bs.copies = f.redistribution.copies;
      break;
    case ProtocolKind::redistribution_feedback:
      bs.state = f.feedback.state;
      bs.copies = f.feedback.copies;
      break;
    case ProtocolKind::coherent_merging:
      bs.state = f.merging.state;
      bs.copies = f.merging.copies;
      break;
    case ProtocolKind::state_splitting:
      bs.state = f.splitting.state;
      bs.copies = f.splitting.copies;
      break;
    case ProtocolKind::measurement_compression:
      bs.state = f.measurement.state;
      bs.povm = f.measurement.povm;
      bs.copies = f.measurement.copies;
      break;
    case ProtocolKind::randomness_extraction:
      bs.state = f.extraction.state;
      bs.copies = f.extraction.copies;
      break;
    case ProtocolKind::data_compression:
      bs.state = f.compression.state;
      bs.copies = f.compression.copies;
      break;
  }
  return bs;
}

Json outcome_to_json(const ProtocolFile& file, const ProtocolOutcome& outcome) {
  const BoundState bs = bound_state(file);
  return Json{{"kind", to_string(file.kind)},
              {"copies", bs.copies},
              {"merit", outcome.merit},
              {"costs", costs_to_json(outcome.costs)},
              {"final_state_systems", space_to_json(outcome.final_state.space())}};
}

Json curves_to_json(const std::vector<ExponentCurve>& curves) {
  Json out = Json::array();
  for (const auto& c : curves) {
    Json points = Json::array();
    for (const auto& p : c.points) {
      points.push_back(Json{{"alpha", p.alpha},
                            {"beta", p.beta},
                            {"kappa", p.kappa},
                            {"expression_bits", nullable(p.expression)},
                            {"rate_bits", p.rate},
                            {"exponent", nullable(p.exponent)},
                            {"log2_merit_bound", nullable(p.log2_merit_bound)}});
    }
    out.push_back(Json{{"bound_id", c.bound_id}, {"sup", nullable(c.sup)}, {"sup_alpha", c.sup_alpha},
                       {"points", std::move(points)}});
  }
  return out;
}

Json limits_to_json(const std::vector<LimitEntry>& entries) {
  Json out = Json::array();
  for (const auto& e : entries) {
    out.push_back(Json{{"bound_id", e.bound_id},
                       {"alpha", e.alpha},
                       {"renyi", nullable(e.renyi)},
                       {"von_neumann", nullable(e.von_neumann)},
                       {"gap", nullable(e.gap)}});
  }
  return out;
}

Json suite_report_to_json(const SuiteReport& r) {
  Json failures = Json::array();
  for (const auto& f : r.failures) {
    Json values = Json::object();
    for (const auto& [k, v] : f.values) values[k] = nullable(v);
    failures.push_back(Json{{"trial", f.trial},
                            {"seed", f.seed},
                            {"check", f.check},
                            {"values", std::move(values)},
                            {"slack", nullable(f.slack)}});
  }
  return Json{{"suite", r.suite},
              {"seed", r.seed},
              {"trials", r.trials},
              {"dims", r.dims},
              {"tolerance", r.tolerance},
              {"optimizer_tolerance", r.optimizer_tolerance},
              {"checks", r.checks},
              {"passed", r.passed()},
              {"failure_count", r.failures.size()},
              {"max_violation", r.max_violation},
              {"failures", std::move(failures)}};
}

Json falsify_report_to_json(const FalsifyReport& r, const std::vector<std::string>& files) {
  Json list = Json::array();
  for (std::size_t i = 0; i < r.counterexamples.size(); ++i) {
    const auto& c = r.counterexamples[i];
    list.push_back(Json{{"direction", c.direction},
                        {"trial", c.trial},
                        {"alpha", c.alpha},
                        {"left", c.left},
                        {"right", c.right},
                        {"margin", c.margin},
                        {"reverified", c.reverified},
                        {"state_file", i < files.size() ? Json(files[i]) : Json(nullptr)}});
  }
  return Json{{"trials", r.trials},
              {"seed", r.seed},
              {"left_violations", r.left_violations},
              {"right_violations", r.right_violations},
              {"crosschecks", r.crosschecks},
              {"crosscheck_max_difference", r.crosscheck_max_difference},
              {"counterexamples", std::move(list)}};
}

std::vector<double> parse_grid(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("grid must be start:end:count, got '" + spec + "'");
  try {
    std::size_t u0 = 0, u1 = 0, u2 = 0;
    const double start = std::stod(parts[0], &u0);
    const double end = std::stod(parts[1], &u1);
    const int count = std::stoi(parts[2], &u2);
    if (u0 != parts[0].size() || u1 != parts[1].size() || u2 != parts[2].size()) throw std::invalid_argument("");
    return alpha_grid(start, end, count);
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception&) {
    throw UsageError("grid must be start:end:count, got '" + spec + "'");
  }
}

std::vector<int> parse_dims(const std::string& spec) {
  std::vector<int> dims;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    int d = 0;
    try {
      d = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty()) throw UsageError("dims must look like 2,3,2, got '" + spec + "'");
    dims.push_back(d);
  }
  if (dims.empty()) throw UsageError("dims must look like 2,3,2, got '" + spec + "'");
  return dims;
}

}  // namespace renyisc
